#include "horolab/classify.hpp"

#include <algorithm>
#include <set>

#include "horolab/grid.hpp"

#ifdef HOROLAB_OPENMP
#include <omp.h>
#endif

namespace horolab {

namespace {

cplx mobius(const Isometry& g, cplx z) {
    cplx den = g.c * z + g.d;
    if (std::abs(den) < 1e-150) throw PreconditionError("boundary point maps to infinity");
    return (g.a * z + g.b) / den;
}

cplx circumcenter(cplx a, cplx b, cplx c) {
    double d = 2.0 * (a.real() * (b.imag() - c.imag()) + b.real() * (c.imag() - a.imag()) +
                      c.real() * (a.imag() - b.imag()));
    if (std::abs(d) < 1e-14 * (std::norm(a) + std::norm(b) + std::norm(c)))
        throw PreconditionError("pairing circle degenerates in the ray frame");
    double ux = std::norm(a) * (b.imag() - c.imag()) + std::norm(b) * (c.imag() - a.imag()) +
                std::norm(c) * (a.imag() - b.imag());
    double uy = std::norm(a) * (c.real() - b.real()) + std::norm(b) * (a.real() - c.real()) +
                std::norm(c) * (b.real() - a.real());
    return cplx(ux / d, uy / d);
}

struct Fit {
    double slope, stderr_;
};

Fit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    int n = int(xs.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; i++) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; i++) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double rss = 0;
    for (int i = 0; i < n; i++) {
        double r = ys[i] - my - slope * (xs[i] - mx);
        rss += r * r;
    }
    return Fit{slope, n > 2 ? std::sqrt(rss / double(n - 2) / sxx) : 0.0};
}

std::vector<double> sample_times(double T, double step) {
    if (step <= 0 || T < step) throw PreconditionError("profile needs 0 < step <= T");
    std::vector<double> ts;
    int n = int(std::round(T / step));
    for (int k = 0; k <= n; k++) ts.push_back(k * step);
    return ts;
}

} // namespace

RayOrbitSearch::RayOrbitSearch(const SchottkyPresentation& G, const InteriorPoint& z,
                               const BoundaryPoint& xi) {
    if (!G.ball_certified)
        throw PreconditionError("certified ray search needs pairing balls");
    z.check();
    frame_ = ray_frame(GeodesicRay{z, xi});
    num_letters_ = G.num_letters();
    Isometry F_inv = frame_.M.inverse();
    for (int l = 0; l < num_letters_; l++) {
        if (behind_cap(z, G.letter_source(l)))
            throw PreconditionError("ray base lies inside a pairing dome; move it");
        Isometry conj = compose(compose(frame_.M, G.letter_isometry(l)), F_inv);
        // when xi is a fixed point of this letter the conjugate is upper
        // triangular; rounding noise in c would corrupt images of points at
        // height ~ 1/|c|, so snap it to an exact zero
        double sc = std::max(std::max(std::abs(conj.a), std::abs(conj.b)),
                             std::max(std::abs(conj.c), std::abs(conj.d)));
        if (std::abs(conj.c) < 1e-13 * sc) conj.c = 0;
        conj_letter_.push_back(conj);
        Cap tgt = G.letter_target(l);
        PlanarCircle orig = cap_to_circle(tgt);
        FrameCircle fc;
        // the image region is bounded iff xi (the frame pole) is outside it
        fc.bounded = chordal_distance(xi, tgt.center) > tgt.radius;
        if (G.model == Model::disk) {
            cplx p = mobius(frame_.M, orig.center - orig.radius);
            cplx q = mobius(frame_.M, orig.center + orig.radius);
            fc.circle.center = cplx((p.real() + q.real()) / 2.0, 0.0);
            fc.circle.radius = std::abs(p.real() - q.real()) / 2.0;
        } else {
            cplx p0 = mobius(frame_.M, orig.center + orig.radius);
            cplx p1 = mobius(frame_.M, orig.center + orig.radius * cplx(-0.5, 0.8660254037844386));
            cplx p2 = mobius(frame_.M, orig.center + orig.radius * cplx(-0.5, -0.8660254037844386));
            fc.circle.center = circumcenter(p0, p1, p2);
            fc.circle.radius = std::abs(p0 - fc.circle.center);
        }
        if (fc.circle.radius > 1e8 || !(fc.circle.radius > 0))
            throw PreconditionError("ray target sits on a pairing circle");
        target_.push_back(fc);
    }
}

double RayOrbitSearch::region_bound(const HalfSpacePoint& y, int letter) const {
    const FrameCircle& fc = target_[letter];
    double s = (std::norm(y.zeta - fc.circle.center) + y.height * y.height -
                fc.circle.radius * fc.circle.radius) /
               (2.0 * fc.circle.radius * y.height);
    if (!fc.bounded) s = -s;
    return s > 0 ? std::asinh(s) : 0.0;
}

HalfSpacePoint RayOrbitSearch::pull_back(const Word& w, const HalfSpacePoint& x_frame) const {
    HalfSpacePoint y = x_frame;
    for (std::int8_t u : w.letters) y = apply_hs(conj_letter_[u ^ 1], y);
    return y;
}

NearestPoint RayOrbitSearch::nearest(double t, double collect_below,
                                     std::size_t max_nodes) const {
    const HalfSpacePoint zf{cplx(0), 1.0};
    const HalfSpacePoint x{cplx(0), std::exp(t)};
    NearestPoint out;
    out.dist = hyperbolic_distance_hs(x, zf);
    out.witness = Word{};
    if (collect_below >= 0 && out.dist <= collect_below) out.candidates.push_back({Word{}, out.dist});

    struct Child {
        double bound;
        int letter;
    };
    Word word;
    std::size_t nodes = 0;

    // descend children in bound order; a child's bound covers its whole
    // subtree (every extension stays behind the frame image of the child's
    // target dome), so the search is exact
    auto visit = [&](auto&& self, const HalfSpacePoint& y, int last) -> void {
        if (++nodes > max_nodes)
            throw ResourceCapError("ray search exceeds the node cap of " + std::to_string(max_nodes));
        Child kids[16];
        int nk = 0;
        for (int u = 0; u < num_letters_; u++) {
            if (last >= 0 && u == (last ^ 1)) continue;
            kids[nk++] = Child{region_bound(y, u), u};
        }
        std::sort(kids, kids + nk, [](const Child& a, const Child& b) { return a.bound < b.bound; });
        for (int i = 0; i < nk; i++) {
            if (kids[i].bound >= std::max(out.dist, collect_below)) break;
            int u = kids[i].letter;
            HalfSpacePoint yc = apply_hs(conj_letter_[u ^ 1], y);
            double v = hyperbolic_distance_hs(yc, zf);
            word.letters.push_back(std::int8_t(u));
            if (v < out.dist) {
                out.dist = v;
                out.witness = word;
            }
            if (collect_below >= 0 && v <= collect_below) out.candidates.push_back({word, v});
            self(self, yc, u);
            word.letters.pop_back();
        }
    };
    visit(visit, x, -1);
    out.nodes_visited = nodes;
    return out;
}

EscapeProfile escape_profile(const SchottkyPresentation& G, const InteriorPoint& z,
                             const BoundaryPoint& xi, double T, double step,
                             std::size_t max_entries) {
    std::vector<double> ts = sample_times(T, step);
    EscapeProfile prof;
    prof.ray = GeodesicRay{z, xi};
    prof.orbit_basepoint = z;
    prof.step = step;
    prof.T = T;
    if (G.ball_certified) {
        prof.certified = true;
        RayOrbitSearch rs(G, z, xi);
        for (double t : ts) {
            NearestPoint np = rs.nearest(t);
            prof.samples.push_back(ProfileSample{t, np.dist, np.witness, true});
        }
        return prof;
    }
    // asserted-free fallback: frontier orbit, shrinking the radius until it fits
    double R = 2.0 * T + 1.0;
    OrbitSet orbit;
    for (;;) {
        try {
            orbit = enumerate_orbit(G, z, R, max_entries);
            break;
        } catch (const ResourceCapError&) {
            R -= 2.0;
            if (R < 2.0 * step + 1.0) throw;
            prof.warning = "orbit truncated to radius " + std::to_string(R) +
                           "; exactness flags false beyond the covered range";
        }
    }
    EscapeProfile evaluated = escape_profile_orbit(orbit, z, xi, T, step);
    evaluated.warning = prof.warning;
    return evaluated;
}

EscapeProfile escape_profile_orbit(const OrbitSet& orbit, const InteriorPoint& z,
                                   const BoundaryPoint& xi, double T, double step) {
    if (orbit.entries.empty()) throw PreconditionError("escape profile needs a nonempty orbit");
    std::vector<double> ts = sample_times(T, step);
    EscapeProfile prof;
    prof.ray = GeodesicRay{z, xi};
    prof.orbit_basepoint = orbit.basepoint;
    prof.step = step;
    prof.T = T;
    prof.truncation_radius = orbit.radius;
    prof.certified = orbit.certified;
    double d0 = hyperbolic_distance(z, orbit.basepoint);
    RayFrame f = ray_frame(prof.ray);
    std::vector<HalfSpacePoint> pts;
    pts.reserve(orbit.entries.size());
    for (const OrbitEntry& e : orbit.entries) pts.push_back(apply_hs(f.M, e.gz));
    for (double t : ts) {
        HalfSpacePoint x{cplx(0), std::exp(t)};
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < pts.size(); i++) {
            double d = hyperbolic_distance_hs(pts[i], x);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        bool exact = orbit.complete && orbit.certified &&
                     orbit.radius >= 2.0 * t + 2.0 * d0 + 1.0;
        prof.samples.push_back(ProfileSample{t, best, orbit.entries[arg].word, exact});
    }
    return prof;
}

RadialResult test_radial(const EscapeProfile& profile, double c, int k_min) {
    RadialResult out;
    out.c = c;
    double lo = 1e300, hi = -1e300;
    for (const ProfileSample& s : profile.samples)
        if (s.phi <= c) {
            out.count++;
            lo = std::min(lo, s.t);
            hi = std::max(hi, s.t);
        }
    out.spread = out.count ? hi - lo : 0.0;
    out.degenerate = c >= profile.T;
    out.passed = out.degenerate || (out.count >= k_min && out.spread >= profile.T / 2.0);
    return out;
}

HoroResult test_horospheric(const EscapeProfile& profile, double M) {
    HoroResult out;
    out.M = M;
    for (const ProfileSample& s : profile.samples)
        out.achieved_depth = std::max(out.achieved_depth, s.t - s.phi);
    out.passed = out.achieved_depth >= M;
    return out;
}

HoroResult test_horospheric_orbit(const OrbitSet& orbit, const BoundaryPoint& xi, double M) {
    HoroResult out;
    out.M = M;
    RayFrame f = ray_frame(GeodesicRay{orbit.basepoint, xi});
    for (const OrbitEntry& e : orbit.entries) {
        double b = frame_busemann(apply_hs(f.M, e.gz));
        out.achieved_depth = std::max(out.achieved_depth, -b);
    }
    out.passed = out.achieved_depth >= M;
    return out;
}

BigHoroResult test_big_horospheric(const OrbitSet& orbit, const BoundaryPoint& xi, double M,
                                   int K) {
    BigHoroResult out;
    out.level = M;
    out.k_required = K;
    RayFrame f = ray_frame(GeodesicRay{orbit.basepoint, xi});
    for (const OrbitEntry& e : orbit.entries)
        if (frame_busemann(apply_hs(f.M, e.gz)) <= M) out.count++;
    out.passed = out.count >= K;
    return out;
}

LambdaResult test_lambda(const EscapeProfile& profile, double kappa, double tolerance) {
    LambdaResult out;
    out.kappa = kappa;
    out.tolerance = tolerance;
    out.ratio = 1e300;
    for (const ProfileSample& s : profile.samples)
        if (s.t >= profile.T / 2.0 && s.t > 0)
            out.ratio = std::min(out.ratio, s.phi / s.t);
    out.passed = out.ratio <= kappa + tolerance;
    return out;
}

LambdaResult test_lambda_star(const EscapeProfile& profile, double tolerance) {
    LambdaResult out;
    out.tolerance = tolerance;
    out.ratio = 0.0;
    for (const ProfileSample& s : profile.samples)
        if (s.t >= profile.T / 2.0 && s.t > 0)
            out.ratio = std::max(out.ratio, s.phi / s.t);
    out.passed = out.ratio <= tolerance;
    return out;
}

ShadowResult test_shadow_limit(const OrbitSet& orbit, const BoundaryPoint& xi, double c,
                               double kappa, int k_min) {
    ShadowResult out;
    out.c = c;
    out.kappa = kappa;
    for (std::size_t i = 0; i < orbit.entries.size(); i++) {
        if (orbit.entries[i].dist < 1e-9) continue; // basepoint has no direction
        InteriorPoint p = orbit.entry_ball_point(i);
        if (norm(p.x) < 1e-9) continue;
        if (shadow_contains(p, c, kappa, xi)) out.count++;
    }
    out.passed = out.count >= k_min;
    return out;
}

std::vector<DirectedSegment> default_myrberg_net(const SchottkyPresentation& G,
                                                 double half_length) {
    std::vector<DirectedSegment> net;
    std::vector<std::pair<BoundaryPoint, BoundaryPoint>> seen;
    auto add_word = [&](const Word& w) {
        AxisData ax = axis_data(word_to_isometry(G, w));
        for (const auto& [a, r] : seen)
            if (chordal_distance(a, ax.attracting) < 1e-9 && chordal_distance(r, ax.repelling) < 1e-9)
                return;
        seen.push_back({ax.attracting, ax.repelling});
        GeodesicLine line{ax.repelling, ax.attracting};
        double center = project_to_line(line, origin(G.model)).param;
        net.push_back(DirectedSegment{line, center, half_length});
    };
    for (int l = 0; l < G.num_letters(); l++) add_word(Word{{std::int8_t(l)}});
    for (int l1 = 0; l1 < G.num_letters(); l1++)
        for (int l2 = 0; l2 < G.num_letters(); l2++)
            if (l2 != (l1 ^ 1)) add_word(Word{{std::int8_t(l1), std::int8_t(l2)}});
    return net;
}

MyrbergResult myrberg_score(const SchottkyPresentation& G, const InteriorPoint& z,
                            const BoundaryPoint& xi, const std::vector<DirectedSegment>& net,
                            double eps, double T) {
    if (net.empty()) throw PreconditionError("myrberg score needs a nonempty segment net");
    MyrbergResult out;
    out.eps = eps;
    out.T = T;
    out.visited.assign(net.size(), 0);
    RayOrbitSearch rs(G, z, xi);
    const HalfSpacePoint zf{cplx(0), 1.0};

    const int ns = 10; // window samples
    const int nf = 41; // segment samples (fine, to approximate distance-to-segment)
    std::vector<std::vector<HalfSpacePoint>> seg_pts(net.size());
    std::vector<std::vector<double>> seg_par(net.size());
    double reach = 0;
    for (std::size_t s = 0; s < net.size(); s++) {
        const DirectedSegment& seg = net[s];
        for (int i = 0; i < nf; i++) {
            double p = seg.center - seg.half_length + 2.0 * seg.half_length * i / (nf - 1);
            HalfSpacePoint q = apply_hs(rs.frame().M, ball_to_halfspace(line_point(seg.line, p)));
            reach = std::max(reach, hyperbolic_distance_hs(q, zf));
            seg_pts[s].push_back(q);
            seg_par[s].push_back(p);
        }
    }
    double window = 2.0 * net.front().half_length;
    double collect = reach + eps + 1e-9;

    for (double t0 = 0.0; t0 + window <= T + 1e-9; t0 += window / 2.0) {
        NearestPoint np = rs.nearest(t0 + window / 2.0, collect);
        for (const auto& [w, val] : np.candidates) {
            // image of the directed ray window under w^{-1}, stepping in t
            std::vector<HalfSpacePoint> img;
            for (int j = 0; j < ns; j++) {
                double tj = t0 + window * j / (ns - 1);
                img.push_back(rs.pull_back(w, HalfSpacePoint{cplx(0), std::exp(tj)}));
            }
            for (std::size_t s = 0; s < net.size(); s++) {
                if (out.visited[s]) continue;
                double worst = 0;
                double p_first = 0, p_last = 0;
                for (int j = 0; j < ns && worst <= eps; j++) {
                    double best = 1e300;
                    int arg = 0;
                    for (int i = 0; i < nf; i++) {
                        double d = hyperbolic_distance_hs(img[j], seg_pts[s][i]);
                        if (d < best) {
                            best = d;
                            arg = i;
                        }
                    }
                    worst = std::max(worst, best);
                    if (j == 0) p_first = seg_par[s][arg];
                    p_last = seg_par[s][arg];
                }
                // require motion along the segment's own direction
                if (worst <= eps && p_last - p_first >= 1.5) out.visited[s] = 1;
            }
        }
    }
    int hit = 0;
    for (char v : out.visited) hit += v;
    out.score = double(hit) / double(net.size());
    out.passed = hit == int(net.size());
    return out;
}

DimensionResult box_dimension_estimate(const std::vector<BoundaryPoint>& points, double scale_lo,
                                       double scale_hi) {
    if (points.size() < 1000) throw PreconditionError("box dimension needs at least 1000 points");
    if (scale_lo < 1e-4 * (1 - 1e-9) || scale_hi > 1e-1 * (1 + 1e-9) || scale_lo >= scale_hi)
        throw ConfigError("scale range must sit inside [1e-4, 1e-1]");
    Model m = points.front().model;
    bool all_same = true;
    for (const BoundaryPoint& p : points)
        if (chordal_distance(p, points.front()) > 1e-12) all_same = false;
    if (all_same) return DimensionResult{0.0, 0.0, 0};

    std::vector<double> xs, ys;
    int levels = 0;
    long long max_count = 1;
    for (int level = 0; level < 40; level++) {
        double scale = grid_cell_scale(m, level);
        if (scale > scale_hi) continue;
        if (scale < scale_lo) break;
        std::set<std::int64_t> cells;
        for (const BoundaryPoint& p : points) cells.insert(grid_cell_index(p, level));
        long long count = (long long)cells.size();
        max_count = std::max(max_count, count);
        xs.push_back(std::log(1.0 / scale));
        ys.push_back(std::log(double(count)));
        levels++;
    }
    if (levels < 2) throw ConfigError("scale range spans fewer than two grid levels");
    if (max_count <= 1)
        throw InsufficientDataError("point set collapses to one cell at every scale");
    Fit fit = fit_line(xs, ys);
    return DimensionResult{fit.slope, fit.stderr_, levels};
}

Verdict classify_point(const SchottkyPresentation& G, const OrbitSet& orbit,
                       const InteriorPoint& z, const BoundaryPoint& xi,
                       const ClassifyParams& params) {
    Verdict v;
    v.xi = xi;
    v.T = params.T;
    v.orbit_radius = orbit.radius;
    EscapeProfile prof = escape_profile(G, z, xi, params.T, params.step);
    v.radial = test_radial(prof, params.c, params.k_min);
    v.shadow = test_shadow_limit(orbit, xi, params.c, params.kappa, params.k_min);
    v.horospheric = test_horospheric(prof, params.M);
    v.horospheric_busemann = test_horospheric_orbit(orbit, xi, params.M);
    v.big_horospheric = test_big_horospheric(orbit, xi, 0.0, params.K);
    v.lambda = test_lambda(prof, params.kappa, params.lambda_tol);
    v.lambda_star = test_lambda_star(prof, params.lambda_tol);
    return v;
}

std::vector<Verdict> classify_points_serial(const SchottkyPresentation& G, const OrbitSet& orbit,
                                            const InteriorPoint& z,
                                            const std::vector<BoundaryPoint>& xis,
                                            const ClassifyParams& params) {
    std::vector<Verdict> out(xis.size());
    for (std::size_t i = 0; i < xis.size(); i++) out[i] = classify_point(G, orbit, z, xis[i], params);
    return out;
}

std::vector<Verdict> classify_points(const SchottkyPresentation& G, const OrbitSet& orbit,
                                     const InteriorPoint& z, const std::vector<BoundaryPoint>& xis,
                                     const ClassifyParams& params) {
#ifdef HOROLAB_OPENMP
    std::vector<Verdict> out(xis.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < std::int64_t(xis.size()); i++) {
        try {
            out[i] = classify_point(G, orbit, z, xis[i], params);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
#else
    return classify_points_serial(G, orbit, z, xis, params);
#endif
}

std::vector<BoundaryPoint> sample_limit_points(const SchottkyPresentation& G, int count,
                                               int word_length, Rng& rng) {
    std::vector<BoundaryPoint> out;
    while (int(out.size()) < count) {
        Word w;
        while (w.length() < word_length) {
            int u = int(rng.next_below(std::uint64_t(G.num_letters())));
            if (!w.empty() && u == (w.letters.back() ^ 1)) continue;
            w.letters.push_back(std::int8_t(u));
        }
        out.push_back(axis_data(word_to_isometry(G, w)).attracting);
    }
    return out;
}

} // namespace horolab
