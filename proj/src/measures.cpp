#include "horolab/measures.hpp"

#include <algorithm>
#include <map>

#include "horolab/grid.hpp"

namespace horolab {

namespace {

std::vector<double> grid_radii(double r_max, double step) {
    std::vector<double> out;
    for (double r = step; r < r_max - 1e-12; r += step) out.push_back(r);
    out.push_back(r_max);
    return out;
}

// Cumulative sums of e^{-s d} over sorted distances, sampled at grid radii.
std::vector<std::pair<double, double>> partial_sums(std::vector<double> dists, double s,
                                                    double r_max, double step) {
    std::sort(dists.begin(), dists.end());
    std::vector<std::pair<double, double>> out;
    double acc = 0;
    std::size_t i = 0;
    for (double r : grid_radii(r_max, step)) {
        while (i < dists.size() && dists[i] <= r) acc += std::exp(-s * dists[i++]);
        out.push_back({r, acc});
    }
    return out;
}

struct Fit {
    double slope, stderr_;
    int n;
};

Fit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
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
    double intercept = my - slope * mx;
    double rss = 0;
    for (int i = 0; i < n; i++) {
        double r = ys[i] - (intercept + slope * xs[i]);
        rss += r * r;
    }
    double se = n > 2 ? std::sqrt(rss / double(n - 2) / sxx) : 0.0;
    return Fit{slope, se, n};
}

AtomicMeasure atoms_from_orbit(const OrbitSet& orbit, double s,
                               AtomicMeasure::Provenance prov) {
    AtomicMeasure mu;
    mu.model = orbit.model;
    mu.s = s;
    mu.truncation_radius = orbit.radius;
    mu.provenance = prov;
    HalfSpacePoint o_hs = ball_to_halfspace(origin(orbit.model));
    bool base_is_origin = orbit.basepoint.norm2() < 1e-30;
    double mass = 0;
    for (std::size_t i = 0; i < orbit.entries.size(); i++) {
        const OrbitEntry& e = orbit.entries[i];
        if (e.word.empty() && base_is_origin) continue; // no direction to project
        InteriorPoint p = halfspace_to_ball(e.gz, orbit.model);
        double d = hyperbolic_distance_hs(e.gz, o_hs);
        double w = std::exp(-s * d);
        mu.atoms.push_back(radial_projection(p));
        mu.weights.push_back(w);
        mu.depths.push_back(d);
        mass += w;
    }
    if (mu.atoms.empty()) throw InsufficientDataError("orbit yields no atoms to project");
    for (double& w : mu.weights) w /= mass;
    mu.total_mass = 0;
    for (double w : mu.weights) mu.total_mass += w;
    return mu;
}

std::map<std::int64_t, double> cell_masses(const AtomicMeasure& mu, int level) {
    std::map<std::int64_t, double> out;
    for (std::size_t i = 0; i < mu.atoms.size(); i++)
        out[grid_cell_index(mu.atoms[i], level)] += mu.weights[i];
    return out;
}

bool vec_less(const Vec3& a, const Vec3& b) {
    for (int i = 0; i < 3; i++) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

} // namespace

SeriesProfile poincare_partial(const OrbitSet& orbit, double s, const InteriorPoint& z,
                               double grid_step) {
    if (!orbit.complete) throw PreconditionError("poincare_partial needs a complete orbit ball");
    if (orbit.entries.empty()) throw PreconditionError("poincare_partial: empty orbit");
    if (s < 0) throw PreconditionError("poincare_partial: exponent must be nonnegative");
    z.check();
    HalfSpacePoint z_hs = ball_to_halfspace(z);
    std::vector<double> dists;
    dists.reserve(orbit.entries.size());
    for (const OrbitEntry& e : orbit.entries)
        dists.push_back(hyperbolic_distance_hs(e.gz, z_hs));
    // the ball around the orbit basepoint only certifies distances to z up to
    // R minus the basepoint offset
    double r_max = orbit.radius - hyperbolic_distance(orbit.basepoint, z);
    if (r_max <= grid_step) throw PreconditionError("evaluation point too far from the orbit basepoint");
    SeriesProfile prof;
    prof.s = s;
    prof.x = orbit.basepoint;
    prof.z = z;
    prof.partials = partial_sums(std::move(dists), s, r_max, grid_step);
    return prof;
}

ExponentEstimate critical_exponent_estimate(const OrbitSet& orbit, double window_lo,
                                            double window_hi, double grid_step) {
    if (!orbit.complete) throw PreconditionError("exponent estimate needs a complete orbit ball");
    if (window_hi - window_lo < 5.0) throw PreconditionError("estimation window shorter than 5");
    if (orbit.radius < window_hi - 1e-12)
        throw PreconditionError("orbit truncation radius below the window top");
    std::vector<double> dists;
    for (const OrbitEntry& e : orbit.entries) dists.push_back(e.dist);
    std::sort(dists.begin(), dists.end());
    std::vector<double> xs, ys;
    long long distinct = 0, last_count = -1;
    for (double r = window_lo; r <= window_hi + 1e-12; r += grid_step) {
        long long count = std::upper_bound(dists.begin(), dists.end(), r) - dists.begin();
        if (count == 0) continue;
        if (count != last_count) distinct++;
        last_count = count;
        xs.push_back(r);
        ys.push_back(std::log(double(count)));
    }
    if (distinct < 10)
        throw InsufficientDataError("fewer than 10 distinct orbit counts in the window");
    Fit fit = least_squares(xs, ys);
    return ExponentEstimate{fit.slope, fit.stderr_, window_lo, window_hi, fit.n};
}

DivergenceResult divergence_diagnostic(const SeriesProfile& profile, double grow_rate,
                                       double plateau_rate) {
    const auto& p = profile.partials;
    if (p.size() < 3) return DivergenceResult{DivergenceVerdict::inconclusive, 0.0};
    double r_lo = p.front().first, r_hi = p.back().first;
    double cut = r_hi - (r_hi - r_lo) / 3.0;
    std::vector<double> xs, ys;
    for (const auto& [r, v] : p)
        if (r >= cut - 1e-12) {
            xs.push_back(r);
            ys.push_back(v);
        }
    if (xs.size() < 2) return DivergenceResult{DivergenceVerdict::inconclusive, 0.0};
    double slope = least_squares(xs, ys).slope;
    DivergenceVerdict v = slope >= grow_rate    ? DivergenceVerdict::diverging_like
                          : slope < plateau_rate ? DivergenceVerdict::converging_like
                                                 : DivergenceVerdict::inconclusive;
    return DivergenceResult{v, slope};
}

AtomicMeasure patterson_approx(const OrbitSet& orbit, double s, const ExponentEstimate& est) {
    if (!orbit.complete) throw PreconditionError("patterson_approx needs a complete orbit ball");
    if (s <= est.delta_hat + est.stderr_)
        throw PreconditionError("exponent not above the estimated critical exponent; "
                                "the truncated sum would misrepresent a divergent series");
    return atoms_from_orbit(orbit, s, AtomicMeasure::Provenance::patterson);
}

double measure_mass_in_cap(const AtomicMeasure& mu, const Cap& cap) {
    double mass = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); i++)
        if (chordal_distance(mu.atoms[i], cap.center) <= cap.radius) mass += mu.weights[i];
    return mass;
}

DefectResult conformal_defect(const AtomicMeasure& mu, const Isometry& g,
                              const std::vector<Cap>& boxes, double mass_floor) {
    // Both sides are restricted to atoms whose partner under g is also a
    // genuine atom of the truncated measure: an atom at depth d maps to
    // depth d - log stretch(g, xi), so the ring at the rim has no
    // counterpart on the other side, and the atom mapping onto the
    // basepoint itself (depth ~ 0) pairs with the excluded identity; either
    // would leave a defect floor that no refinement removes.
    double R = mu.truncation_radius;
    bool have_depths = mu.depths.size() == mu.atoms.size();
    DefectResult out;
    Isometry g_inv = g.inverse();
    for (const Cap& box : boxes) {
        double mass = measure_mass_in_cap(mu, box);
        if (mass < mass_floor) {
            out.skipped_boxes++;
            continue;
        }
        Cap image = apply_cap(g, box);
        double lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < mu.atoms.size(); i++) {
            if (chordal_distance(mu.atoms[i], image.center) <= image.radius) {
                bool keep = true;
                if (have_depths) {
                    double back =
                        mu.depths[i] - std::log(boundary_stretch(g_inv, mu.atoms[i]));
                    keep = back > 1.0 && back <= R;
                }
                if (keep) lhs += mu.weights[i];
            }
            if (chordal_distance(mu.atoms[i], box.center) <= box.radius) {
                double sigma = boundary_stretch(g, mu.atoms[i]);
                bool keep = true;
                if (have_depths) {
                    double fwd = mu.depths[i] - std::log(sigma);
                    keep = fwd > 1.0 && fwd <= R;
                }
                if (keep) rhs += mu.weights[i] * std::pow(sigma, mu.s);
            }
        }
        double defect = std::abs(lhs - rhs) / std::max(std::max(lhs, rhs), 1e-300);
        out.max_defect = std::max(out.max_defect, defect);
    }
    return out;
}

EndingMeasureResult ending_measure_approx(const SchottkyPresentation& G, double s,
                                          const DivergenceResult& diagnostic,
                                          const std::vector<InteriorPoint>& basepoints, double R,
                                          int partition_level, std::size_t max_entries) {
    if (diagnostic.verdict != DivergenceVerdict::converging_like)
        throw PreconditionError("ending measure requires a converging-like series diagnostic");
    if (basepoints.empty()) throw PreconditionError("ending measure needs at least one basepoint");
    EndingMeasureResult out;
    std::map<std::int64_t, double> prev;
    for (std::size_t n = 0; n < basepoints.size(); n++) {
        OrbitSet orb = enumerate_orbit(G, basepoints[n], R, max_entries);
        AtomicMeasure mu = atoms_from_orbit(orb, s, AtomicMeasure::Provenance::ending);
        std::map<std::int64_t, double> cells = cell_masses(mu, partition_level);
        if (n > 0) {
            double tv = 0;
            for (const auto& [cell, m] : cells) {
                auto it = prev.find(cell);
                tv += std::abs(m - (it == prev.end() ? 0.0 : it->second));
            }
            for (const auto& [cell, m] : prev)
                if (!cells.count(cell)) tv += m;
            out.cauchy_tv.push_back(tv / 2.0);
        }
        prev = std::move(cells);
        if (n + 1 == basepoints.size()) out.measure = std::move(mu);
    }
    return out;
}

std::vector<InteriorPoint> sample_hull(const SchottkyPresentation& G, int num_segments, double R,
                                       double spacing, Rng& rng) {
    std::vector<InteriorPoint> out;
    auto random_endpoint = [&]() {
        Word w;
        int len = 2 + int(rng.next_below(5));
        while (w.length() < len) {
            int u = int(rng.next_below(std::uint64_t(G.num_letters())));
            if (!w.empty() && u == (w.letters.back() ^ 1)) continue;
            w.letters.push_back(std::int8_t(u));
        }
        return axis_data(word_to_isometry(G, w)).attracting;
    };
    for (int seg = 0; seg < num_segments; seg++) {
        BoundaryPoint a = random_endpoint(), b = random_endpoint();
        if (chordal_distance(a, b) < 1e-6) continue; // same limit point, no geodesic
        GeodesicLine line{a, b};
        // the geodesic leaves the R-ball at parameters within R of the origin's foot
        double foot = project_to_line(line, origin(G.model)).param;
        for (double t = foot - R; t <= foot + R; t += spacing) {
            // samples past the representable ball range sit far outside the
            // R-ball whenever the line passes near the origin; skip them
            try {
                InteriorPoint p = line_point(line, t);
                if (hyperbolic_distance(p, origin(G.model)) <= R) out.push_back(p);
            } catch (const PreconditionError&) {
                continue;
            }
        }
    }
    return out;
}

UniformNet build_uniform_net(const SchottkyPresentation& G,
                             const std::vector<InteriorPoint>& hull_sample, double m, double M,
                             double R, std::size_t max_entries) {
    if (m >= M) throw ConfigError("net separation must be strictly below the covering constant");
    if (m <= 0 || R <= 0) throw ConfigError("net parameters must be positive");
    std::vector<InteriorPoint> candidates;
    std::vector<InteriorPoint> seeds{origin(G.model)};
    if (!hull_sample.empty()) {
        seeds.push_back(hull_sample.front());
        seeds.push_back(hull_sample[hull_sample.size() / 2]);
    }
    for (const InteriorPoint& seed : seeds) {
        bool blocked = false;
        for (int l = 0; l < G.num_letters() && G.ball_certified; l++)
            if (behind_cap(seed, G.letter_source(l))) blocked = true;
        if (blocked) continue;
        OrbitSet orb = enumerate_orbit(G, seed, R, max_entries);
        for (std::size_t i = 0; i < orb.entries.size(); i++) {
            InteriorPoint p = orb.entry_ball_point(i);
            if (hyperbolic_distance(p, origin(G.model)) <= R) candidates.push_back(p);
        }
    }
    for (const InteriorPoint& p : hull_sample) candidates.push_back(p);
    std::sort(candidates.begin(), candidates.end(), [&](const InteriorPoint& a, const InteriorPoint& b) {
        double da = hyperbolic_distance(a, origin(G.model));
        double db = hyperbolic_distance(b, origin(G.model));
        if (da != db) return da < db;
        return vec_less(a.x, b.x);
    });
    UniformNet net;
    net.model = G.model;
    net.m = m;
    net.M = M;
    net.truncation_radius = R;
    for (const InteriorPoint& p : candidates) {
        bool ok = true;
        for (const InteriorPoint& q : net.points)
            if (hyperbolic_distance(p, q) < m) {
                ok = false;
                break;
            }
        if (ok) net.points.push_back(p);
    }
    for (const InteriorPoint& h : hull_sample) {
        double best = 1e300;
        for (const InteriorPoint& q : net.points) best = std::min(best, hyperbolic_distance(h, q));
        if (best > M)
            throw ConfigError("net fails to cover the hull sample near (" + std::to_string(h.x[0]) +
                              ", " + std::to_string(h.x[1]) + ", " + std::to_string(h.x[2]) +
                              "), nearest net point at distance " + std::to_string(best));
    }
    return net;
}

NetCheck check_uniform_net(const UniformNet& X, const std::vector<InteriorPoint>& hull_sample) {
    if (X.points.empty()) throw PreconditionError("empty net");
    NetCheck out;
    out.separation = 1e300;
    for (std::size_t i = 0; i < X.points.size(); i++)
        for (std::size_t j = i + 1; j < X.points.size(); j++)
            out.separation = std::min(out.separation, hyperbolic_distance(X.points[i], X.points[j]));
    if (X.points.size() == 1) out.separation = 0;
    for (const InteriorPoint& h : hull_sample) {
        double best = 1e300;
        for (const InteriorPoint& q : X.points) best = std::min(best, hyperbolic_distance(h, q));
        out.covering = std::max(out.covering, best);
    }
    return out;
}

SeriesProfile extended_poincare(const UniformNet& X, double s, const InteriorPoint& z,
                                double grid_step) {
    if (X.points.empty()) throw PreconditionError("extended series over an empty net");
    if (s < 0) throw PreconditionError("extended series: exponent must be nonnegative");
    z.check();
    std::vector<double> dists;
    for (const InteriorPoint& p : X.points) dists.push_back(hyperbolic_distance(p, z));
    double r_max = X.truncation_radius - hyperbolic_distance(origin(X.model), z);
    if (r_max <= grid_step) throw PreconditionError("evaluation point too far from the net's center");
    SeriesProfile prof;
    prof.s = s;
    prof.x = X.points.front();
    prof.z = z;
    prof.partials = partial_sums(std::move(dists), s, r_max, grid_step);
    return prof;
}

double bounded_type_ratio(const UniformNet& X, const std::vector<double>& radii) {
    if (X.points.empty()) throw PreconditionError("bounded-type ratio over an empty net");
    double safe = X.truncation_radius / 2.0;
    for (double r : radii)
        if (r > safe + 1e-12)
            throw PreconditionError("ratio radius exceeds half the truncation radius");
    // reference point: net point nearest the origin
    std::size_t zi = 0;
    double zd = 1e300;
    for (std::size_t i = 0; i < X.points.size(); i++) {
        double d = hyperbolic_distance(X.points[i], origin(X.model));
        if (d < zd) {
            zd = d;
            zi = i;
        }
    }
    const InteriorPoint& z = X.points[zi];
    double best = 1.0;
    for (std::size_t i = 0; i < X.points.size(); i++) {
        if (hyperbolic_distance(X.points[i], z) > safe) continue;
        for (double r : radii) {
            long long cx = 0, cz = 0;
            for (const InteriorPoint& q : X.points) {
                if (hyperbolic_distance(q, X.points[i]) <= r) cx++;
                if (hyperbolic_distance(q, z) <= r) cz++;
            }
            if (cz > 0) best = std::max(best, double(cx) / double(cz));
        }
    }
    return best;
}

} // namespace horolab
