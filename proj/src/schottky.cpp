#include "horolab/schottky.hpp"

#include <algorithm>
#include <cmath>

namespace horolab {

bool caps_disjoint(const Cap& a, const Cap& b) {
    return chordal_distance(a.center, b.center) > a.radius + b.radius;
}

// Two orthonormal tangent vectors at a unit vector p (v stays zero for the disk).
static void tangent_frame(const Vec3& p, Model m, Vec3& u, Vec3& v) {
    if (m == Model::disk) {
        u = {-p[1], p[0], 0};
        v = {0, 0, 0};
        return;
    }
    Vec3 seed = std::abs(p[0]) <= std::abs(p[1]) && std::abs(p[0]) <= std::abs(p[2])
                    ? Vec3{1, 0, 0}
                    : (std::abs(p[1]) <= std::abs(p[2]) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    u = sub(seed, scale(p, dot(seed, p)));
    u = scale(u, 1.0 / norm(u));
    v = cross(p, u);
}

static BoundaryPoint rim_point(const Cap& cap, double phase) {
    double cosT = 1.0 - cap.radius * cap.radius / 2.0;
    double sinT = std::sqrt(std::max(0.0, 1.0 - cosT * cosT));
    Vec3 u, v;
    tangent_frame(cap.center.x, cap.center.model, u, v);
    Vec3 dir = add(scale(u, std::cos(phase)), scale(v, std::sin(phase)));
    BoundaryPoint p{add(scale(cap.center.x, cosT), scale(dir, sinT)), cap.center.model};
    p.renormalize();
    return p;
}

Cap apply_cap(const Isometry& g, const Cap& cap) {
    Model m = cap.center.model;
    BoundaryPoint c_img = apply(g, cap.center);
    if (m == Model::disk) {
        BoundaryPoint a = apply(g, rim_point(cap, 0.0));
        BoundaryPoint b = apply(g, rim_point(cap, 3.14159265358979323846));
        Vec3 mid = add(a.x, b.x);
        Vec3 cand;
        if (norm(mid) > 1e-8) {
            cand = scale(mid, 1.0 / norm(mid));
        } else {
            cand = {-a.x[1], a.x[0], 0};
        }
        // the two candidates bound complementary arcs; keep the one whose
        // region contains the image of the cap center
        BoundaryPoint c1{cand, m}, c2{scale(cand, -1.0), m};
        if (chordal_distance(c1, c_img) <= chordal_distance(c1, a)) return Cap{c1, chordal_distance(c1, a)};
        return Cap{c2, chordal_distance(c2, a)};
    }
    BoundaryPoint p0 = apply(g, rim_point(cap, 0.0));
    BoundaryPoint p1 = apply(g, rim_point(cap, 2.0943951023931953));
    BoundaryPoint p2 = apply(g, rim_point(cap, 4.1887902047863905));
    Vec3 n = cross(sub(p0.x, p1.x), sub(p0.x, p2.x));
    double nn = norm(n);
    if (nn < 1e-14) throw PreconditionError("degenerate cap image");
    n = scale(n, 1.0 / nn);
    double h = dot(n, p0.x);
    if (dot(n, c_img.x) < h) {
        n = scale(n, -1.0);
        h = -h;
    }
    return Cap{BoundaryPoint{n, m}, std::sqrt(std::max(0.0, 2.0 - 2.0 * h))};
}

// Signed dome test quantity: positive iff z is outside the orthogonal sphere
// bounding the cap region.
static double dome_signed(const InteriorPoint& z, const Cap& cap, double& r_q, double& h_out) {
    double h = 1.0 - cap.radius * cap.radius / 2.0;
    h_out = h;
    if (h <= 1e-9) {
        r_q = 0;
        return -1.0;
    }
    Vec3 q = scale(cap.center.x, 1.0 / h);
    r_q = std::sqrt(std::max(0.0, 1.0 / (h * h) - 1.0));
    Vec3 dz = sub(z.x, q);
    return dot(dz, dz) - r_q * r_q;
}

bool behind_cap(const InteriorPoint& z, const Cap& cap) {
    double r_q, h;
    return dome_signed(z, cap, r_q, h) < 0;
}

double cap_prune_bound(const InteriorPoint& z, const Cap& cap) {
    double r_q, h;
    double s = dome_signed(z, cap, r_q, h);
    if (s <= 0 || h <= 1e-9) return 0.0;
    if (r_q < 1e-300) return 1e300;
    return std::asinh(s / (r_q * (1.0 - z.norm2())));
}

double circle_prune_bound(const HalfSpacePoint& y, const PlanarCircle& c) {
    double s = (std::norm(y.zeta - c.center) + y.height * y.height - c.radius * c.radius) /
               (2.0 * c.radius * y.height);
    return s > 0 ? std::asinh(s) : 0.0;
}

PlanarCircle cap_to_circle(const Cap& cap) {
    double pole_clearance = chordal_distance(cap.center, BoundaryPoint{{1, 0, 0}, cap.center.model});
    if (pole_clearance < cap.radius + 0.05)
        throw ConfigError("pairing cap too close to the Cayley pole; rotate the configuration");
    double cosT = 1.0 - cap.radius * cap.radius / 2.0;
    double sinT = std::sqrt(std::max(0.0, 1.0 - cosT * cosT));
    // extreme rim points along the great circle through the pole
    Vec3 e{1, 0, 0};
    Vec3 u = sub(e, scale(cap.center.x, cap.center.x[0]));
    double un = norm(u);
    if (un < 1e-12) {
        // cap centered at the pole's antipode: any tangent direction works
        Vec3 v;
        tangent_frame(cap.center.x, cap.center.model, u, v);
    } else {
        u = scale(u, 1.0 / un);
    }
    auto stereo = [&](const Vec3& x) {
        BoundaryPoint b{x, cap.center.model};
        b.renormalize();
        ProjPoint p = boundary_to_proj(b);
        return p.z1 / p.z2;
    };
    cplx za = stereo(add(scale(cap.center.x, cosT), scale(u, sinT)));
    cplx zb = stereo(sub(scale(cap.center.x, cosT), scale(u, sinT)));
    return PlanarCircle{(za + zb) / 2.0, std::abs(za - zb) / 2.0};
}

Isometry SchottkyPresentation::letter_isometry(int letter) const {
    const Isometry& g = generators.at(letter >> 1);
    return (letter & 1) ? g.inverse() : g;
}

Cap SchottkyPresentation::letter_source(int letter) const {
    const GeneratorPairing& p = pairings.at(letter >> 1);
    return (letter & 1) ? p.target : p.source;
}

Cap SchottkyPresentation::letter_target(int letter) const {
    const GeneratorPairing& p = pairings.at(letter >> 1);
    return (letter & 1) ? p.source : p.target;
}

static void verify_presentation(SchottkyPresentation& pres, int net_samples) {
    const auto& pairings = pres.pairings;
    std::vector<Cap> caps;
    for (const auto& p : pairings) {
        caps.push_back(p.source);
        caps.push_back(p.target);
    }
    for (size_t i = 0; i < caps.size(); i++)
        for (size_t j = i + 1; j < caps.size(); j++)
            if (!caps_disjoint(caps[i], caps[j]))
                throw ConfigError("pairing balls " + std::to_string(i) + " and " + std::to_string(j) +
                                  " are not disjoint");

    // Generators must map each rim exactly and satisfy ping-pong on a net.
    for (int letter = 0; letter < pres.num_letters(); letter++) {
        Isometry g = pres.letter_isometry(letter);
        Cap src = pres.letter_source(letter);
        Cap tgt = pres.letter_target(letter);
        // g carries the source exterior onto the target interior, so the
        // image of the source cap region is the complement of the target cap.
        Cap img = apply_cap(g, src);
        BoundaryPoint anti{scale(tgt.center.x, -1.0), tgt.center.model};
        double anti_radius = std::sqrt(std::max(0.0, 4.0 - tgt.radius * tgt.radius));
        if (chordal_distance(img.center, anti) > 1e-7 || std::abs(img.radius - anti_radius) > 1e-7)
            throw ConfigError("generator does not map its source rim onto its target rim");
        for (int l2 = 0; l2 < pres.num_letters(); l2++) {
            if (l2 == letter) continue; // that cap is the one mapped to the far side
            Cap other = pres.letter_source(l2);
            int samples = std::max(8, net_samples / pres.num_letters());
            for (int k = 0; k < samples; k++) {
                double phase = 6.283185307179586 * k / samples;
                BoundaryPoint q = apply(g, rim_point(other, phase));
                if (chordal_distance(q, tgt.center) > tgt.radius + 1e-9)
                    throw ConfigError("ping-pong failure: cap image escapes the target ball");
            }
        }
    }
    pres.ball_certified = true;
}

SchottkyPresentation build_schottky(Model model, const std::vector<GeneratorPairing>& pairings,
                                    int net_samples) {
    SchottkyPresentation pres;
    pres.model = model;
    pres.pairings = pairings;
    for (const auto& p : pairings) {
        PlanarCircle c1 = cap_to_circle(p.source);
        PlanarCircle c2 = cap_to_circle(p.target);
        // maps the exterior of circle 1 onto the interior of circle 2
        Isometry g{c2.center, -(c1.center * c2.center + c1.radius * c2.radius), cplx(1), -c1.center, model};
        g.normalize();
        pres.generators.push_back(g);
    }
    verify_presentation(pres, net_samples);
    return pres;
}

SchottkyPresentation build_schottky(Model model, const std::vector<Isometry>& generators,
                                    const std::vector<GeneratorPairing>& pairings, int net_samples) {
    if (generators.size() != pairings.size())
        throw ConfigError("one pairing per generator required");
    SchottkyPresentation pres;
    pres.model = model;
    pres.generators = generators;
    pres.pairings = pairings;
    verify_presentation(pres, net_samples);
    return pres;
}

SchottkyPresentation free_by_assertion(Model model, const std::vector<Isometry>& generators,
                                       double frontier_slack) {
    SchottkyPresentation pres;
    pres.model = model;
    pres.generators = generators;
    pres.ball_certified = false;
    pres.frontier_slack = frontier_slack;
    return pres;
}

AxisData axis_data(const Isometry& g) {
    g.check();
    cplx tr = g.trace();
    cplx sq = std::sqrt(tr * tr - 4.0);
    cplx l1 = (tr + sq) / 2.0, l2 = (tr - sq) / 2.0;
    cplx lam = std::abs(l1) >= std::abs(l2) ? l1 : l2;
    if (std::abs(lam) <= 1.0 + 1e-9)
        throw PreconditionError("axis_data requires a loxodromic element");
    cplx lam_r = 1.0 / lam;
    auto eigvec = [&](cplx l) {
        cplx v1 = g.b, v2 = l - g.a;
        if (std::abs(v1) + std::abs(v2) < std::abs(l - g.d) + std::abs(g.c)) {
            v1 = l - g.d;
            v2 = g.c;
        }
        return proj_to_boundary(ProjPoint{v1, v2}, g.model);
    };
    return AxisData{eigvec(lam), eigvec(lam_r), 2.0 * std::log(std::abs(lam))};
}

} // namespace horolab
