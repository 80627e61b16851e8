#pragma once

// Shared fixtures for the test binaries: small standard presentations and a
// pruning-free brute-force enumerator used as the oracle.

#include <algorithm>
#include <cmath>

#include "horolab/orbit.hpp"

namespace horolab::testsupport {

inline BoundaryPoint circle_pt(double theta) {
    return BoundaryPoint{{std::cos(theta), std::sin(theta), 0}, Model::disk};
}

inline Cap disk_cap(double theta, double radius) { return Cap{circle_pt(theta), radius}; }

inline SchottkyPresentation make_cyclic(double radius = 0.6) {
    const double pi = 3.14159265358979323846;
    std::vector<GeneratorPairing> p{{disk_cap(pi / 2, radius), disk_cap(3 * pi / 2, radius)}};
    return build_schottky(Model::disk, p);
}

// Rank-2 Fuchsian group, caps symmetric under rotation by pi/2.
inline SchottkyPresentation make_schottky2(double radius = 0.55) {
    const double pi = 3.14159265358979323846;
    std::vector<GeneratorPairing> p{
        {disk_cap(pi / 4, radius), disk_cap(5 * pi / 4, radius)},
        {disk_cap(3 * pi / 4, radius), disk_cap(7 * pi / 4, radius)},
    };
    return build_schottky(Model::disk, p);
}

inline Cap ball_cap(Vec3 dir, double radius) {
    BoundaryPoint c{dir, Model::ball3};
    c.renormalize();
    return Cap{c, radius};
}

// Thin Kleinian free product: generator 0 spans the first factor, generators
// 1 and 2 the second.
inline SchottkyPresentation make_expl1(double r0 = 0.12, double r1 = 0.06) {
    std::vector<GeneratorPairing> p{
        {ball_cap({-1, 0, 0}, r0), ball_cap({-1, -1, -1}, r0)},
        {ball_cap({0, 1, 0}, r1), ball_cap({0, -1, 0}, r1)},
        {ball_cap({0, 0, 1}, r1), ball_cap({0, 0, -1}, r1)},
    };
    return build_schottky(Model::ball3, p);
}

inline HomomorphismSpec expl1_projection() {
    return HomomorphismSpec{HomomorphismSpec::Kind::free_factor_projection, {0, 1, 1}};
}

inline SchottkyPresentation make_punctured_torus(double slack = 6.0) {
    Isometry A{cplx(1), cplx(1), cplx(1), cplx(2), Model::disk};
    Isometry B{cplx(1), cplx(-1), cplx(-1), cplx(2), Model::disk};
    return free_by_assertion(Model::disk, {A, B}, slack);
}

// Hyperbolic distance between the geodesic domes of two disjoint caps
// (inversive distance of the orthogonal spheres).
inline double dome_gap(const Cap& a, const Cap& b) {
    auto data = [](const Cap& c, Vec3& q, double& r) {
        double h = 1.0 - c.radius * c.radius / 2.0;
        q = scale(c.center.x, 1.0 / h);
        r = std::sqrt(std::max(0.0, 1.0 / (h * h) - 1.0));
    };
    Vec3 qa, qb;
    double ra, rb;
    data(a, qa, ra);
    data(b, qb, rb);
    double inv = (dot(sub(qa, qb), sub(qa, qb)) - ra * ra - rb * rb) / (2.0 * ra * rb);
    return inv > 1.0 ? std::acosh(inv) : 0.0;
}

// Minimal slab width between distinct pairing domes; each extra letter of a
// reduced word adds at least this much displacement.
inline double min_dome_gap(const SchottkyPresentation& G) {
    std::vector<Cap> caps;
    for (const auto& p : G.pairings) {
        caps.push_back(p.source);
        caps.push_back(p.target);
    }
    double best = 1e300;
    for (size_t i = 0; i < caps.size(); i++)
        for (size_t j = i + 1; j < caps.size(); j++)
            best = std::min(best, dome_gap(caps[i], caps[j]));
    return best;
}

inline void brute_rec(const SchottkyPresentation& G, const HalfSpacePoint& z_hs, double R,
                      int max_len, Word& w, const Isometry& g, std::vector<OrbitEntry>& out) {
    if (w.length() >= max_len) return;
    int last = w.empty() ? -1 : w.letters.back();
    for (int u = 0; u < G.num_letters(); u++) {
        if (last >= 0 && u == (last ^ 1)) continue;
        Isometry h = compose(g, G.letter_isometry(u));
        w.letters.push_back(std::int8_t(u));
        HalfSpacePoint gz = apply_hs(h, z_hs);
        double d = hyperbolic_distance_hs(gz, z_hs);
        if (d <= R) out.push_back(OrbitEntry{w, h, gz, d});
        brute_rec(G, z_hs, R, max_len, w, h, out);
        w.letters.pop_back();
    }
}

// Pruning-free enumeration over every reduced word up to max_len (derived
// from the dome-gap bound when not given).
inline OrbitSet brute_force_orbit(const SchottkyPresentation& G, const InteriorPoint& z, double R,
                                  int max_len = -1) {
    bool length_capped = max_len >= 0;
    if (max_len < 0) {
        double eta = min_dome_gap(G);
        max_len = 1 + int(std::ceil(R / eta));
    }
    OrbitSet out;
    out.basepoint = z;
    out.base_hs = ball_to_halfspace(z);
    out.radius = R;
    out.model = G.model;
    out.num_generators = G.rank();
    out.certified = !length_capped; // length-capped runs may miss entries
    out.entries.push_back(
        OrbitEntry{Word{}, Isometry::identity(G.model), out.base_hs, 0.0});
    Word w;
    brute_rec(G, out.base_hs, R, max_len, w, Isometry::identity(G.model), out.entries);
    std::sort(out.entries.begin(), out.entries.end(), [](const OrbitEntry& a, const OrbitEntry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return word_less(a.word, b.word);
    });
    out.complete = true;
    return out;
}

// Set comparison keyed by word (distance ties make positional order
// platform-noise-sensitive).
inline bool same_orbit(const OrbitSet& a, const OrbitSet& b, double tol = 1e-10) {
    if (a.entries.size() != b.entries.size()) return false;
    auto by_word = [](const OrbitSet& o) {
        std::vector<const OrbitEntry*> v;
        for (const auto& e : o.entries) v.push_back(&e);
        std::sort(v.begin(), v.end(),
                  [](const OrbitEntry* x, const OrbitEntry* y) { return word_less(x->word, y->word); });
        return v;
    };
    auto va = by_word(a), vb = by_word(b);
    for (size_t i = 0; i < va.size(); i++) {
        if (!word_equal(va[i]->word, vb[i]->word)) return false;
        if (std::abs(va[i]->dist - vb[i]->dist) > tol) return false;
    }
    return true;
}

inline Word random_reduced_word(Rng& rng, int num_letters, int length) {
    Word w;
    while (w.length() < length) {
        int u = int(rng.next_below(std::uint64_t(num_letters)));
        if (!w.empty() && u == (w.letters.back() ^ 1)) continue;
        w.letters.push_back(std::int8_t(u));
    }
    return w;
}

} // namespace horolab::testsupport
