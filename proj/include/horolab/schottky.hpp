#pragma once

#include <vector>

#include "horolab/geometry.hpp"

namespace horolab {

// Round cap on the boundary sphere: chordal metric ball.
struct Cap {
    BoundaryPoint center;
    double radius = 0; // chordal
};

bool caps_disjoint(const Cap& a, const Cap& b);

// Image of a round cap under a Moebius map (round again).
Cap apply_cap(const Isometry& g, const Cap& cap);

// Certified lower bound on d(z, x) over all interior x behind the geodesic
// dome spanning the cap rim (the region adjacent to the cap). Returns 0 when
// z itself is behind the dome or the cap exceeds a hemisphere.
double cap_prune_bound(const InteriorPoint& z, const Cap& cap);
bool behind_cap(const InteriorPoint& z, const Cap& cap);

// Planar circle in the half-space boundary coordinates.
struct PlanarCircle {
    cplx center;
    double radius = 0;
};
PlanarCircle cap_to_circle(const Cap& cap);

// Same dome-distance bound in half-space coordinates; stays accurate for
// points of arbitrarily small height.
double circle_prune_bound(const HalfSpacePoint& y, const PlanarCircle& c);

struct GeneratorPairing {
    Cap source; // generator maps the exterior of this cap ...
    Cap target; // ... onto the interior of this one
};

struct SchottkyPresentation {
    Model model = Model::ball3;
    std::vector<Isometry> generators;
    std::vector<GeneratorPairing> pairings; // empty in free-by-assertion mode
    bool ball_certified = false;
    double frontier_slack = 6.0; // only used without pairing balls

    int rank() const { return int(generators.size()); }
    int num_letters() const { return 2 * rank(); }
    // Letter encoding: letter l acts by generators[l >> 1], inverted when l & 1.
    Isometry letter_isometry(int letter) const;
    Cap letter_source(int letter) const;
    Cap letter_target(int letter) const;
};

// Derive generator matrices from ball pairings and verify the ping-pong
// configuration on a boundary net of net_samples points per cap.
SchottkyPresentation build_schottky(Model model, const std::vector<GeneratorPairing>& pairings,
                                    int net_samples = 1000);

// Accept explicit matrices and verify they realize the stated pairing.
SchottkyPresentation build_schottky(Model model, const std::vector<Isometry>& generators,
                                    const std::vector<GeneratorPairing>& pairings,
                                    int net_samples = 1000);

// Discrete free group asserted by the caller; no pairing balls, no certified
// pruning.
SchottkyPresentation free_by_assertion(Model model, const std::vector<Isometry>& generators,
                                       double frontier_slack = 6.0);

struct AxisData {
    BoundaryPoint attracting;
    BoundaryPoint repelling;
    double translation_length = 0;
};

// Fixed points and translation length of a loxodromic/hyperbolic element.
AxisData axis_data(const Isometry& g);

} // namespace horolab
