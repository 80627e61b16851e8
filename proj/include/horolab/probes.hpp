#pragma once

// Experiment drivers. Each probe consumes an ExperimentConfig and returns a
// self-contained ProbeReport: every aggregate is recomputable from the
// per-point records, the normalized config is echoed, and the text form is
// byte-stable for a fixed config and seed.

#include "horolab/classify.hpp"
#include "horolab/config_io.hpp"
#include "horolab/measures.hpp"

namespace horolab {

struct ProbeReport {
    std::string experiment;
    json params;                       // normalized config echo
    std::vector<json> points;          // one record per probed point / cell / index
    json aggregate;
    std::vector<std::string> warnings;
    bool resource_capped = false;

    std::string text() const; // deterministic serialization
};

// Minimal distance between two disjoint geodesics (0 when they cross).
double line_line_distance(const GeodesicLine& a, const GeodesicLine& b);

// Deepest horoball excursion at ξ witnessed inside the time budget by the
// conjugate family w n^{±k} w^{-1}, w running over the orbit words: the
// maximum of T - d(ray(T), h z) over the family, clamped at 0. Monotone
// nondecreasing in T and bounded by the true Busemann depth.
struct ConjugateDepth {
    double depth = 0;
    Word witness;
    int k = 0;
};
ConjugateDepth n_conjugate_depth(const SchottkyPresentation& G, const OrbitSet& words,
                                 int n_generator, const BoundaryPoint& xi, double T, int k_max);

ProbeReport probe_myr_in_horo(const ExperimentConfig& cfg);
ProbeReport probe_measure_difference(const ExperimentConfig& cfg);
ProbeReport reproduce_expnew(const ExperimentConfig& cfg);
ProbeReport dimension_sweep(const ExperimentConfig& cfg);

} // namespace horolab
