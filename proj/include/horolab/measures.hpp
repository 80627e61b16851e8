#pragma once

#include "horolab/orbit.hpp"

namespace horolab {

// Truncated Poincare series: partial sums at a grid of radii.
struct SeriesProfile {
    double s = 0;
    InteriorPoint x; // orbit basepoint
    InteriorPoint z; // evaluation point
    std::vector<std::pair<double, double>> partials; // (R, P^s_R), R increasing
};

SeriesProfile poincare_partial(const OrbitSet& orbit, double s, const InteriorPoint& z,
                               double grid_step = 0.5);

struct ExponentEstimate {
    double delta_hat = 0;
    double stderr_ = 0;
    double window_lo = 0, window_hi = 0;
    int num_radii = 0;
};

// Least-squares slope of log orbit counts against R over [window_lo, window_hi].
ExponentEstimate critical_exponent_estimate(const OrbitSet& orbit, double window_lo,
                                            double window_hi, double grid_step = 0.5);

enum class DivergenceVerdict { diverging_like, converging_like, inconclusive };

struct DivergenceResult {
    DivergenceVerdict verdict = DivergenceVerdict::inconclusive;
    double tail_slope = 0; // growth of the partial sums per unit radius, last third
};

// Heuristic tail classification of a profile; the verdict always carries its
// slope statistic and is never a proof.
DivergenceResult divergence_diagnostic(const SeriesProfile& profile, double grow_rate = 0.01,
                                       double plateau_rate = 0.001);

struct AtomicMeasure {
    enum class Provenance { patterson, ending, uniform_net };
    Model model = Model::ball3;
    double s = 0;
    double truncation_radius = 0;
    Provenance provenance = Provenance::patterson;
    std::vector<BoundaryPoint> atoms;
    std::vector<double> weights; // positive, parallel to atoms
    std::vector<double> depths;  // d(basepoint, orbit point), parallel to atoms
    double total_mass = 0;
};

// Weighted Dirac approximation: atoms at radial projections of orbit points,
// weights e^{-s d(gz, o)}, normalized to mass 1. Requires s above the
// estimated exponent by at least the fit stderr.
AtomicMeasure patterson_approx(const OrbitSet& orbit, double s, const ExponentEstimate& est);

double measure_mass_in_cap(const AtomicMeasure& mu, const Cap& cap);

struct DefectResult {
    double max_defect = 0;  // max over boxes of relative conformality error
    int skipped_boxes = 0;  // boxes below the mass floor
};

DefectResult conformal_defect(const AtomicMeasure& mu, const Isometry& g,
                              const std::vector<Cap>& boxes, double mass_floor = 1e-3);

struct EndingMeasureResult {
    AtomicMeasure measure;           // for the last basepoint
    std::vector<double> cauchy_tv;   // TV distance between consecutive measures
};

// Atomic measures along a basepoint sequence moving toward the boundary,
// with a Cauchy statistic on a fixed cell partition of the sphere.
EndingMeasureResult ending_measure_approx(const SchottkyPresentation& G, double s,
                                          const DivergenceResult& diagnostic,
                                          const std::vector<InteriorPoint>& basepoints, double R,
                                          int partition_level = 3,
                                          std::size_t max_entries = 10'000'000);

struct UniformNet {
    Model model = Model::ball3;
    std::vector<InteriorPoint> points;
    double m = 0; // separation lower bound requested
    double M = 0; // covering upper bound requested
    double truncation_radius = 0;
};

// Sample of the convex hull: points along geodesics joining attracting fixed
// points of random words, truncated to the R-ball around the origin.
std::vector<InteriorPoint> sample_hull(const SchottkyPresentation& G, int num_segments, double R,
                                       double spacing, Rng& rng);

// Greedy m-separated net from orbit points of several seeds plus the hull
// sample; throws ConfigError with a witness if some hull point is not
// M-covered.
UniformNet build_uniform_net(const SchottkyPresentation& G,
                             const std::vector<InteriorPoint>& hull_sample, double m, double M,
                             double R, std::size_t max_entries = 10'000'000);

struct NetCheck {
    double covering = 0;   // max over hull sample of distance to the net
    double separation = 0; // min pairwise net distance
};

NetCheck check_uniform_net(const UniformNet& X, const std::vector<InteriorPoint>& hull_sample);

SeriesProfile extended_poincare(const UniformNet& X, double s, const InteriorPoint& z,
                                double grid_step = 0.5);

// Max over sampled centers x (within half the truncation radius) and radii R
// of #(X cap B_R(x)) / #(X cap B_R(z)), z the net point nearest the origin.
double bounded_type_ratio(const UniformNet& X, const std::vector<double>& radii);

} // namespace horolab
