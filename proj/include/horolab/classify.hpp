#pragma once

#include <string>

#include "horolab/orbit.hpp"

namespace horolab {

struct ProfileSample {
    double t = 0;
    double phi = 0;  // min over the searched orbit of d(ray(t), g z)
    Word witness;    // g attaining phi
    bool exact = false;
};

struct EscapeProfile {
    GeodesicRay ray;
    InteriorPoint orbit_basepoint;
    double step = 0.5;
    double T = 0;
    double truncation_radius = 0; // 0 when the certified ray search was used
    bool certified = false;
    std::string warning;
    std::vector<ProfileSample> samples;
};

struct NearestPoint {
    double dist = 0;
    Word witness;
    // words with value <= collect_below, when requested
    std::vector<std::pair<Word, double>> candidates;
    std::size_t nodes_visited = 0;
};

// Certified branch-and-bound search for the orbit point nearest to a point
// of the ray toward xi. Works in the ray frame (the ray is t -> (0, e^t)
// exactly), applying frame-conjugated letters pointwise, so results stay
// accurate at any depth t; pruning bounds come from the pairing domes and
// are exact, so the returned minimum is the minimum over the whole group.
class RayOrbitSearch {
  public:
    RayOrbitSearch(const SchottkyPresentation& G, const InteriorPoint& z, const BoundaryPoint& xi);

    NearestPoint nearest(double t, double collect_below = -1.0,
                         std::size_t max_nodes = 20'000'000) const;

    const RayFrame& frame() const { return frame_; }
    // w^{-1} x applied letterwise in frame coordinates (stable at any depth).
    HalfSpacePoint pull_back(const Word& w, const HalfSpacePoint& x_frame) const;

  private:
    struct FrameCircle {
        PlanarCircle circle;
        bool bounded; // image of the cap region is the inside of the circle
    };
    RayFrame frame_;
    std::vector<Isometry> conj_letter_; // F letter F^{-1}
    std::vector<FrameCircle> target_;   // frame image of each letter's target cap
    int num_letters_ = 0;

    double region_bound(const HalfSpacePoint& y, int letter) const;
};

// phi samples at t = 0, step, ..., T. Ball-certified presentations use the
// ray search (every sample exact); asserted-free ones fall back to a frontier
// orbit of radius up to 2T + 1, shrunk on resource exhaustion (warning set,
// exactness flags false).
EscapeProfile escape_profile(const SchottkyPresentation& G, const InteriorPoint& z,
                             const BoundaryPoint& xi, double T, double step = 0.5,
                             std::size_t max_entries = 10'000'000);

// Same samples evaluated against a fixed orbit set (e.g. a suborbit); a
// sample is exact iff the orbit is complete, certified, and its radius covers
// every possible minimizer (2t + 2 d(z, basepoint) + 1).
EscapeProfile escape_profile_orbit(const OrbitSet& orbit, const InteriorPoint& z,
                                   const BoundaryPoint& xi, double T, double step = 0.5);

struct RadialResult {
    bool passed = false;
    int count = 0;      // samples with phi <= c
    double spread = 0;  // t-range covered by the hits
    bool degenerate = false; // c >= T makes the test vacuous
    double c = 0;
};
RadialResult test_radial(const EscapeProfile& profile, double c, int k_min = 5);

struct HoroResult {
    bool passed = false;
    double achieved_depth = 0; // max over samples of t - phi(t), or -min busemann
    double M = 0;
};
HoroResult test_horospheric(const EscapeProfile& profile, double M);
HoroResult test_horospheric_orbit(const OrbitSet& orbit, const BoundaryPoint& xi, double M);

struct BigHoroResult {
    bool passed = false;
    int count = 0; // orbit points with busemann <= M
    double level = 0;
    int k_required = 0;
};
BigHoroResult test_big_horospheric(const OrbitSet& orbit, const BoundaryPoint& xi, double M,
                                   int K);

struct LambdaResult {
    bool passed = false;
    double ratio = 0; // min (Lambda_kappa) or max (Lambda_*) of phi/t, last half
    double kappa = 0;
    double tolerance = 0;
};
LambdaResult test_lambda(const EscapeProfile& profile, double kappa, double tolerance = 0.1);
LambdaResult test_lambda_star(const EscapeProfile& profile, double tolerance = 0.1);

struct ShadowResult {
    bool passed = false;
    int count = 0;
    double c = 0, kappa = 0;
};
ShadowResult test_shadow_limit(const OrbitSet& orbit, const BoundaryPoint& xi, double c,
                               double kappa, int k_min = 5);

// Geodesic segment directed toward line.end_pos, truncated to
// param in [center - half_length, center + half_length].
struct DirectedSegment {
    GeodesicLine line;
    double center = 0;
    double half_length = 2.5;
};

// Axes of all elements of word length <= 2 (deduplicated), truncated around
// their closest approach to the origin, both orientations present.
std::vector<DirectedSegment> default_myrberg_net(const SchottkyPresentation& G,
                                                 double half_length = 2.5);

struct MyrbergResult {
    double score = 0; // fraction of net segments visited in their direction
    bool passed = false;
    std::vector<char> visited; // per segment
    double eps = 0, T = 0;
};
MyrbergResult myrberg_score(const SchottkyPresentation& G, const InteriorPoint& z,
                            const BoundaryPoint& xi, const std::vector<DirectedSegment>& net,
                            double eps, double T);

struct DimensionResult {
    double dim = 0;
    double stderr_ = 0;
    int levels_used = 0;
};
// Box-counting slope over the hierarchical boundary cell grid.
DimensionResult box_dimension_estimate(const std::vector<BoundaryPoint>& points, double scale_lo,
                                       double scale_hi);

struct ClassifyParams {
    double T = 20.0;
    double step = 0.5;
    double c = 2.0;        // radial threshold
    double kappa = 0.5;    // shadow / Lambda parameter
    double M = 6.0;        // horospheric depth
    int K = 5;             // big-horospheric count
    int k_min = 5;
    double lambda_tol = 0.1;
};

struct Verdict {
    BoundaryPoint xi;
    RadialResult radial;
    ShadowResult shadow;
    HoroResult horospheric;          // profile route
    HoroResult horospheric_busemann; // orbit route
    BigHoroResult big_horospheric;
    LambdaResult lambda;
    LambdaResult lambda_star;
    double T = 0;
    double orbit_radius = 0;
};

Verdict classify_point(const SchottkyPresentation& G, const OrbitSet& orbit,
                       const InteriorPoint& z, const BoundaryPoint& xi,
                       const ClassifyParams& params);

// Parallel over boundary points (verdicts independent, written by index, so
// the result does not depend on the thread count).
std::vector<Verdict> classify_points(const SchottkyPresentation& G, const OrbitSet& orbit,
                                     const InteriorPoint& z, const std::vector<BoundaryPoint>& xis,
                                     const ClassifyParams& params);
// Serial reference for the parallel kernel.
std::vector<Verdict> classify_points_serial(const SchottkyPresentation& G, const OrbitSet& orbit,
                                            const InteriorPoint& z,
                                            const std::vector<BoundaryPoint>& xis,
                                            const ClassifyParams& params);

// Attracting fixed points of random reduced words: the computable stand-in
// for generic limit points.
std::vector<BoundaryPoint> sample_limit_points(const SchottkyPresentation& G, int count,
                                               int word_length, Rng& rng);

} // namespace horolab
