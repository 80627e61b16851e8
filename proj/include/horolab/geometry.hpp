#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "horolab/common.hpp"

namespace horolab {

using cplx = std::complex<double>;

// Which hyperbolic space a value lives in: the disk (boundary S^1) or the
// 3-ball (boundary S^2).
enum class Model { disk, ball3 };

inline int boundary_dim(Model m) { return m == Model::disk ? 1 : 2; }

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Point of the open unit ball (third coordinate 0 in the disk model).
struct InteriorPoint {
    Vec3 x{0, 0, 0};
    Model model = Model::ball3;

    double norm2() const { return dot(x, x); }
    void check() const {
        if (1.0 - std::sqrt(norm2()) < kBoundaryFloor)
            throw PreconditionError("interior point too close to the boundary sphere");
    }
};

inline InteriorPoint origin(Model m) { return InteriorPoint{{0, 0, 0}, m}; }

// Unit vector of S^1 or S^2, renormalized after every map application.
struct BoundaryPoint {
    Vec3 x{1, 0, 0};
    Model model = Model::ball3;

    void renormalize() {
        double n = norm(x);
        if (n < 0.5) throw PreconditionError("degenerate boundary point");
        x = scale(x, 1.0 / n);
    }
};

inline double chordal_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
    return norm(sub(a.x, b.x));
}

// Unit-determinant 2x2 complex matrix acting on the half-space/half-plane,
// conjugated to the ball by a fixed Cayley transform. Real entries mean the
// map preserves the disk.
struct Isometry {
    cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};
    Model model = Model::ball3;

    // Compensated evaluation of ad - bc: entry products of long words are
    // huge while the determinant stays near 1, so the naive difference
    // cancels catastrophically.
    cplx det() const;
    cplx trace() const { return a + d; }

    void normalize() {
        cplx dt = det();
        double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c);
        // entry rounding hides the determinant below this level; rescaling
        // by the noise would corrupt the (projectively fine) matrix
        if (std::abs(dt) < 1e-12 * scale) return;
        if (std::abs(dt) < 1e-100) throw PreconditionError("singular matrix");
        if (model == Model::disk &&
            (std::abs(dt.imag()) > 1e-9 * std::abs(dt) || dt.real() <= 0)) {
            if (scale < 1e3) throw PreconditionError("disk isometry must have positive real determinant");
            return; // sign information lost to rounding; leave as-is
        }
        cplx s = std::sqrt(dt);
        a /= s; b /= s; c /= s; d /= s;
    }

    // Entrywise rounding alone moves the determinant of a huge-entry matrix
    // by ~eps * (|ad| + |bc|), so the drift tripwire scales with that.
    void check() const {
        double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c);
        if (std::abs(det() - cplx(1, 0)) > 1e-9 + 1e-12 * scale)
            throw PreconditionError("isometry determinant drifted from 1");
    }

    Isometry inverse() const { return Isometry{d, -b, -c, a, model}; }

    static Isometry identity(Model m) { return Isometry{cplx(1), cplx(0), cplx(0), cplx(1), m}; }
};

inline Isometry compose(const Isometry& g, const Isometry& h) {
    Isometry r{g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
               g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d, g.model};
    r.normalize();
    return r;
}

// Half-space coordinates: horizontal complex part and height > 0.
struct HalfSpacePoint {
    cplx zeta{0, 0};
    double height = 1.0;
};

HalfSpacePoint ball_to_halfspace(const InteriorPoint& p);
InteriorPoint halfspace_to_ball(const HalfSpacePoint& p, Model m);

// Projective boundary coordinates (zeta1 : zeta2) for the Riemann sphere.
struct ProjPoint {
    cplx z1{1, 0}, z2{0, 0};
};

ProjPoint boundary_to_proj(const BoundaryPoint& xi);
BoundaryPoint proj_to_boundary(const ProjPoint& p, Model m);

InteriorPoint apply(const Isometry& g, const InteriorPoint& p);
BoundaryPoint apply(const Isometry& g, const BoundaryPoint& xi);
HalfSpacePoint apply_hs(const Isometry& g, const HalfSpacePoint& p);

// Half-space distance; keeps full relative precision for points of tiny
// height, where ball coordinates collapse onto the sphere.
double hyperbolic_distance_hs(const HalfSpacePoint& x, const HalfSpacePoint& y);

// 1 - |x| for the ball image of a half-space point, computed without
// cancellation.
double one_minus_ball_norm(const HalfSpacePoint& p);

double hyperbolic_distance(const InteriorPoint& x, const InteriorPoint& y);

// Derivative of the boundary action of g at xi in the chordal metric.
double boundary_stretch(const Isometry& g, const BoundaryPoint& xi);

// Isometry moving z to the origin of the ball (identity rotation part).
Isometry translate_to_origin(const InteriorPoint& z);

struct GeodesicRay {
    InteriorPoint base;
    BoundaryPoint target;
};

InteriorPoint ray_point(const GeodesicRay& r, double t);

// Frame isometry sending the ray base to the half-space point j (height 1)
// and the target to infinity; the ray becomes t -> (0, e^t). Distances and
// Busemann values against far ray points stay accurate in this frame.
struct RayFrame {
    Isometry M;
    Model model;
};
RayFrame ray_frame(const GeodesicRay& r);
double ray_distance(const RayFrame& f, double t, const HalfSpacePoint& y_frame_local);
inline HalfSpacePoint to_frame(const RayFrame& f, const HalfSpacePoint& y) { return apply_hs(f.M, y); }
inline HalfSpacePoint to_frame(const RayFrame& f, const InteriorPoint& y) {
    return apply_hs(f.M, ball_to_halfspace(y));
}
// Busemann value of a frame-local point for the ray's target, normalized to 0 at the base.
inline double frame_busemann(const HalfSpacePoint& y_frame_local) { return -std::log(y_frame_local.height); }

// Closed-form Busemann function normalized to 0 at the ray base.
double busemann(const GeodesicRay& r, const InteriorPoint& x);

// Truncated-limit evaluation d(x, ray(T)) - T, kept as a test oracle.
double busemann_truncated(const GeodesicRay& r, const InteriorPoint& x, double T);

bool shadow_contains(const InteriorPoint& z, double c, double kappa, const BoundaryPoint& xi);

// Geodesic line given by its ideal endpoints.
struct GeodesicLine {
    BoundaryPoint end_neg;
    BoundaryPoint end_pos;
};

// Distance from x to the line and the signed arclength of the foot point
// (increasing toward end_pos, zero at the point nearest the origin's foot).
struct LineProjection {
    double distance = 0;
    double param = 0;
    double side = 0; // sign of the horizontal offset, disk model only
};
LineProjection project_to_line(const GeodesicLine& line, const InteriorPoint& x);

InteriorPoint line_point(const GeodesicLine& line, double param);

BoundaryPoint radial_projection(const InteriorPoint& z);

inline InteriorPoint point_on_ray_from_origin(const BoundaryPoint& xi, double t) {
    return InteriorPoint{scale(xi.x, std::tanh(t / 2)), xi.model};
}

} // namespace horolab
