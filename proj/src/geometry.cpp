#include "horolab/geometry.hpp"

namespace horolab {

namespace {
// Neumaier accumulator fed with exact fma product splits.
struct Acc {
    double hi = 0, lo = 0;
    void add(double x) {
        double t = hi + x;
        lo += std::abs(hi) >= std::abs(x) ? (hi - t) + x : (x - t) + hi;
        hi = t;
    }
    void prod(double x, double y) {
        double p = x * y;
        add(p);
        add(std::fma(x, y, -p));
    }
    double value() const { return hi + lo; }
};
} // namespace

cplx Isometry::det() const {
    Acc re, im;
    re.prod(a.real(), d.real());
    re.prod(-a.imag(), d.imag());
    re.prod(-b.real(), c.real());
    re.prod(b.imag(), c.imag());
    im.prod(a.real(), d.imag());
    im.prod(a.imag(), d.real());
    im.prod(-b.real(), c.imag());
    im.prod(-b.imag(), c.real());
    return cplx(re.value(), im.value());
}

HalfSpacePoint ball_to_halfspace(const InteriorPoint& p) {
    p.check();
    double r2 = p.norm2();
    double A = 1.0 - 2.0 * p.x[0] + r2; // |x - e1|^2
    if (A < kBoundaryFloor) throw PreconditionError("ball point degenerate at the Cayley pole");
    return HalfSpacePoint{cplx(-2.0 * p.x[1] / A, -2.0 * p.x[2] / A), (1.0 - r2) / A};
}

InteriorPoint halfspace_to_ball(const HalfSpacePoint& p, Model m) {
    double u = p.zeta.real(), v = p.zeta.imag(), t = p.height;
    double D = u * u + v * v + (t + 1.0) * (t + 1.0);
    InteriorPoint out{{(u * u + v * v + t * t - 1.0) / D, -2.0 * u / D, -2.0 * v / D}, m};
    if (m == Model::disk) out.x[2] = 0.0;
    return out;
}

ProjPoint boundary_to_proj(const BoundaryPoint& xi) {
    const Vec3& x = xi.x;
    if (x[0] <= 0.0)
        return ProjPoint{cplx(-x[1], -x[2]), cplx(1.0 - x[0], 0.0)};
    return ProjPoint{cplx(1.0 + x[0], 0.0), cplx(-x[1], x[2])};
}

BoundaryPoint proj_to_boundary(const ProjPoint& p, Model m) {
    double S = std::norm(p.z1) + std::norm(p.z2);
    if (S < 1e-200) throw PreconditionError("degenerate projective boundary point");
    cplx w = -2.0 * p.z1 * std::conj(p.z2) / S;
    BoundaryPoint out{{(std::norm(p.z1) - std::norm(p.z2)) / S, w.real(), w.imag()}, m};
    if (m == Model::disk) out.x[2] = 0.0;
    out.renormalize();
    return out;
}

HalfSpacePoint apply_hs(const Isometry& g, const HalfSpacePoint& h) {
    cplx cz_d = g.c * h.zeta + g.d;
    double den = std::norm(cz_d) + std::norm(g.c) * h.height * h.height;
    cplx z2 = ((g.a * h.zeta + g.b) * std::conj(cz_d) + g.a * std::conj(g.c) * h.height * h.height) / den;
    // the horizontal part is scale-invariant; the height needs |det|
    return HalfSpacePoint{z2, h.height * std::abs(g.det()) / den};
}

InteriorPoint apply(const Isometry& g, const InteriorPoint& p) {
    g.check();
    return halfspace_to_ball(apply_hs(g, ball_to_halfspace(p)), g.model);
}

double hyperbolic_distance_hs(const HalfSpacePoint& x, const HalfSpacePoint& y) {
    double arg = 1.0 + (std::norm(x.zeta - y.zeta) + (x.height - y.height) * (x.height - y.height)) /
                           (2.0 * x.height * y.height);
    return std::acosh(std::max(arg, 1.0));
}

double one_minus_ball_norm(const HalfSpacePoint& p) {
    double D = std::norm(p.zeta) + (p.height + 1.0) * (p.height + 1.0);
    double om2 = 4.0 * p.height / D; // 1 - |x|^2
    return om2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - om2)));
}

BoundaryPoint apply(const Isometry& g, const BoundaryPoint& xi) {
    g.check();
    ProjPoint p = boundary_to_proj(xi);
    return proj_to_boundary(ProjPoint{g.a * p.z1 + g.b * p.z2, g.c * p.z1 + g.d * p.z2}, g.model);
}

double hyperbolic_distance(const InteriorPoint& x, const InteriorPoint& y) {
    x.check();
    y.check();
    double n2 = dot(sub(x.x, y.x), sub(x.x, y.x));
    double arg = 1.0 + 2.0 * n2 / ((1.0 - x.norm2()) * (1.0 - y.norm2()));
    return std::acosh(std::max(arg, 1.0));
}

double boundary_stretch(const Isometry& g, const BoundaryPoint& xi) {
    g.check();
    ProjPoint p = boundary_to_proj(xi);
    double S = std::norm(p.z1) + std::norm(p.z2);
    double den = std::norm(g.a * p.z1 + g.b * p.z2) + std::norm(g.c * p.z1 + g.d * p.z2);
    return std::abs(g.det()) * S / den;
}

Isometry translate_to_origin(const InteriorPoint& z) {
    HalfSpacePoint h = ball_to_halfspace(z);
    double rt = std::sqrt(h.height);
    Isometry g{cplx(1.0 / rt), -h.zeta / rt, cplx(0), cplx(rt), z.model};
    return g;
}

InteriorPoint ray_point(const GeodesicRay& r, double t) {
    if (t < 0) throw PreconditionError("negative ray parameter");
    Isometry g = translate_to_origin(r.base);
    BoundaryPoint eta = apply(g, r.target);
    return apply(g.inverse(), point_on_ray_from_origin(eta, t));
}

double busemann(const GeodesicRay& r, const InteriorPoint& x) {
    x.check();
    const Vec3& xi = r.target.x;
    double num = dot(sub(x.x, xi), sub(x.x, xi)) * (1.0 - r.base.norm2());
    double den = (1.0 - x.norm2()) * dot(sub(r.base.x, xi), sub(r.base.x, xi));
    return std::log(num / den);
}

double busemann_truncated(const GeodesicRay& r, const InteriorPoint& x, double T) {
    RayFrame f = ray_frame(r);
    return ray_distance(f, T, to_frame(f, x)) - T;
}

RayFrame ray_frame(const GeodesicRay& r) {
    Isometry A = translate_to_origin(r.base);
    ProjPoint p = boundary_to_proj(apply(A, r.target));
    double s = std::sqrt(std::norm(p.z1) + std::norm(p.z2));
    Isometry B{std::conj(p.z1) / s, std::conj(p.z2) / s, -p.z2 / s, p.z1 / s, r.base.model};
    return RayFrame{compose(B, A), r.base.model};
}

double ray_distance(const RayFrame& f, double t, const HalfSpacePoint& y) {
    (void)f;
    double et = std::exp(t);
    double arg = 1.0 + (std::norm(y.zeta) + (y.height - et) * (y.height - et)) / (2.0 * y.height * et);
    return std::acosh(std::max(arg, 1.0));
}

bool shadow_contains(const InteriorPoint& z, double c, double kappa, const BoundaryPoint& xi) {
    if (c <= 0) throw PreconditionError("shadow constant must be positive");
    double n = norm(z.x);
    if (n < 1e-12) throw PreconditionError("shadow undefined at the origin");
    BoundaryPoint dir{scale(z.x, 1.0 / n), z.model};
    return chordal_distance(xi, dir) < c * std::pow(1.0 - n, 1.0 / (1.0 + kappa));
}

BoundaryPoint radial_projection(const InteriorPoint& z) {
    double n = norm(z.x);
    if (n < 1e-12) throw PreconditionError("radial projection undefined at the origin");
    return BoundaryPoint{scale(z.x, 1.0 / n), z.model};
}

// Matrix sending the line endpoints to 0 and infinity in half-space coordinates.
static Isometry line_frame(const GeodesicLine& line, Model m) {
    ProjPoint pn = boundary_to_proj(line.end_neg);
    ProjPoint pp = boundary_to_proj(line.end_pos);
    Isometry g{pn.z2, -pn.z1, pp.z2, -pp.z1, m};
    if (m == Model::disk && g.det().real() < 0) { g.a = -g.a; g.b = -g.b; }
    g.normalize();
    return g;
}

LineProjection project_to_line(const GeodesicLine& line, const InteriorPoint& x) {
    Isometry g = line_frame(line, x.model);
    // stay in half-space coordinates: far points on the line land at the
    // Cayley pole of the ball
    HalfSpacePoint h = apply_hs(g, ball_to_halfspace(x));
    double w = std::abs(h.zeta);
    LineProjection out;
    out.distance = std::asinh(w / h.height);
    out.param = std::log(std::sqrt(w * w + h.height * h.height));
    out.side = (h.zeta.real() > 0) - (h.zeta.real() < 0);
    return out;
}

InteriorPoint line_point(const GeodesicLine& line, double param) {
    Model m = line.end_pos.model;
    Isometry g = line_frame(line, m);
    // stay in half-space coordinates until the end; the intermediate point
    // (0, e^param) sits at the Cayley pole of the ball for large |param|
    return halfspace_to_ball(apply_hs(g.inverse(), HalfSpacePoint{cplx(0), std::exp(param)}), m);
}

} // namespace horolab
