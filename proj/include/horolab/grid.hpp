#pragma once

// Deterministic hierarchical cell grids on the boundary: dyadic arcs on the
// circle, triangular octahedron subdivision on the sphere. Used as cap
// partitions for measure comparisons and for box counting.

#include <cstdint>

#include "horolab/geometry.hpp"

namespace horolab {

inline std::int64_t grid_cell_count(Model m, int level) {
    return m == Model::disk ? std::int64_t(8) << level : std::int64_t(8) << (2 * level);
}

// Approximate cell diameter (chordal) at a level.
inline double grid_cell_scale(Model m, int level) {
    // octant arc length / face in-scale; one convention for both models so a
    // fixed scale range selects comparable levels
    return 0.7854 / double(std::int64_t(1) << level);
}

namespace griddetail {
// Solve p = alpha*A + beta*B + gamma*C for the (not normalized) barycentric
// coordinates of a direction with respect to a spherical triangle.
inline void bary(const Vec3& A, const Vec3& B, const Vec3& C, const Vec3& p, double& al, double& be,
                 double& ga) {
    double det = dot(A, cross(B, C));
    al = dot(p, cross(B, C)) / det;
    be = dot(A, cross(p, C)) / det;
    ga = dot(A, cross(B, p)) / det;
}
} // namespace griddetail

// Index of the grid cell containing a boundary point, in [0, grid_cell_count).
inline std::int64_t grid_cell_index(const BoundaryPoint& xi, int level) {
    if (xi.model == Model::disk) {
        double theta = std::atan2(xi.x[1], xi.x[0]); // (-pi, pi]
        double frac = theta / 6.283185307179586 + 0.5;
        std::int64_t n = grid_cell_count(Model::disk, level);
        std::int64_t k = std::int64_t(frac * double(n));
        if (k < 0) k = 0;
        if (k >= n) k = n - 1;
        return k;
    }
    const Vec3& p = xi.x;
    int octant = (p[0] < 0 ? 1 : 0) | (p[1] < 0 ? 2 : 0) | (p[2] < 0 ? 4 : 0);
    Vec3 A{p[0] < 0 ? -1.0 : 1.0, 0, 0};
    Vec3 B{0, p[1] < 0 ? -1.0 : 1.0, 0};
    Vec3 C{0, 0, p[2] < 0 ? -1.0 : 1.0};
    std::int64_t idx = octant;
    for (int l = 0; l < level; l++) {
        Vec3 mab = add(A, B), mbc = add(B, C), mca = add(C, A);
        mab = scale(mab, 1.0 / norm(mab));
        mbc = scale(mbc, 1.0 / norm(mbc));
        mca = scale(mca, 1.0 / norm(mca));
        // pick the child triangle where p has the least-negative coordinates
        const Vec3* tri[4][3] = {{&A, &mab, &mca}, {&mab, &B, &mbc}, {&mca, &mbc, &C}, {&mab, &mbc, &mca}};
        int best = 0;
        double best_min = -1e300;
        double al, be, ga;
        for (int c = 0; c < 4; c++) {
            griddetail::bary(*tri[c][0], *tri[c][1], *tri[c][2], p, al, be, ga);
            double mn = std::min(al, std::min(be, ga));
            if (mn > best_min) {
                best_min = mn;
                best = c;
            }
        }
        Vec3 nA = *tri[best][0], nB = *tri[best][1], nC = *tri[best][2];
        A = nA;
        B = nB;
        C = nC;
        idx = idx * 4 + best;
    }
    return idx;
}

// Representative center of a grid cell (replays the subdivision, so it is a
// pure function of the index and never depends on which points were binned).
inline BoundaryPoint grid_cell_center(Model m, int level, std::int64_t idx) {
    if (m == Model::disk) {
        std::int64_t n = grid_cell_count(Model::disk, level);
        double theta = ((double(idx) + 0.5) / double(n) - 0.5) * 6.283185307179586;
        return BoundaryPoint{{std::cos(theta), std::sin(theta), 0}, Model::disk};
    }
    std::int64_t shift = 2 * level;
    int octant = int(idx >> shift);
    Vec3 A{(octant & 1) ? -1.0 : 1.0, 0, 0};
    Vec3 B{0, (octant & 2) ? -1.0 : 1.0, 0};
    Vec3 C{0, 0, (octant & 4) ? -1.0 : 1.0};
    for (int l = level - 1; l >= 0; l--) {
        int child = int((idx >> (2 * l)) & 3);
        Vec3 mab = add(A, B), mbc = add(B, C), mca = add(C, A);
        mab = scale(mab, 1.0 / norm(mab));
        mbc = scale(mbc, 1.0 / norm(mbc));
        mca = scale(mca, 1.0 / norm(mca));
        if (child == 0) {
            B = mab;
            C = mca;
        } else if (child == 1) {
            A = mab;
            C = mbc;
        } else if (child == 2) {
            A = mca;
            B = mbc;
        } else {
            A = mab;
            B = mbc;
            C = mca;
        }
    }
    Vec3 c = add(add(A, B), C);
    BoundaryPoint out{scale(c, 1.0 / norm(c)), Model::ball3};
    return out;
}

} // namespace horolab
