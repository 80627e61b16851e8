// Timing comparison between the parallel classification kernel and its serial
// reference, plus an equality check so the benchmark doubles as a smoke test.

#include <chrono>
#include <cstdio>

#include "horolab/classify.hpp"

using namespace horolab;

namespace {

BoundaryPoint circle_pt(double theta) {
    return BoundaryPoint{{std::cos(theta), std::sin(theta), 0}, Model::disk};
}

SchottkyPresentation make_group() {
    const double pi = 3.14159265358979323846;
    std::vector<GeneratorPairing> p{
        {Cap{circle_pt(pi / 4), 0.55}, Cap{circle_pt(5 * pi / 4), 0.55}},
        {Cap{circle_pt(3 * pi / 4), 0.55}, Cap{circle_pt(7 * pi / 4), 0.55}},
    };
    return build_schottky(Model::disk, p);
}

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

bool same(const std::vector<Verdict>& u, const std::vector<Verdict>& v) {
    if (u.size() != v.size()) return false;
    for (std::size_t i = 0; i < u.size(); i++) {
        if (u[i].radial.count != v[i].radial.count) return false;
        if (u[i].shadow.count != v[i].shadow.count) return false;
        if (u[i].horospheric.achieved_depth != v[i].horospheric.achieved_depth) return false;
        if (u[i].big_horospheric.count != v[i].big_horospheric.count) return false;
        if (u[i].lambda.ratio != v[i].lambda.ratio) return false;
        if (u[i].lambda_star.ratio != v[i].lambda_star.ratio) return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    int num_points = argc > 1 ? std::atoi(argv[1]) : 64;
    SchottkyPresentation G = make_group();
    InteriorPoint z = origin(Model::disk);
    OrbitSet orbit = enumerate_orbit(G, z, 15.0);
    Rng rng(2024);
    std::vector<BoundaryPoint> xis = sample_limit_points(G, num_points, 40, rng);
    ClassifyParams params;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Verdict> serial = classify_points_serial(G, orbit, z, xis, params);
    auto t1 = std::chrono::steady_clock::now();
    std::vector<Verdict> parallel = classify_points(G, orbit, z, xis, params);
    auto t2 = std::chrono::steady_clock::now();

    double ts = seconds(t0, t1), tp = seconds(t1, t2);
    std::printf("points            %d\n", num_points);
    std::printf("orbit entries     %zu\n", orbit.entries.size());
    std::printf("serial            %.3f s\n", ts);
    std::printf("parallel          %.3f s\n", tp);
    std::printf("speedup           %.2fx\n", tp > 0 ? ts / tp : 0.0);
    std::printf("verdicts equal    %s\n", same(serial, parallel) ? "yes" : "NO");
    return same(serial, parallel) ? 0 : 1;
}
