// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure. Run from the repository root (the shipped configs are read from
// configs/).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "horolab/grid.hpp"
#include "horolab/probes.hpp"
#include "support.hpp"

using namespace horolab;
using namespace horolab::testsupport;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& desc, double limit_s,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto t0 = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    if (!ok) g_failures++;
    std::printf("criterion %2d %s (%.1fs) %s%s%s\n", n, ok ? "PASS" : "FAIL", secs, desc.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

BoundaryPoint random_boundary(Rng& rng, Model m) {
    for (;;) {
        Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), m == Model::disk ? 0.0 : rng.uniform(-1, 1)};
        double n = norm(v);
        if (n > 0.2 && n < 1.0) return BoundaryPoint{scale(v, 1.0 / n), m};
    }
}

InteriorPoint random_interior(Rng& rng, Model m, double rmax = 0.9) {
    for (;;) {
        Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), m == Model::disk ? 0.0 : rng.uniform(-1, 1)};
        if (norm(v) < 1.0) return InteriorPoint{scale(v, rmax), m};
    }
}

Isometry random_isometry(Rng& rng, Model m) {
    HalfSpacePoint h{cplx(rng.uniform(-2, 2), m == Model::disk ? 0.0 : rng.uniform(-2, 2)),
                     std::exp(rng.uniform(-1.5, 1.5))};
    Isometry g = translate_to_origin(halfspace_to_ball(h, m)).inverse();
    cplx b(rng.uniform(-1, 1), m == Model::disk ? 0.0 : rng.uniform(-1, 1));
    Isometry shear{cplx(1), b, cplx(0), cplx(1), m};
    return compose(g, shear);
}

// Fekete refinement of pruning-free counts: inf log N(R) / R over R <= 8.
double brute_exponent_oracle(const SchottkyPresentation& G) {
    OrbitSet brute = brute_force_orbit(G, origin(G.model), 8.0);
    double best = 1e300;
    for (double r = 6.0; r <= 8.0 + 1e-9; r += 0.5) {
        long long count = 0;
        for (const auto& e : brute.entries)
            if (e.dist <= r) count++;
        best = std::min(best, std::log(double(count)) / r);
    }
    return best;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

int main() {
    criterion(1, "geometry suite: 10^4 randomized invariance and Busemann checks", 10.0,
              [](std::string& detail) {
                  Rng rng(2026);
                  int bad = 0;
                  for (int i = 0; i < 2500; i++) {
                      Model m = (i % 2) ? Model::ball3 : Model::disk;
                      Isometry g = random_isometry(rng, m), h = random_isometry(rng, m);
                      InteriorPoint p = random_interior(rng, m), q = random_interior(rng, m);
                      if (std::abs(hyperbolic_distance(apply(g, p), apply(g, q)) -
                                   hyperbolic_distance(p, q)) > 1e-9)
                          bad++;

                      GeodesicRay ray{random_interior(rng, m, 0.5), random_boundary(rng, m)};
                      InteriorPoint x = random_interior(rng, m, 0.85);
                      if (std::abs(busemann(ray, x) - busemann_truncated(ray, x, 40.0)) > 1e-8)
                          bad++;

                      BoundaryPoint xi = random_boundary(rng, m);
                      double lhs = boundary_stretch(compose(g, h), xi);
                      double rhs = boundary_stretch(g, apply(h, xi)) * boundary_stretch(h, xi);
                      if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs))) bad++;

                      double t = rng.uniform(0, 20);
                      if (std::abs(busemann(ray, ray_point(ray, t)) + t) > 1e-9) bad++;
                  }
                  detail = "violations " + std::to_string(bad) + "/10000";
                  return bad == 0;
              });

    criterion(2, "enumeration equals pruning-free brute force at R = 8", 60.0,
              [](std::string& detail) {
                  bool ok = true;
                  {
                      SchottkyPresentation G = make_schottky2();
                      InteriorPoint z = origin(Model::disk);
                      if (!same_orbit(enumerate_orbit(G, z, 8.0), brute_force_orbit(G, z, 8.0))) {
                          ok = false;
                          detail += "schottky2 mismatch; ";
                      }
                  }
                  {
                      SchottkyPresentation G = make_expl1();
                      InteriorPoint z = origin(Model::ball3);
                      if (!same_orbit(enumerate_orbit(G, z, 8.0), brute_force_orbit(G, z, 8.0))) {
                          ok = false;
                          detail += "expl1 mismatch";
                      }
                  }
                  return ok;
              });

    criterion(3, "exponent sanity: cyclic, oracle match, basepoint, delta(N) < delta(G)", 300.0,
              [](std::string& detail) {
                  bool ok = true;
                  SchottkyPresentation C = make_cyclic();
                  OrbitSet oc = enumerate_orbit(C, origin(Model::disk), 80.0);
                  double d_cyc = critical_exponent_estimate(oc, 40.0, 80.0).delta_hat;
                  if (!(d_cyc >= 0.0 && d_cyc <= 0.02)) {
                      ok = false;
                      detail += "cyclic " + std::to_string(d_cyc) + "; ";
                  }

                  ExperimentConfig thin = load_config("configs/schottky_thin.json");
                  SchottkyPresentation Gt = build_presentation(thin);
                  OrbitSet ot = enumerate_orbit(Gt, origin(Model::disk), 25.0);
                  double d_thin = critical_exponent_estimate(ot, 15.0, 25.0).delta_hat;
                  double oracle = brute_exponent_oracle(Gt);
                  if (std::abs(d_thin - oracle) >= 0.05) {
                      ok = false;
                      detail += "thin " + std::to_string(d_thin) + " vs oracle " +
                                std::to_string(oracle) + "; ";
                  }

                  SchottkyPresentation G2 = make_schottky2();
                  OrbitSet b1 = enumerate_orbit(G2, origin(Model::disk), 23.0);
                  OrbitSet b2 = enumerate_orbit(G2, InteriorPoint{{0.15, 0.1, 0}, Model::disk}, 23.0);
                  ExponentEstimate e1 = critical_exponent_estimate(b1, 13.0, 23.0);
                  ExponentEstimate e2 = critical_exponent_estimate(b2, 13.0, 23.0);
                  if (std::abs(e1.delta_hat - e2.delta_hat) > 2.0 * (e1.stderr_ + e2.stderr_)) {
                      ok = false;
                      detail += "basepoint drift; ";
                  }

                  ExperimentConfig ex = load_config("configs/expl1.json");
                  SchottkyPresentation Ge = build_presentation(ex);
                  InteriorPoint z = origin(Model::ball3);
                  OrbitSet og = enumerate_orbit(Ge, z, 25.0);
                  double d_g = critical_exponent_estimate(og, 10.0, 25.0).delta_hat;
                  OrbitSet big = enumerate_orbit(Ge, z, 40.0);
                  OrbitSet sub = suborbit(big, ex.kernel);
                  double d_n = critical_exponent_estimate(sub, 16.0, 39.5).delta_hat;
                  if (!(d_n < d_g - 0.05)) {
                      ok = false;
                      detail += "delta(N) " + std::to_string(d_n) + " !< delta(G) " +
                                std::to_string(d_g) + " - 0.05";
                  }
                  return ok;
              });

    criterion(4, "conformal defect at s = delta + 0.1 decreases R = 15 -> 25, final <= 0.10",
              300.0, [](std::string& detail) {
                  ExperimentConfig cfg = load_config("configs/schottky2.json");
                  SchottkyPresentation G = build_presentation(cfg);
                  InteriorPoint z = origin(Model::disk);
                  std::vector<Cap> boxes;
                  for (const auto& p : G.pairings) {
                      boxes.push_back(p.source);
                      boxes.push_back(p.target);
                  }
                  OrbitSet o25 = enumerate_orbit(G, z, 25.0);
                  ExponentEstimate est = critical_exponent_estimate(o25, 10.0, 25.0);
                  double s = est.delta_hat + 0.1;
                  std::vector<double> defects;
                  for (double R : {15.0, 20.0, 25.0}) {
                      OrbitSet o = enumerate_orbit(G, z, R);
                      AtomicMeasure mu = patterson_approx(o, s, est);
                      double d = 0;
                      for (const Isometry& g : G.generators)
                          d = std::max(d, conformal_defect(mu, g, boxes).max_defect);
                      defects.push_back(d);
                  }
                  detail = "defects " + std::to_string(defects[0]) + " " +
                           std::to_string(defects[1]) + " " + std::to_string(defects[2]);
                  return defects[1] < defects[0] && defects[2] < defects[1] &&
                         defects[2] <= 0.10;
              });

    criterion(5, "hierarchy chain and Lipschitz profile on 200 sampled points", 600.0,
              [](std::string& detail) {
                  const double T = 12.0, c = 2.0, M = 4.0;
                  const double c_shadow = 2.5 * std::sinh(c) + 0.1;
                  int chain_bad = 0, lip_bad = 0, total = 0;
                  struct Setup {
                      SchottkyPresentation G;
                      int count;
                  };
                  ExperimentConfig thin = load_config("configs/schottky_thin.json");
                  std::vector<Setup> setups;
                  setups.push_back({make_schottky2(), 70});
                  setups.push_back({build_presentation(thin), 70});
                  setups.push_back({make_expl1(), 60});
                  Rng rng(404);
                  for (const Setup& su : setups) {
                      InteriorPoint z = origin(su.G.model);
                      OrbitSet orbit = enumerate_orbit(su.G, z, 15.0);
                      std::vector<BoundaryPoint> xis = sample_limit_points(su.G, su.count, 30, rng);
                      for (const BoundaryPoint& xi : xis) {
                          total++;
                          EscapeProfile p = escape_profile(su.G, z, xi, T, 0.5);
                          double d0 = hyperbolic_distance(p.ray.base, p.orbit_basepoint);
                          for (std::size_t i = 0; i < p.samples.size(); i++) {
                              const ProfileSample& s = p.samples[i];
                              if (s.phi < -1e-12 || s.phi > s.t + d0 + 1e-9) lip_bad++;
                              if (i > 0 && std::abs(s.phi - p.samples[i - 1].phi) >
                                               std::abs(s.t - p.samples[i - 1].t) + 1e-9)
                                  lip_bad++;
                          }
                          bool rad = test_radial(p, c).passed;
                          bool sh = test_shadow_limit(orbit, xi, c_shadow, 0.0).passed;
                          bool horo = test_horospheric(p, M).passed;
                          bool big = test_big_horospheric(orbit, xi, 0.0, 1).passed;
                          if (rad && !sh) chain_bad++;
                          if (sh && !horo) chain_bad++;
                          if (horo && !big) chain_bad++;
                      }
                  }
                  detail = std::to_string(total) + " points, chain violations " +
                           std::to_string(chain_bad) + ", Lipschitz violations " +
                           std::to_string(lip_bad);
                  return total == 200 && chain_bad == 0 && lip_bad == 0;
              });

    criterion(6, "Myrberg-in-horospheric probe on expl1: >= 95% at M = 8, T = 30", 900.0,
              [](std::string& detail) {
                  ExperimentConfig cfg = load_config("configs/expl1.json");
                  SchottkyPresentation G = build_presentation(cfg);
                  OrbitSet o = enumerate_orbit(G, origin(Model::ball3), 25.0);
                  double d_g = critical_exponent_estimate(o, 10.0, 25.0).delta_hat;
                  ProbeReport rep = probe_myr_in_horo(cfg);
                  int samples = rep.aggregate.at("samples").get<int>();
                  double frac = rep.aggregate.at("pass_fraction").get<double>();
                  bool mono = rep.aggregate.at("depth_monotone_in_T").get<bool>();
                  bool ctl = rep.aggregate.at("control").at("fails_as_expected").get<bool>();
                  detail = "delta " + std::to_string(d_g) + ", pass " + std::to_string(frac) +
                           " of " + std::to_string(samples);
                  return d_g <= 0.3 && samples == 20 && cfg.T == 30.0 &&
                         cfg.thresholds.depth == 8.0 && frac >= 0.95 && mono && ctl;
              });

    criterion(7, "difference mass shrinks over R in {15, 20, 25} at M = 6, final <= 0.05",
              1200.0, [](std::string& detail) {
                  ExperimentConfig cfg = load_config("configs/expl1.json");
                  cfg.thresholds.depth = 6.0;
                  cfg.normalized["thresholds"]["depth"] = 6.0;
                  ProbeReport rep = probe_measure_difference(cfg);
                  double fin = rep.aggregate.at("final_difference_mass").get<double>();
                  double fin_net = rep.aggregate.at("final_difference_mass_net").get<double>();
                  bool mono = rep.aggregate.at("monotone_nonincreasing").get<bool>();
                  bool mono_net = rep.aggregate.at("monotone_nonincreasing_net").get<bool>();
                  detail = "final " + std::to_string(fin) + ", net " + std::to_string(fin_net);
                  return cfg.radii == std::vector<double>{15.0, 20.0, 25.0} && mono && mono_net &&
                         fin <= 0.05 && fin_net <= 0.05;
              });

    criterion(8, "expnew: trace -2 exact, crossing ratios certified, 3 radial returns", 600.0,
              [](std::string& detail) {
                  ExperimentConfig cfg = load_config("configs/punctured_torus.json");
                  ProbeReport rep = reproduce_expnew(cfg);
                  bool integral = rep.aggregate.at("trace_integral").get<bool>();
                  double tr = rep.aggregate.at("trace").get<double>();
                  bool ratios = rep.aggregate.at("all_ratios_pass").get<bool>();
                  int n_pts = int(rep.points.size());
                  bool radial = rep.aggregate.at("radial_passed").get<bool>();
                  int rcount = rep.aggregate.at("radial_count").get<int>();
                  double rc = rep.aggregate.at("radial_c").get<double>();
                  detail = "limsup " +
                           std::to_string(rep.aggregate.at("limsup_statistic").get<double>()) +
                           ", radial returns " + std::to_string(rcount);
                  return integral && tr == -2.0 && ratios && n_pts == 5 && radial &&
                         rcount >= 3 && rc == 2.0 && cfg.T == 12.0;
              });

    criterion(9, "dimension sweep: synthetic oracles, kappa bounds, Myrberg gap", 900.0,
              [](std::string& detail) {
                  const double pi = 3.14159265358979323846;
                  int N = 10000;
                  std::vector<BoundaryPoint> circ, sph;
                  for (int i = 0; i < N; i++) {
                      double th = 2 * pi * i / N;
                      circ.push_back(
                          BoundaryPoint{{std::cos(th), std::sin(th), 0}, Model::ball3});
                  }
                  double golden = pi * (3.0 - std::sqrt(5.0));
                  for (int i = 0; i < N; i++) {
                      double y = 1.0 - 2.0 * (i + 0.5) / N;
                      double r = std::sqrt(std::max(0.0, 1.0 - y * y));
                      sph.push_back(BoundaryPoint{
                          {r * std::cos(golden * i), y, r * std::sin(golden * i)}, Model::ball3});
                  }
                  double d_circ = box_dimension_estimate(circ, 0.04, 0.1).dim;
                  double d_sph = box_dimension_estimate(sph, 0.04, 0.1).dim;
                  if (std::abs(d_circ - 1.0) > 0.1 || std::abs(d_sph - 2.0) > 0.1) {
                      detail = "synthetic oracle failed: circle " + std::to_string(d_circ) +
                               ", sphere " + std::to_string(d_sph);
                      return false;
                  }

                  ExperimentConfig cfg = load_config("configs/schottky2.json");
                  ProbeReport rep = dimension_sweep(cfg);
                  bool within = rep.aggregate.at("all_within_bound").get<bool>();
                  const json& pk = rep.aggregate.at("per_kappa");
                  bool all_estimated = pk.size() == 5;
                  for (const json& e : pk)
                      if (!e.contains("dim")) all_estimated = false;
                  const json& myr = rep.aggregate.at("myrberg");
                  double gap = myr.contains("delta_gap") ? myr.at("delta_gap").get<double>() : 1e9;
                  detail = "myrberg gap " + std::to_string(gap);
                  return within && all_estimated && gap <= 0.15;
              });

    criterion(10, "byte-identical probe reports for identical config and seed", 1800.0,
              [](std::string& detail) {
                  struct Run {
                      std::string args;
                      std::string report;
                  };
                  std::vector<Run> runs{
                      {"probe expnew --config configs/punctured_torus.json",
                       "punctured_torus_expnew_report.txt"},
                      {"probe myr-in-horo --config configs/expl1.json",
                       "expl1_myr-in-horo_report.txt"},
                      {"probe measure-diff --config configs/expl1.json --depth 6",
                       "expl1_measure-diff_report.txt"},
                      {"probe dimension --config configs/schottky2.json",
                       "schottky2_dimension_report.txt"},
                  };
                  namespace fs = std::filesystem;
                  fs::path base = fs::temp_directory_path() / "horolab_acceptance";
                  fs::remove_all(base);
                  for (const Run& r : runs) {
                      for (const char* sub : {"a", "b"}) {
                          std::string cmd = std::string(HOROLAB_BIN) + " " + r.args + " --out " +
                                            (base / sub).string() + " > /dev/null";
                          if (std::system(cmd.c_str()) != 0) {
                              detail = "probe run failed: " + r.args;
                              return false;
                          }
                      }
                      std::string a = slurp(base / "a" / r.report);
                      std::string b = slurp(base / "b" / r.report);
                      if (a.empty() || a != b) {
                          detail = "report differs or missing: " + r.report;
                          return false;
                      }
                  }
                  fs::remove_all(base);
                  return true;
              });

    std::printf("%s: %d of 10 criteria passed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
