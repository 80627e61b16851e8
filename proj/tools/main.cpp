// Command-line driver: orbit/series/classification tables, the four
// experiment probes, and SVG rendering, all driven by a JSON config file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "horolab/probes.hpp"
#include "horolab/svg.hpp"
#ifdef HOROLAB_OPENMP
#include <omp.h>
#endif

using namespace horolab;

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir;
    double radius = -1;
    long long seed = -1;
    double kappa = -1;
    double depth = -1;
    int threads = 0;
};

ExperimentConfig load_with_overrides(const Cli& cli) {
    if (cli.config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_config(cli.config_path);
    if (cli.radius > 0) {
        cfg.radii = {cli.radius};
        cfg.normalized["radii"] = cfg.radii;
    }
    if (cli.seed >= 0) {
        cfg.seed = std::uint64_t(cli.seed);
        cfg.normalized["seed"] = cfg.seed;
    }
    if (cli.kappa >= 0) {
        if (cli.kappa > 1) throw ConfigError("--kappa must lie in [0, 1]");
        cfg.thresholds.kappa = cli.kappa;
        cfg.normalized["thresholds"]["kappa"] = cli.kappa;
    }
    if (cli.depth > 0) {
        cfg.thresholds.depth = cli.depth;
        cfg.normalized["thresholds"]["depth"] = cli.depth;
    }
    // --out is routing only; it stays out of the normalized echo so reports
    // are byte-identical wherever they are written
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& stem) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / (cfg.name + "_" + stem)).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    std::cout << path << "\n";
}

std::string word_str(const Word& w) {
    std::string s;
    for (std::int8_t l : w.letters) {
        char c = char('a' + (l >> 1));
        s += (l & 1) ? char(c - 32) : c; // uppercase marks the inverse letter
    }
    return s.empty() ? "e" : s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void cmd_enumerate(const ExperimentConfig& cfg) {
    SchottkyPresentation G = build_presentation(cfg);
    OrbitSet orbit = enumerate_orbit(G, origin(cfg.model), cfg.radii.back());
    std::string csv = "word,length,dist,x,y,z\n";
    for (std::size_t i = 0; i < orbit.entries.size(); i++) {
        const OrbitEntry& e = orbit.entries[i];
        InteriorPoint p = orbit.entry_ball_point(i);
        csv += word_str(e.word) + "," + std::to_string(e.word.length()) + "," + fmt(e.dist) + "," +
               fmt(p.x[0]) + "," + fmt(p.x[1]) + "," + fmt(p.x[2]) + "\n";
    }
    write_file(out_path(cfg, "orbit.csv"), csv);
}

void cmd_delta(const ExperimentConfig& cfg) {
    SchottkyPresentation G = build_presentation(cfg);
    OrbitSet orbit = enumerate_orbit(G, origin(cfg.model), cfg.radii.back());
    ExponentEstimate est =
        critical_exponent_estimate(orbit, 0.4 * orbit.radius, orbit.radius - 0.5);
    std::string csv = "R,count,log_count\n";
    std::vector<double> dists;
    for (const OrbitEntry& e : orbit.entries) dists.push_back(e.dist);
    std::sort(dists.begin(), dists.end());
    for (double r = 1.0; r <= orbit.radius + 1e-9; r += 0.5) {
        std::size_t n = std::upper_bound(dists.begin(), dists.end(), r) - dists.begin();
        if (n == 0) continue;
        csv += fmt(r) + "," + std::to_string(n) + "," + fmt(std::log(double(n))) + "\n";
    }
    write_file(out_path(cfg, "counts.csv"), csv);
    std::cout << "delta_hat " << fmt(est.delta_hat) << " stderr " << fmt(est.stderr_)
              << " window [" << fmt(est.window_lo) << ", " << fmt(est.window_hi) << "]\n";
}

void cmd_patterson(const ExperimentConfig& cfg) {
    SchottkyPresentation G = build_presentation(cfg);
    OrbitSet orbit = enumerate_orbit(G, origin(cfg.model), cfg.radii.back());
    ExponentEstimate est =
        critical_exponent_estimate(orbit, 0.4 * orbit.radius, orbit.radius - 0.5);
    double s = est.delta_hat + std::max(cfg.s_margin, est.stderr_ + 1e-6);
    AtomicMeasure mu = patterson_approx(orbit, s, est);
    std::string csv = "x,y,z,weight\n";
    for (std::size_t i = 0; i < mu.atoms.size(); i++)
        csv += fmt(mu.atoms[i].x[0]) + "," + fmt(mu.atoms[i].x[1]) + "," + fmt(mu.atoms[i].x[2]) +
               "," + fmt(mu.weights[i]) + "\n";
    write_file(out_path(cfg, "atoms.csv"), csv);
    std::cout << "s " << fmt(s) << " atoms " << mu.atoms.size() << "\n";
}

void cmd_classify(const ExperimentConfig& cfg, int threads) {
#ifdef HOROLAB_OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    SchottkyPresentation G = build_presentation(cfg);
    InteriorPoint z = origin(cfg.model);
    OrbitSet orbit = enumerate_orbit(G, z, cfg.radii.back());
    Rng rng(cfg.seed);
    std::vector<BoundaryPoint> xis = sample_limit_points(G, cfg.samples, 40, rng);
    ClassifyParams params;
    params.T = cfg.T;
    params.c = cfg.thresholds.c;
    params.kappa = cfg.thresholds.kappa;
    params.M = cfg.thresholds.depth;
    params.K = cfg.thresholds.count;
    std::vector<Verdict> vs = classify_points(G, orbit, z, xis, params);
    std::string csv =
        "x,y,z,radial_count,radial_passed,shadow_count,shadow_passed,horo_depth,horo_passed,"
        "busemann_depth,big_count,big_passed,lambda_ratio,lambda_passed,lambda_star_ratio,"
        "lambda_star_passed\n";
    for (const Verdict& v : vs) {
        csv += fmt(v.xi.x[0]) + "," + fmt(v.xi.x[1]) + "," + fmt(v.xi.x[2]) + ",";
        csv += std::to_string(v.radial.count) + "," + std::to_string(int(v.radial.passed)) + ",";
        csv += std::to_string(v.shadow.count) + "," + std::to_string(int(v.shadow.passed)) + ",";
        csv += fmt(v.horospheric.achieved_depth) + "," + std::to_string(int(v.horospheric.passed)) +
               ",";
        csv += fmt(v.horospheric_busemann.achieved_depth) + ",";
        csv += std::to_string(v.big_horospheric.count) + "," +
               std::to_string(int(v.big_horospheric.passed)) + ",";
        csv += fmt(v.lambda.ratio) + "," + std::to_string(int(v.lambda.passed)) + ",";
        csv += fmt(v.lambda_star.ratio) + "," + std::to_string(int(v.lambda_star.passed)) + "\n";
    }
    write_file(out_path(cfg, "verdicts.csv"), csv);
}

void cmd_render(const ExperimentConfig& cfg) {
    SchottkyPresentation G = build_presentation(cfg);
    InteriorPoint z = origin(cfg.model);
    OrbitSet orbit = enumerate_orbit(G, z, cfg.radii.front());
    ExponentEstimate est;
    AtomicMeasure mu;
    const AtomicMeasure* mu_p = nullptr;
    try {
        est = critical_exponent_estimate(orbit, 0.4 * orbit.radius, orbit.radius - 0.5);
        double s = est.delta_hat + std::max(cfg.s_margin, est.stderr_ + 1e-6);
        mu = patterson_approx(orbit, s, est);
        mu_p = &mu;
    } catch (const std::exception&) {
        // orbit too small for a measure overlay; orbit-only image
    }
    Rng rng(cfg.seed);
    std::vector<BoundaryPoint> xis = sample_limit_points(G, std::min(cfg.samples, 64), 40, rng);
    ClassifyParams params;
    params.T = cfg.T;
    params.c = cfg.thresholds.c;
    params.kappa = cfg.thresholds.kappa;
    params.M = cfg.thresholds.depth;
    params.K = cfg.thresholds.count;
    std::vector<Verdict> vs = classify_points(G, orbit, z, xis, params);
    std::string svg = render_svg(cfg.model, &orbit, mu_p, &vs, cfg.normalized);
    write_file(out_path(cfg, "render.svg"), svg);
}

void emit_report(const ExperimentConfig& cfg, const ProbeReport& rep) {
    write_file(out_path(cfg, rep.experiment + "_report.txt"), rep.text());
    std::cout << "aggregate " << rep.aggregate.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"horolab: limit-set experiments for Schottky-type groups"};
    app.require_subcommand(1);
    app.fallthrough();

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config file (see README for the schema)");
    app.add_option("--radius", cli.radius, "override truncation radius");
    app.add_option("--seed", cli.seed, "override RNG seed");
    app.add_option("--out", cli.out_dir, "override output directory");
    app.add_option("--kappa", cli.kappa, "override shadow exponent");
    app.add_option("--depth", cli.depth, "override horospheric depth threshold");
    app.add_option("--threads", cli.threads, "OpenMP thread count for classification");

    auto* c_enum = app.add_subcommand("enumerate", "orbit ball table");
    auto* c_delta = app.add_subcommand("delta", "critical exponent estimate");
    auto* c_pat = app.add_subcommand("patterson", "Patterson atom table");
    auto* c_cls = app.add_subcommand("classify", "verdict table for sampled limit points");
    auto* c_probe = app.add_subcommand("probe", "experiment probes");
    c_probe->require_subcommand(1);
    auto* p_myr = c_probe->add_subcommand("myr-in-horo", "Myrberg points vs N-horospheric depth");
    auto* p_diff = c_probe->add_subcommand("measure-diff", "big-vs-plain horospheric mass");
    auto* p_exp = c_probe->add_subcommand("expnew", "punctured-torus crossing example");
    auto* p_dim = c_probe->add_subcommand("dimension", "kappa-shadow dimension sweep");
    auto* c_render = app.add_subcommand("render", "SVG rendering");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_with_overrides(cli);
        if (c_enum->parsed()) cmd_enumerate(cfg);
        if (c_delta->parsed()) cmd_delta(cfg);
        if (c_pat->parsed()) cmd_patterson(cfg);
        if (c_cls->parsed()) cmd_classify(cfg, cli.threads);
        if (c_render->parsed()) cmd_render(cfg);
        if (c_probe->parsed()) {
            if (p_myr->parsed()) emit_report(cfg, probe_myr_in_horo(cfg));
            if (p_diff->parsed()) emit_report(cfg, probe_measure_difference(cfg));
            if (p_exp->parsed()) emit_report(cfg, reproduce_expnew(cfg));
            if (p_dim->parsed()) emit_report(cfg, dimension_sweep(cfg));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
