#include "horolab/config_io.hpp"

#include <fstream>

namespace horolab {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

double get_num(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

double get_pos(const json& j, const std::string& path) {
    double v = get_num(j, path);
    if (!(v > 0)) bad(path, "must be positive");
    return v;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

Vec3 get_vec(const json& j, const std::string& path, Model m) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3)) bad(path, "expected [x, y] or [x, y, z]");
    Vec3 v{0, 0, 0};
    for (std::size_t i = 0; i < j.size(); i++) v[i] = get_num(j[i], path);
    if (m == Model::disk && v[2] != 0) bad(path, "disk model points must have zero third coordinate");
    return v;
}

Cap get_cap(const json& j, const std::string& path, Model m) {
    if (!j.is_object()) bad(path, "expected {center, radius}");
    if (!j.contains("center") || !j.contains("radius")) bad(path, "expected {center, radius}");
    BoundaryPoint c{get_vec(j.at("center"), path + ".center", m), m};
    double n = norm(c.x);
    if (n < 0.5) bad(path + ".center", "degenerate direction");
    c.x = scale(c.x, 1.0 / n);
    double r = get_pos(j.at("radius"), path + ".radius");
    if (r >= 2.0) bad(path + ".radius", "chordal cap radius must be below 2");
    return Cap{c, r};
}

cplx get_cplx(const json& j, const std::string& path) {
    if (j.is_number()) return cplx(j.get<double>(), 0);
    if (j.is_array() && j.size() == 2) return cplx(get_num(j[0], path), get_num(j[1], path));
    bad(path, "expected a real number or [re, im]");
}

Isometry get_matrix(const json& j, const std::string& path, Model m) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() ||
        j[0].size() != 2 || j[1].size() != 2)
        bad(path, "expected a 2x2 matrix [[a, b], [c, d]]");
    Isometry g{get_cplx(j[0][0], path), get_cplx(j[0][1], path), get_cplx(j[1][0], path),
               get_cplx(j[1][1], path), m};
    cplx det = g.a * g.d - g.b * g.c;
    if (std::abs(det - cplx(1, 0)) > 1e-9) bad(path, "determinant must be 1");
    return g;
}

json cap_json(const Cap& c) {
    return json{{"center", {c.center.x[0], c.center.x[1], c.center.x[2]}}, {"radius", c.radius}};
}

json matrix_json(const Isometry& g) {
    auto e = [](cplx z) { return json::array({z.real(), z.imag()}); };
    return json::array({json::array({e(g.a), e(g.b)}), json::array({e(g.c), e(g.d)})});
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    ExperimentConfig cfg;

    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
        bad("schema_version", "required integer");
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1) bad("schema_version", "this build reads version 1");

    if (!j.contains("name") || !j.at("name").is_string()) bad("name", "required string");
    cfg.name = j.at("name").get<std::string>();

    std::string model = j.value("model", std::string("disk"));
    if (model == "disk")
        cfg.model = Model::disk;
    else if (model == "ball3")
        cfg.model = Model::ball3;
    else
        bad("model", "must be 'disk' or 'ball3'");

    if (!j.contains("presentation") || !j.at("presentation").is_object())
        bad("presentation", "required object");
    const json& pres = j.at("presentation");
    std::string kind = pres.value("kind", std::string(""));
    if (kind == "schottky") {
        cfg.asserted_free = false;
        if (!pres.contains("pairings") || !pres.at("pairings").is_array() ||
            pres.at("pairings").empty())
            bad("presentation.pairings", "required nonempty array");
        int i = 0;
        for (const json& p : pres.at("pairings")) {
            std::string path = "presentation.pairings[" + std::to_string(i++) + "]";
            if (!p.is_object() || !p.contains("source") || !p.contains("target"))
                bad(path, "expected {source, target}");
            cfg.pairings.push_back(GeneratorPairing{get_cap(p.at("source"), path + ".source", cfg.model),
                                                    get_cap(p.at("target"), path + ".target", cfg.model)});
        }
    } else if (kind == "free_by_assertion") {
        cfg.asserted_free = true;
        if (!pres.contains("generators") || !pres.at("generators").is_array() ||
            pres.at("generators").empty())
            bad("presentation.generators", "required nonempty array");
        int i = 0;
        for (const json& g : pres.at("generators"))
            cfg.generators.push_back(
                get_matrix(g, "presentation.generators[" + std::to_string(i++) + "]", cfg.model));
        if (pres.contains("slack")) cfg.slack = get_pos(pres.at("slack"), "presentation.slack");
    } else {
        bad("presentation.kind", "must be 'schottky' or 'free_by_assertion'");
    }

    int rank = cfg.asserted_free ? int(cfg.generators.size()) : int(cfg.pairings.size());
    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        if (!k.is_object()) bad("kernel", "expected object");
        std::string kk = k.value("kind", std::string(""));
        if (kk == "free_factor_projection")
            cfg.kernel.kind = HomomorphismSpec::Kind::free_factor_projection;
        else if (kk == "exponent_sum")
            cfg.kernel.kind = HomomorphismSpec::Kind::exponent_sum;
        else
            bad("kernel.kind", "must be 'free_factor_projection' or 'exponent_sum'");
        if (!k.contains("data") || !k.at("data").is_array() || int(k.at("data").size()) != rank)
            bad("kernel.data", "expected one integer per generator");
        for (std::size_t i = 0; i < k.at("data").size(); i++)
            cfg.kernel.data.push_back(get_int(k.at("data")[i], "kernel.data"));
        cfg.has_kernel = true;
    }

    if (j.contains("radii")) {
        if (!j.at("radii").is_array() || j.at("radii").empty()) bad("radii", "nonempty array");
        cfg.radii.clear();
        for (const json& r : j.at("radii")) cfg.radii.push_back(get_pos(r, "radii"));
        for (std::size_t i = 1; i < cfg.radii.size(); i++)
            if (cfg.radii[i] <= cfg.radii[i - 1]) bad("radii", "must be strictly increasing");
    }

    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        if (!t.is_object()) bad("thresholds", "expected object");
        if (t.contains("c")) cfg.thresholds.c = get_pos(t.at("c"), "thresholds.c");
        if (t.contains("kappa")) {
            cfg.thresholds.kappa = get_num(t.at("kappa"), "thresholds.kappa");
            if (cfg.thresholds.kappa < 0 || cfg.thresholds.kappa > 1)
                bad("thresholds.kappa", "must lie in [0, 1]");
        }
        if (t.contains("depth")) cfg.thresholds.depth = get_pos(t.at("depth"), "thresholds.depth");
        if (t.contains("count")) {
            cfg.thresholds.count = get_int(t.at("count"), "thresholds.count");
            if (cfg.thresholds.count <= 0) bad("thresholds.count", "must be positive");
        }
        if (t.contains("eps")) cfg.thresholds.eps = get_pos(t.at("eps"), "thresholds.eps");
    }

    if (j.contains("T")) cfg.T = get_pos(j.at("T"), "T");
    if (j.contains("samples")) {
        cfg.samples = get_int(j.at("samples"), "samples");
        if (cfg.samples <= 0) bad("samples", "must be positive");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() || j.at("seed").get<std::int64_t>() < 0)
            bad("seed", "nonnegative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string()) bad("out_dir", "expected string");
        cfg.out_dir = j.at("out_dir").get<std::string>();
    }
    if (j.contains("partition_level")) {
        cfg.partition_level = get_int(j.at("partition_level"), "partition_level");
        if (cfg.partition_level < 0 || cfg.partition_level > 8)
            bad("partition_level", "must lie in [0, 8]");
    }
    if (j.contains("s_margin")) cfg.s_margin = get_pos(j.at("s_margin"), "s_margin");
    if (j.contains("net")) {
        const json& n = j.at("net");
        if (!n.is_object()) bad("net", "expected object");
        if (n.contains("m")) cfg.net_m = get_pos(n.at("m"), "net.m");
        if (n.contains("M")) cfg.net_M = get_pos(n.at("M"), "net.M");
        if (cfg.net_m >= cfg.net_M) bad("net", "separation m must be below covering M");
    }

    // canonical echo: every field explicit, keys sorted by the serializer
    json pres_out;
    if (cfg.asserted_free) {
        json gens = json::array();
        for (const Isometry& g : cfg.generators) gens.push_back(matrix_json(g));
        pres_out = json{{"kind", "free_by_assertion"}, {"generators", gens}, {"slack", cfg.slack}};
    } else {
        json ps = json::array();
        for (const GeneratorPairing& p : cfg.pairings)
            ps.push_back(json{{"source", cap_json(p.source)}, {"target", cap_json(p.target)}});
        pres_out = json{{"kind", "schottky"}, {"pairings", ps}};
    }
    cfg.normalized = json{
        {"schema_version", cfg.schema_version},
        {"name", cfg.name},
        {"model", cfg.model == Model::disk ? "disk" : "ball3"},
        {"presentation", pres_out},
        {"radii", cfg.radii},
        {"thresholds",
         json{{"c", cfg.thresholds.c},
              {"kappa", cfg.thresholds.kappa},
              {"depth", cfg.thresholds.depth},
              {"count", cfg.thresholds.count},
              {"eps", cfg.thresholds.eps}}},
        {"T", cfg.T},
        {"samples", cfg.samples},
        {"seed", cfg.seed},
        // out_dir is routing, not an experiment parameter: keeping it out of
        // the echo makes reports byte-identical wherever they are written
        {"partition_level", cfg.partition_level},
        {"s_margin", cfg.s_margin},
        {"net", json{{"m", cfg.net_m}, {"M", cfg.net_M}}},
    };
    if (cfg.has_kernel)
        cfg.normalized["kernel"] =
            json{{"kind", cfg.kernel.kind == HomomorphismSpec::Kind::free_factor_projection
                              ? "free_factor_projection"
                              : "exponent_sum"},
                 {"data", cfg.kernel.data}};
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

SchottkyPresentation build_presentation(const ExperimentConfig& cfg) {
    if (cfg.asserted_free) return free_by_assertion(cfg.model, cfg.generators, cfg.slack);
    return build_schottky(cfg.model, cfg.pairings);
}

} // namespace horolab
