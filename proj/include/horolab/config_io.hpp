#pragma once

// Experiment configuration: a versioned JSON file naming a presentation, an
// optional kernel spec, truncation radii and thresholds. Every probe echoes
// the normalized form back into its report, so a config plus a seed pins the
// output bytes.

#include <string>

#include <json.hpp>

#include "horolab/orbit.hpp"

namespace horolab {

using json = nlohmann::json;

struct Thresholds {
    double c = 2.0;      // radial distance threshold
    double kappa = 0.5;  // shadow exponent
    double depth = 6.0;  // horospheric depth M
    int count = 5;       // big-horospheric count K
    double eps = 1.5;    // Myrberg segment tolerance
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string name;
    Model model = Model::disk;
    bool asserted_free = false;
    std::vector<GeneratorPairing> pairings;     // schottky mode
    std::vector<Isometry> generators;           // free-by-assertion mode
    double slack = 6.0;
    bool has_kernel = false;
    HomomorphismSpec kernel;
    std::vector<double> radii{15.0, 20.0, 25.0};
    Thresholds thresholds;
    double T = 30.0;
    int samples = 20;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int partition_level = 2;    // boundary cell level for measure partitions
    double s_margin = 0.1;      // Patterson exponent margin over delta-hat
    double net_m = 0.4, net_M = 2.5; // uniform net separation / covering

    json normalized; // canonical form, echoed into reports
};

// Parse and validate; throws ConfigError with a field path on any problem.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

SchottkyPresentation build_presentation(const ExperimentConfig& cfg);

} // namespace horolab
