#pragma once

// Deterministic scalable-vector-graphics rendering of boundary data: the
// boundary circle (orthographic outline for the 3-ball), orbit projections,
// measure atoms sized by weight, and verdict-colored limit point markers.

#include <string>

#include <json.hpp>

#include "horolab/classify.hpp"
#include "horolab/measures.hpp"

namespace horolab {

std::string render_svg(Model model, const OrbitSet* orbit, const AtomicMeasure* mu,
                       const std::vector<Verdict>* verdicts, const nlohmann::json& legend);

} // namespace horolab
