#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "repind/procedures.hpp"

namespace repind::cli {

const std::vector<std::string>& reproduction_names();

/// Runs a bundled reproduction. Float results are JSON numbers; exact
/// results (rationals) are strings. Throws ValidationError for an unknown name.
nlohmann::ordered_json reproduce(const std::string& name, const InferenceConfig& cfg);

/// Differences between a golden document and a fresh one: numbers within
/// `tol`, everything else exactly. Empty means they match.
std::vector<std::string> golden_diff(const nlohmann::ordered_json& expected, const nlohmann::ordered_json& actual, double tol = 1e-6,
                                     const std::string& at = "");

}  // namespace repind::cli
