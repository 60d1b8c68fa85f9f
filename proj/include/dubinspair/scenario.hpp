#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dubinspair/model.hpp"
#include "dubinspair/solver.hpp"

namespace dubinspair {

enum class MethodChoice { Fbsm, Shooting, Both };

std::string method_name(MethodChoice m);
std::optional<MethodChoice> method_from_name(std::string_view name);

/// One scenario: boundary data plus every knob the solvers expose. Defaults
/// below apply field-by-field when a key is absent from the file.
struct ScenarioFile {
  BoundaryConditions bc;  // horizon lives here, default 10
  int steps = 2000;
  Weights weights{1.0, 0.05, 0.05, 1.0};
  MethodChoice method = MethodChoice::Fbsm;
  SolveOptions solver;  // steps is mirrored into solver.steps after parsing

  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Strict JSON parsing: unknown keys are errors, all violations are
/// collected with field paths, syntax errors carry line and column. Throws
/// ScenarioInvalid.
ScenarioFile parse_scenario(const std::string& text);

/// Reads and parses a scenario file; file-system failures surface as
/// ScenarioInvalid with the path in the message.
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Canonical serialization; parse_scenario(serialize_scenario(s)) == s for
/// every valid scenario, with doubles written in shortest round-trip form.
std::string serialize_scenario(const ScenarioFile& s);

/// FNV-1a 64-bit hash of the canonical serialization; stamps the summary so
/// artifacts can be traced to their inputs.
std::uint64_t scenario_hash(const ScenarioFile& s);

}  // namespace dubinspair
