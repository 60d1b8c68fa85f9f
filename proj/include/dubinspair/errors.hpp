#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dubinspair {

/// Squared inter-vehicle separation fell below the singularity guard.
/// Carries the offending value and, when raised inside an integration,
/// the index of the step that produced it (-1 otherwise).
class SeparationTooSmall : public std::runtime_error {
public:
  explicit SeparationTooSmall(double separation_sq, int step_index = -1)
      : std::runtime_error(format(separation_sq, step_index)),
        separation_sq_(separation_sq),
        step_index_(step_index) {}

  double separation_sq() const noexcept { return separation_sq_; }
  int step_index() const noexcept { return step_index_; }

private:
  static std::string format(double sep_sq, int step) {
    std::string msg = "separation_sq " + std::to_string(sep_sq) +
                      " below singularity guard";
    if (step >= 0) msg += " at step " + std::to_string(step);
    return msg;
  }

  double separation_sq_;
  int step_index_;
};

/// An RK4 stage evaluated to a non-finite value.
class NonFiniteStage : public std::runtime_error {
public:
  explicit NonFiniteStage(int stage)
      : std::runtime_error("non-finite RK4 stage k" + std::to_string(stage)),
        stage_(stage) {}

  int stage() const noexcept { return stage_; }

private:
  int stage_;
};

/// Scenario failed validation. One "field: message" entry per violation.
class ScenarioInvalid : public std::runtime_error {
public:
  explicit ScenarioInvalid(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid scenario:";
    for (const auto& s : v) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace dubinspair
