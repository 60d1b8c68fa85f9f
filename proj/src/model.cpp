#include "dubinspair/model.hpp"

#include <cmath>

namespace dubinspair {

namespace {

bool finite(const VehicleState& v) {
  return std::isfinite(v.pos1) && std::isfinite(v.pos2) && std::isfinite(v.heading);
}

}  // namespace

std::vector<Violation> validate_scenario(const BoundaryConditions& bc, const Weights& w) {
  std::vector<Violation> out;
  if (!std::isfinite(w.delta)) out.push_back({"weights.delta", "must be finite"});
  else if (!(w.delta > 0.0)) out.push_back({"weights.delta", "must be positive"});
  if (!std::isfinite(w.beta)) out.push_back({"weights.beta", "must be finite"});
  else if (!(w.beta >= 0.0)) out.push_back({"weights.beta", "must be non-negative"});
  if (!std::isfinite(w.alpha)) out.push_back({"weights.alpha", "must be finite"});
  else if (!(w.alpha >= 0.0)) out.push_back({"weights.alpha", "must be non-negative"});
  if (!std::isfinite(w.rho)) out.push_back({"weights.rho", "must be finite"});
  else if (!(w.rho >= 0.0)) out.push_back({"weights.rho", "must be non-negative"});

  if (!std::isfinite(bc.horizon)) out.push_back({"horizon", "must be finite"});
  else if (!(bc.horizon > 0.0)) out.push_back({"horizon", "must be positive"});

  if (!finite(bc.initial.a)) out.push_back({"vehicle1.initial", "must be finite"});
  if (!finite(bc.initial.b)) out.push_back({"vehicle2.initial", "must be finite"});
  if (!finite(bc.final.a)) out.push_back({"vehicle1.final", "must be finite"});
  if (!finite(bc.final.b)) out.push_back({"vehicle2.final", "must be finite"});

  if (finite(bc.initial.a) && finite(bc.initial.b) &&
      !(separation_sq(bc.initial) >= kSeparationGuardSq))
    out.push_back({"initial", "endpoint separation below guard"});
  if (finite(bc.final.a) && finite(bc.final.b) &&
      !(separation_sq(bc.final) >= kSeparationGuardSq))
    out.push_back({"final", "endpoint separation below guard"});

  return out;
}

}  // namespace dubinspair
