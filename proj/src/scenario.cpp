#include "dubinspair/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dubinspair/outputs.hpp"

namespace dubinspair {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Collector {
  std::vector<std::string> msgs;
  void add(const std::string& path, const std::string& msg) { msgs.push_back(path + ": " + msg); }
  bool ok() const { return msgs.empty(); }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Collector& c) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) c.add(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

/// Fetches an optional numeric field; leaves out untouched when absent.
void get_number(const json& obj, const std::string& path, const char* key, double& out,
                Collector& c) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    c.add(path.empty() ? key : path + "." + key, "must be a number");
    return;
  }
  out = v.get<double>();
}

void get_integer(const json& obj, const std::string& path, const char* key, int& out,
                 Collector& c) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    c.add(path.empty() ? key : path + "." + key, "must be an integer");
    return;
  }
  out = v.get<int>();
}

void get_vehicle_state(const json& obj, const std::string& path, const char* key,
                       VehicleState& out, Collector& c) {
  if (!obj.contains(key)) {
    c.add(path + "." + key, "missing (required)");
    return;
  }
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) {
    c.add(path + "." + key, "must be an array of 3 numbers [pos1, pos2, heading]");
    return;
  }
  double vals[3];
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) {
      c.add(path + "." + key + "[" + std::to_string(i) + "]", "must be a number");
      return;
    }
    vals[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  out = {vals[0], vals[1], vals[2]};
}

void get_vehicle(const json& root, const char* key, VehicleState& initial, VehicleState& final_,
                 Collector& c) {
  if (!root.contains(key)) {
    c.add(key, "missing (required)");
    return;
  }
  const json& v = root.at(key);
  if (!v.is_object()) {
    c.add(key, "must be an object with keys initial, final");
    return;
  }
  check_keys(v, key, {"initial", "final"}, c);
  get_vehicle_state(v, key, "initial", initial, c);
  get_vehicle_state(v, key, "final", final_, c);
}

}  // namespace

std::string method_name(MethodChoice m) {
  switch (m) {
    case MethodChoice::Fbsm: return "fbsm";
    case MethodChoice::Shooting: return "shooting";
    default: return "both";
  }
}

std::optional<MethodChoice> method_from_name(std::string_view name) {
  if (name == "fbsm") return MethodChoice::Fbsm;
  if (name == "shooting") return MethodChoice::Shooting;
  if (name == "both") return MethodChoice::Both;
  return std::nullopt;
}

ScenarioFile parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioInvalid({"syntax error at line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ": " + e.what()});
  }
  if (!root.is_object()) throw ScenarioInvalid({"top level: must be an object"});

  Collector c;
  ScenarioFile s;
  s.bc.horizon = 10.0;

  check_keys(root, "", {"horizon", "steps", "weights", "vehicle1", "vehicle2", "solver"}, c);
  get_number(root, "", "horizon", s.bc.horizon, c);
  get_integer(root, "", "steps", s.steps, c);

  if (root.contains("weights")) {
    const json& w = root.at("weights");
    if (!w.is_object()) {
      c.add("weights", "must be an object");
    } else {
      check_keys(w, "weights", {"delta", "beta", "alpha", "rho"}, c);
      get_number(w, "weights", "delta", s.weights.delta, c);
      get_number(w, "weights", "beta", s.weights.beta, c);
      get_number(w, "weights", "alpha", s.weights.alpha, c);
      get_number(w, "weights", "rho", s.weights.rho, c);
    }
  }

  get_vehicle(root, "vehicle1", s.bc.initial.a, s.bc.final.a, c);
  get_vehicle(root, "vehicle2", s.bc.initial.b, s.bc.final.b, c);

  if (root.contains("solver")) {
    const json& so = root.at("solver");
    if (!so.is_object()) {
      c.add("solver", "must be an object");
    } else {
      check_keys(so, "solver",
                 {"method", "max_iterations", "gradient_tolerance", "cost_tolerance",
                  "armijo_slope", "backtrack_factor", "initial_step", "penalty",
                  "residual_tolerance"},
                 c);
      if (so.contains("method")) {
        const json& m = so.at("method");
        if (!m.is_string()) {
          c.add("solver.method", "must be one of \"fbsm\", \"shooting\", \"both\"");
        } else if (auto parsed = method_from_name(m.get<std::string>())) {
          s.method = *parsed;
        } else {
          c.add("solver.method", "must be one of \"fbsm\", \"shooting\", \"both\"");
        }
      }
      get_integer(so, "solver", "max_iterations", s.solver.max_iterations, c);
      get_number(so, "solver", "gradient_tolerance", s.solver.gradient_tolerance, c);
      get_number(so, "solver", "cost_tolerance", s.solver.cost_tolerance, c);
      get_number(so, "solver", "armijo_slope", s.solver.armijo_slope, c);
      get_number(so, "solver", "backtrack_factor", s.solver.backtrack_factor, c);
      get_number(so, "solver", "initial_step", s.solver.initial_step, c);
      get_number(so, "solver", "residual_tolerance", s.solver.residual_tolerance, c);
      if (so.contains("penalty")) {
        const json& pe = so.at("penalty");
        if (!pe.is_object()) {
          c.add("solver.penalty", "must be an object");
        } else {
          check_keys(pe, "solver.penalty", {"initial", "growth", "max"}, c);
          get_number(pe, "solver.penalty", "initial", s.solver.penalty.initial, c);
          get_number(pe, "solver.penalty", "growth", s.solver.penalty.growth, c);
          get_number(pe, "solver.penalty", "max", s.solver.penalty.max, c);
        }
      }
    }
  }

  if (s.steps < 2) c.add("steps", "must be at least 2");
  s.solver.steps = std::max(s.steps, 2);  // mirrored; invalid values already reported above

  if (c.ok()) {
    for (const Violation& v : validate_scenario(s.bc, s.weights)) c.add(v.field, v.message);
    for (const Violation& v : validate_options(s.solver)) c.add(v.field, v.message);
  }
  if (!c.ok()) throw ScenarioInvalid(std::move(c.msgs));
  s.solver.steps = s.steps;
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioInvalid({path.string() + ": cannot read file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw ScenarioInvalid({path.string() + ": read failed"});
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioFile& s) {
  const auto vehicle = [](const VehicleState& initial, const VehicleState& final_) {
    ordered_json v;
    v["initial"] = {initial.pos1, initial.pos2, initial.heading};
    v["final"] = {final_.pos1, final_.pos2, final_.heading};
    return v;
  };
  ordered_json j;
  j["horizon"] = s.bc.horizon;
  j["steps"] = s.steps;
  j["weights"] = ordered_json{{"delta", s.weights.delta},
                              {"beta", s.weights.beta},
                              {"alpha", s.weights.alpha},
                              {"rho", s.weights.rho}};
  j["vehicle1"] = vehicle(s.bc.initial.a, s.bc.final.a);
  j["vehicle2"] = vehicle(s.bc.initial.b, s.bc.final.b);
  ordered_json so;
  so["method"] = method_name(s.method);
  so["max_iterations"] = s.solver.max_iterations;
  so["gradient_tolerance"] = s.solver.gradient_tolerance;
  so["cost_tolerance"] = s.solver.cost_tolerance;
  so["armijo_slope"] = s.solver.armijo_slope;
  so["backtrack_factor"] = s.solver.backtrack_factor;
  so["initial_step"] = s.solver.initial_step;
  so["penalty"] = ordered_json{{"initial", s.solver.penalty.initial},
                               {"growth", s.solver.penalty.growth},
                               {"max", s.solver.penalty.max}};
  so["residual_tolerance"] = s.solver.residual_tolerance;
  j["solver"] = std::move(so);
  return j.dump(2) + "\n";
}

std::uint64_t scenario_hash(const ScenarioFile& s) { return fnv1a64(serialize_scenario(s)); }

}  // namespace dubinspair
