#include "dubinspair/outputs.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "dubinspair/pmp.hpp"
#include "dubinspair/version.hpp"

namespace dubinspair {

std::string format_double(double value) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Fixed 3-decimal form for SVG coordinates; full precision is pointless at
/// screen resolution and this keeps the file compact.
std::string svg_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const Solution& sol) {
  std::string out = "t,x1,x2,x3,y1,y2,y3,u1,u2,v1,v2,p1,p2,p3,p4,p5,p6,H,sep\n";
  const TimeGrid& g = sol.states.grid;
  for (int k = 0; k < g.nodes(); ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    const PairState& x = sol.states.nodes[ki];
    const ControlPair& c = sol.controls.nodes[ki];
    const Costate& p = sol.costates.nodes[ki];
    const double ham = hamiltonian(x, p, c, sol.weights);
    const double sep = std::sqrt(separation_sq(x));
    const double row[19] = {g.time(k), x.a.pos1, x.a.pos2, x.a.heading, x.b.pos1, x.b.pos2,
                            x.b.heading, c.u1,    c.u2,     c.v1,        c.v2,     p.p1,
                            p.p2,       p.p3,     p.p4,     p.p5,        p.p6,     ham,
                            sep};
    for (int i = 0; i < 19; ++i) {
      if (i > 0) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string summary_text(const Solution& sol, std::uint64_t scenario_hash) {
  const SolveReport& r = sol.report;
  std::string out;
  out += "method = " + r.method + "\n";
  out += std::string("converged = ") + (r.converged ? "true" : "false") + "\n";
  out += "iterations = " + std::to_string(r.iterations) + "\n";
  out += "final_cost = " + format_double(r.final_cost) + "\n";
  out += "terminal_residual =";
  for (const double v : r.terminal_residual) out += " " + format_double(v);
  out += "\n";
  out += "max_stationarity = " + format_double(r.max_stationarity) + "\n";
  out += "hamiltonian_drift = " + format_double(r.hamiltonian_drift) + "\n";
  out += "min_separation = " + format_double(r.min_separation) + "\n";
  out += std::string("version = ") + kVersion + "\n";
  out += "scenario_hash = " + hex16(scenario_hash) + "\n";
  return out;
}

std::string trajectory_svg(const Solution& sol) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kMargin = 48.0;

  double xmin = sol.states.nodes[0].a.pos1;
  double xmax = xmin;
  double ymin = sol.states.nodes[0].a.pos2;
  double ymax = ymin;
  for (const PairState& s : sol.states.nodes) {
    for (const VehicleState* v : {&s.a, &s.b}) {
      xmin = std::min(xmin, v->pos1);
      xmax = std::max(xmax, v->pos1);
      ymin = std::min(ymin, v->pos2);
      ymax = std::max(ymax, v->pos2);
    }
  }
  const double dx = std::max(xmax - xmin, 1e-9);
  const double dy = std::max(ymax - ymin, 1e-9);
  const double scale = std::min((kWidth - 2 * kMargin) / dx, (kHeight - 2 * kMargin) / dy);
  const double offx = (kWidth - scale * dx) / 2.0;
  const double offy = (kHeight - scale * dy) / 2.0;
  const auto px = [&](double x) { return offx + (x - xmin) * scale; };
  const auto py = [&](double y) { return kHeight - offy - (y - ymin) * scale; };

  const char* colors[2] = {"#1f6fb4", "#c23b22"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(kWidth) + "\" height=\"" +
         svg_num(kHeight) + "\" viewBox=\"0 0 " + svg_num(kWidth) + " " + svg_num(kHeight) +
         "\">\n";
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int vi = 0; vi < 2; ++vi) {
    out += "  <polyline fill=\"none\" stroke=\"" + std::string(colors[vi]) +
           "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const PairState& s : sol.states.nodes) {
      const VehicleState& v = (vi == 0) ? s.a : s.b;
      if (!first) out += ' ';
      out += svg_num(px(v.pos1)) + "," + svg_num(py(v.pos2));
      first = false;
    }
    out += "\"/>\n";
    const VehicleState& start = (vi == 0) ? sol.states.nodes.front().a : sol.states.nodes.front().b;
    const VehicleState& end = (vi == 0) ? sol.states.nodes.back().a : sol.states.nodes.back().b;
    out += "  <circle cx=\"" + svg_num(px(start.pos1)) + "\" cy=\"" + svg_num(py(start.pos2)) +
           "\" r=\"4\" fill=\"" + colors[vi] + "\"/>\n";
    out += "  <rect x=\"" + svg_num(px(end.pos1) - 4) + "\" y=\"" + svg_num(py(end.pos2) - 4) +
           "\" width=\"8\" height=\"8\" fill=\"" + colors[vi] + "\"/>\n";
    const double ly = 24.0 + 18.0 * vi;
    out += "  <line x1=\"24\" y1=\"" + svg_num(ly) + "\" x2=\"48\" y2=\"" + svg_num(ly) +
           "\" stroke=\"" + colors[vi] + "\" stroke-width=\"1.5\"/>\n";
    out += "  <text x=\"56\" y=\"" + svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"13\">vehicle " + std::to_string(vi + 1) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (!path.parent_path().empty()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
      throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " +
                               ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out.good()) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dubinspair
