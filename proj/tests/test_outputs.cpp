#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "dubinspair/outputs.hpp"

using namespace dubinspair;

namespace {

Solution tiny_solution() {
  BoundaryConditions bc;
  bc.initial = {{0.0, 0.0, 0.0}, {5.0, 0.0, 0.0}};
  bc.final = {{1.0, 0.5, 0.0}, {6.0, 0.5, 0.0}};
  bc.horizon = 2.0;
  SolveOptions o;
  o.steps = 20;
  return fbsm_solve(bc, Weights{1.0, 0.05, 0.05, 1.0}, o);
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("fnv1a64 matches reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
}

TEST_CASE("trajectory csv has the documented schema") {
  const Solution sol = tiny_solution();
  const std::string csv = trajectory_csv(sol);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,x3,y1,y2,y3,u1,u2,v1,v2,p1,p2,p3,p4,p5,p6,H,sep");
  CHECK(count_lines(csv) == 22);  // header + 21 nodes
  std::string row;
  std::getline(in, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 18);
  CHECK(row.substr(0, 2) == "0,");  // t starts at exactly zero
}

TEST_CASE("summary lists every report field in order") {
  const Solution sol = tiny_solution();
  const std::string s = summary_text(sol, 0xdeadbeef12345678ULL);
  const char* keys[] = {"method = ",          "converged = ",       "iterations = ",
                        "final_cost = ",      "terminal_residual =", "max_stationarity = ",
                        "hamiltonian_drift = ", "min_separation = ", "version = ",
                        "scenario_hash = "};
  std::size_t pos = 0;
  for (const char* k : keys) {
    const std::size_t at = s.find(k, pos);
    REQUIRE(at != std::string::npos);
    pos = at;
  }
  CHECK(s.find("scenario_hash = deadbeef12345678\n") != std::string::npos);
  CHECK(count_lines(s) == 10);
}

TEST_CASE("svg plot contains both vehicle paths") {
  const Solution sol = tiny_solution();
  const std::string svg = trajectory_svg(sol);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("#1f6fb4") != std::string::npos);
  CHECK(svg.find("#c23b22") != std::string::npos);
  CHECK(svg.find("vehicle 1") != std::string::npos);
  CHECK(svg.find("vehicle 2") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
       at = svg.find("<polyline", at + 1))
    ++polylines;
  CHECK(polylines == 2);
}

TEST_CASE("write_file creates parents and round-trips bytes") {
  const std::filesystem::path dir =
      std::filesystem::path(DUBINS_WORK_DIR) / "outputs_unit" / "nested";
  const std::filesystem::path file = dir / "blob.bin";
  std::filesystem::remove_all(std::filesystem::path(DUBINS_WORK_DIR) / "outputs_unit");
  const std::string payload("line1\nline2\0tail", 16);  // embedded NUL stays put
  write_file(file, payload);
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == payload);
}
