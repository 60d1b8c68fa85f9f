#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(DUBINS_WORK_DIR) / "cli";

/// Quickly-converging fixture: two short parallel legs, coarse grid.
const char* kSmokeScenario = R"({
  "horizon": 2.0,
  "steps": 150,
  "weights": {"delta": 1.0, "beta": 0.05, "alpha": 0.05, "rho": 1.0},
  "vehicle1": {"initial": [0, 0, 0], "final": [1, 0.5, 0]},
  "vehicle2": {"initial": [5, 0, 0], "final": [6, 0.5, 0]}
})";

int run(const std::string& args) {
  const std::string cmd = std::string("'") + DUBINS_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = kWork / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_scenario(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "scenario.json";
  std::ofstream out(p, std::ios::binary);
  out << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("solve writes artifacts and exits 0") {
  const fs::path dir = fresh_dir("solve_ok");
  const fs::path sc = write_scenario(dir, kSmokeScenario);
  CHECK(run("solve --scenario " + q(sc) + " --out " + q(dir / "out")) == 0);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  CHECK(fs::exists(dir / "out" / "summary.txt"));
  CHECK(fs::exists(dir / "out" / "plot.svg"));

  const std::string summary = slurp(dir / "out" / "summary.txt");
  CHECK(summary.find("method = fbsm") != std::string::npos);
  CHECK(summary.find("converged = true") != std::string::npos);

  std::istringstream csv(slurp(dir / "out" / "trajectory.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,x1,x2,x3,y1,y2,y3,u1,u2,v1,v2,p1,p2,p3,p4,p5,p6,H,sep");
}

TEST_CASE("repeated runs are byte-identical") {
  const fs::path dir = fresh_dir("determinism");
  const fs::path sc = write_scenario(dir, kSmokeScenario);
  REQUIRE(run("solve --scenario " + q(sc) + " --out " + q(dir / "a")) == 0);
  REQUIRE(run("solve --scenario " + q(sc) + " --out " + q(dir / "b")) == 0);
  for (const char* f : {"trajectory.csv", "summary.txt", "plot.svg"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("method override is honored") {
  const fs::path dir = fresh_dir("method_override");
  const fs::path sc = write_scenario(dir, kSmokeScenario);
  CHECK(run("solve --scenario " + q(sc) + " --method shooting --out " + q(dir / "out")) == 0);
  CHECK(slurp(dir / "out" / "summary.txt").find("method = shooting") != std::string::npos);
}

TEST_CASE("input errors exit 1") {
  const fs::path dir = fresh_dir("input_errors");
  CHECK(run("solve --scenario " + q(dir / "missing.json")) == 1);

  const fs::path bad = write_scenario(dir, "{ not json");
  CHECK(run("solve --scenario " + q(bad)) == 1);

  const fs::path sc = write_scenario(dir, kSmokeScenario);
  CHECK(run("solve --scenario " + q(sc) + " --method simplex") == 1);
  CHECK(run("solve --scenario " + q(sc) + " --steps 1") == 1);
  CHECK(run("solve --scenario " + q(sc) + " --bogus-flag") == 1);
  CHECK(run("explode --scenario " + q(sc)) == 1);
  CHECK(run("solve") == 1);
}

TEST_CASE("help exits 0") {
  CHECK(run("--help") == 0);
  CHECK(run("solve --help") == 0);
}

TEST_CASE("non-convergence exits 2") {
  const fs::path dir = fresh_dir("nonconverged");
  const std::string starved = R"({
    "horizon": 2.0,
    "steps": 150,
    "weights": {"delta": 1.0, "beta": 0.05, "alpha": 0.05, "rho": 1.0},
    "vehicle1": {"initial": [0, 0, 0], "final": [1, 0.5, 0]},
    "vehicle2": {"initial": [5, 0, 0], "final": [6, 0.5, 0]},
    "solver": {"max_iterations": 2}
  })";
  const fs::path sc = write_scenario(dir, starved);
  CHECK(run("solve --scenario " + q(sc) + " --out " + q(dir / "out")) == 2);
  // artifacts still describe the best effort
  CHECK(fs::exists(dir / "out" / "summary.txt"));
  CHECK(slurp(dir / "out" / "summary.txt").find("converged = false") != std::string::npos);
}

TEST_CASE("check passes clean runs and fails corrupted gradients") {
  const fs::path dir = fresh_dir("check");
  const fs::path sc = write_scenario(dir, kSmokeScenario);
  CHECK(run("check --scenario " + q(sc) + " --out " + q(dir / "out")) == 0);
  CHECK(run("check --scenario " + q(sc) + " --out " + q(dir / "out2") + " --corrupt-gradient") ==
        3);
}

TEST_CASE("sweep writes one directory per value plus sweep.csv") {
  const fs::path dir = fresh_dir("sweep");
  const fs::path sc = write_scenario(dir, kSmokeScenario);
  CHECK(run("sweep --scenario " + q(sc) + " --out " + q(dir / "out") +
            " --param rho --values 0.5,1.0") == 0);
  CHECK(fs::exists(dir / "out" / "rho_0.5" / "trajectory.csv"));
  CHECK(fs::exists(dir / "out" / "rho_1.0" / "summary.txt"));
  const std::string csv = slurp(dir / "out" / "sweep.csv");
  CHECK(csv.rfind("value,final_cost,min_separation,terminal_residual_norm,iterations,converged",
                  0) == 0);
  CHECK(csv.find("\n0.5,") != std::string::npos);
  CHECK(csv.find("\n1.0,") != std::string::npos);

  CHECK(run("sweep --scenario " + q(sc) + " --param mass --values 1") == 1);
  CHECK(run("sweep --scenario " + q(sc) + " --param rho --values abc") == 1);
  CHECK(run("sweep --scenario " + q(sc) + " --param rho") == 1);
}
