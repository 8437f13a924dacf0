#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qgraph/run.hpp"

using namespace qgraph;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Result cli(const std::string& args) {
  const std::string cmd = std::string(QGRAPH_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string config(const std::string& name) { return std::string(QGRAPH_CONFIGS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qgraph_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("spectrum task") {
  const Result r = cli("spectrum --config " + config("spectrum_dirichlet.json"));
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("# qgraph 0.1.0\n", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"k", "lambda", "multiplicity"});
  for (int k = 1; k <= 3; ++k) {
    CHECK(rows[static_cast<size_t>(k)][0] == std::to_string(k));
    CHECK(std::stod(rows[static_cast<size_t>(k)][1]) == doctest::Approx(std::pow(k * oracle::pi, 2)).epsilon(1e-12));
    CHECK(rows[static_cast<size_t>(k)][2] == "1");
  }
}

TEST_CASE("flow task") {
  const Result r = cli("flow --config " + config("flow_robin.json"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["spectral_flow"] == -1);
  CHECK(j["maslov_index"] == -1);
  CHECK(j["agree"] == true);
  CHECK(j["version"] == kVersion);
}

TEST_CASE("every shipped config runs") {
  for (const auto& entry : fs::directory_iterator(QGRAPH_CONFIGS)) {
    const auto doc = nlohmann::json::parse(slurp(entry.path()));
    const Result r = cli(doc["task"].get<std::string>() + " --config " + entry.path().string());
    INFO(entry.path().string() << "\n" << r.out);
    CHECK(r.status == 0);
  }
}

TEST_CASE("config errors exit with status 2") {
  const fs::path bad = scratch("bad.json");
  std::ofstream(bad) << "{\n  \"task\": \"spectrum\",\n  \"problem\": {\n}}}\n";
  Result r = cli("spectrum --config " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("line 4") != std::string::npos);

  std::ofstream(bad) << R"({"task": "spectrum", "problem": {"graph": {"builder": "interval", "length": -1},
                           "conditions": {"builder": "dirichlet"}}, "options": {"window": [0, 10]}})";
  r = cli("spectrum --config " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("/problem/graph/length") != std::string::npos);

  std::ofstream(bad) << R"({"task": "spectrum", "problem": {"graph": {"builder": "interval", "length": 1},
                           "conditions": {"builder": "dirichlet"}}, "options": {"window": [10, 0]}})";
  CHECK(cli("spectrum --config " + bad.string()).status == 2);

  std::ofstream(bad) << R"({"task": "spectrum", "problem": {"graph": {"builder": "interval", "length": 1},
                           "conditions": {"builder": "dirichlet"}}, "options": {"window": [0, 10], "colour": 1}})";
  r = cli("spectrum --config " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("colour") != std::string::npos);

  CHECK(cli("spectrum").status == 2);
  CHECK(cli("spectrum --config /nonexistent/x.json").status == 2);
  CHECK(cli("bands --config " + config("spectrum_dirichlet.json")).status == 2);
  CHECK(cli("spectrum --config " + config("spectrum_dirichlet.json") + " --format xml").status == 2);
  CHECK(cli("spectrum --config " + config("spectrum_dirichlet.json") + " --tol -1").status == 2);
}

TEST_CASE("compute errors exit with status 1") {
  const fs::path cfg = scratch("open_gap.json");
  std::ofstream(cfg) << R"({"task": "gap-experiment", "problem": {"kronig_penney": {"p": 1, "alpha": [2.0]}},
                           "options": {"gap": 1}})";
  const Result r = cli("gap-experiment --config " + cfg.string());
  CHECK(r.status == 1);
  CHECK(r.out.find("NotDegenerate") != std::string::npos);
}

TEST_CASE("reruns are bitwise identical") {
  for (const std::string name : {"krein_star.json", "riccati_delta.json", "bands_kp.json"}) {
    const auto doc = nlohmann::json::parse(slurp(config(name)));
    const std::string task = doc["task"];
    const fs::path a = scratch("a_" + name), b = scratch("b_" + name);
    REQUIRE(cli(task + " --config " + config(name) + " --out " + a.string()).status == 0);
    REQUIRE(cli(task + " --config " + config(name) + " --out " + b.string()).status == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
  // a different seed changes the random trials
  const fs::path c = scratch("seed.csv"), d = scratch("seed2.csv");
  REQUIRE(cli("krein-check --config " + config("krein_star.json") + " --out " + c.string()).status == 0);
  REQUIRE(cli("krein-check --config " + config("krein_star.json") + " --seed 99 --out " + d.string()).status == 0);
  CHECK(slurp(c) != slurp(d));
}

TEST_CASE("numbers round-trip") {
  for (double x : {oracle::pi * oracle::pi, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.1}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(format_double(std::nan("")) == "nan");
  const auto rows = csv_rows(cli("spectrum --config " + config("spectrum_dirichlet.json")).out);
  CHECK(std::stod(rows[1][1]) == eigenvalues(build_interval(1.0), dirichlet_pair(2), 0, 100)[0].lambda);
}

TEST_CASE("emit_curves") {
  std::ostringstream empty;
  emit_curves({}, empty);
  CHECK(empty.str() == std::string("# ") + kVersion + "\nt,branch_id,lambda\n");

  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  const MetricGraph g = build_interval(1.0);
  const auto one = track_curves(potential_family(g, dirichlet_pair(2), {Potential::constant(4.0)}), 0.0, 20.0, grid);
  REQUIRE(one.size() == 1);
  std::ostringstream s1;
  emit_curves(one, s1);
  const auto r1 = csv_rows(s1.str());
  REQUIRE(r1.size() == 12);
  for (size_t k = 2; k < r1.size(); ++k) CHECK(std::stod(r1[k][2]) > std::stod(r1[k - 1][2]));

  // two decoupled edges whose levels cross at t = 0
  const MetricGraph pair_g({Edge{"a", 1.0, Potential::constant(0.0)}, Edge{"b", 1.0, Potential::constant(0.0)}});
  const FamilyPath path = potential_family(pair_g, dirichlet_pair(4), {Potential::constant(1.0), Potential::constant(-1.0)}, -1.0, 1.0);
  std::vector<double> tg;
  for (int i = 0; i <= 20; ++i) tg.push_back(-1.0 + i / 10.0);
  const auto two = track_curves(path, 5.0, 15.0, tg);
  REQUIRE(two.size() == 2);
  for (const auto& b : two) {
    const double s = b.lambda.back() > b.lambda.front() ? 1.0 : -1.0;
    for (size_t k = 0; k < b.t.size(); ++k) CHECK(b.lambda[k] == doctest::Approx(oracle::pi * oracle::pi + s * b.t[k]).epsilon(1e-12));
  }
  const fs::path file = scratch("curves.csv");
  emit_curves(two, file.string());
  const auto r2 = csv_rows(slurp(file));
  std::set<std::pair<std::string, std::string>> keys;
  std::set<std::string> ids;
  for (size_t k = 1; k < r2.size(); ++k) {
    CHECK(keys.insert({r2[k][0], r2[k][1]}).second);
    ids.insert(r2[k][1]);
  }
  CHECK(ids.size() == 2);
  CHECK_THROWS_AS(emit_curves(two, "/nonexistent/dir/curves.csv"), Error);
}

TEST_CASE("parse_config") {
  const RunConfig c = parse_config(slurp(config("flow_robin.json")));
  CHECK(c.task == "flow");
  CHECK(c.format == "json");
  CHECK_THROWS_AS(parse_config("{\"task\": \"dance\"}"), Error);
  CHECK_THROWS_AS(parse_config(slurp(config("flow_robin.json")), "bands"), Error);
}
