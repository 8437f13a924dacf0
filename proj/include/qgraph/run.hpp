#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qgraph/kronig_penney.hpp"

namespace qgraph {

inline constexpr const char* kVersion = "qgraph 0.1.0";

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"spectrum",    "slopes",        "flow",    "bands",
                                              "krein-check", "riccati-check", "scaling", "gap-experiment"};
  return names;
}

struct RunConfig {
  std::string task;
  nlohmann::json problem = nlohmann::json::object();
  nlohmann::json options = nlohmann::json::object();
  std::string out_path;  // empty: stdout
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::optional<double> tol;
};

// Parses and schema-checks a config document; throws Error(ConfigError) with line or field diagnostics.
RunConfig parse_config(const std::string& text, const std::string& task_override = "");
RunConfig load_config(const std::string& path, const std::string& task_override = "");

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json summary = nlohmann::json::object();  // scalar results (JSON output)
};

Table execute(const RunConfig& cfg);

void write_csv(const Table& t, std::ostream& os);
void write_json(const Table& t, const std::string& task, std::ostream& os);

// Full run: config validation, execution, output. Returns the exit status 0 / 1 / 2.
int run(const RunConfig& cfg, std::ostream& err);

// Long-format (t, branch_id, lambda) CSV.
void emit_curves(const std::vector<Branch>& branches, const std::string& path);
void emit_curves(const std::vector<Branch>& branches, std::ostream& os);

std::string format_double(double x);

}  // namespace qgraph
