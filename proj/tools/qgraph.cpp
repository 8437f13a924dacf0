#include <CLI11.hpp>
#include <iostream>

#include "qgraph/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectra, slopes and spectral flow for Schroedinger operators on metric graphs", "qgraph"};
  app.set_version_flag("--version", std::string(qgraph::kVersion));

  std::string config, out, format;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("--config", config, "run configuration (JSON)")->required();
  auto* out_opt = app.add_option("--out", out, "output file (default: stdout)");
  auto* fmt_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed for randomized checks");
  auto* tol_opt = app.add_option("--tol", tol, "root acceptance tolerance")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> subs{
      {"spectrum", "eigenvalues in a window"},
      {"slopes", "Hadamard slopes of a family at (t0, lambda)"},
      {"flow", "spectral flow and Maslov index through lambda0"},
      {"bands", "Kronig-Penney band structure"},
      {"krein-check", "Krein weak-form residuals on random data"},
      {"riccati-check", "Riccati equation residuals for a family"},
      {"scaling", "Hadamard-Rellich scaling slopes"},
      {"gap-experiment", "gap opening under a perturbation of alpha_0"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  qgraph::RunConfig cfg;
  try {
    cfg = qgraph::load_config(config, task);
  } catch (const qgraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == qgraph::ErrorKind::ConfigError ? 2 : 1;
  }
  if (out_opt->count()) cfg.out_path = out;
  if (fmt_opt->count()) cfg.format = format;
  if (seed_opt->count()) cfg.seed = seed;
  if (tol_opt->count()) cfg.tol = tol;
  return qgraph::run(cfg, std::cerr);
}
