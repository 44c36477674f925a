// Experiment runner: one subcommand per pipeline, JSON config in, CSV/JSON out.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "degenstein/error.hpp"
#include "degenstein/parallel.hpp"
#include "degenstein/pipeline.hpp"

using namespace degenstein;

namespace {

int report_error(ErrorKind kind, const std::string& message) {
  std::cerr << error_json(kind, message) << '\n';
  return static_cast<int>(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenstein: degenerate diffusion experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "no progress lines on stdout");

  std::string example;
  double beta = 1.0;
  auto* check = app.add_subcommand("check", "assumption report for the profile");
  check->add_option("--example", example, "catalog profile instead of the config's")
      ->check(CLI::IsMember({"power", "exp_inv", "exp_zeta_affine", "exp_zeta_log"}));
  auto* beta_opt = check->add_option("--beta", beta, "exponent for power / exp_inv");
  auto* table = app.add_subcommand("table", "coefficient table CSV");
  auto* solve = app.add_subcommand("solve", "regularized solve, snapshots CSV");
  auto* localize = app.add_subcommand("localize", "support tracking and De Giorgi trace");
  auto* kinetic = app.add_subcommand("kinetic-compare", "master equation against the PDE");
  auto* sweep = app.add_subcommand("sweep-eps", "L1 distances across the eps sweep");
  auto* all = app.add_subcommand("run", "table, check, solve and localize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ErrorKind::config, e.what());
  }

  try {
    thread_limit();
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!example.empty()) {
      cfg.profile = ProfileSpec{};
      cfg.profile.kind = example;
      if (example == "exp_zeta_affine") {
        cfg.profile.z0 = 1.0;
        cfg.profile.z1 = 0.5;
      } else if (example == "exp_zeta_log") {
        cfg.profile.z0 = 1.0;
      }
      if (*beta_opt) cfg.profile.beta = beta;
    } else if (*beta_opt) {
      cfg.profile.beta = beta;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    const auto ex = Experiment::build(cfg);
    RunOutputs out{cfg.output_dir, quiet, &std::cout};
    if (*check) run_check(ex, out);
    else if (*table) run_table(ex, out);
    else if (*solve) run_solve(ex, out);
    else if (*localize) run_localize(ex, out);
    else if (*kinetic) run_kinetic_compare(ex, out);
    else if (*sweep) run_sweep(ex, out);
    else if (*all) run_all(ex, out);
  } catch (const Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    const nlohmann::json j{{"error", {{"kind", "internal"}, {"code", 1}, {"message", e.what()}}}};
    std::cerr << j.dump() << '\n';
    return 1;
  }
  return EXIT_SUCCESS;
}
