#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ksweep/harness.hpp"

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ksweep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit sweep solver for the 1D1V Boltzmann-Poisson system"};
  app.require_subcommand(1);

  std::string config_path;
  ksweep::RunOverrides overrides;
  std::string solver, out;
  double eps = 0, dt = 0;

  auto* run = app.add_subcommand("run", "Run one simulation from a config file");
  run->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  auto* solver_opt = run->add_option("--solver", solver, "nls-pic | nls-aa | nest-pic | nest-aa");
  run->add_flag("--ddsa", overrides.ddsa, "Enable drift-diffusion acceleration");
  auto* eps_opt = run->add_option("--eps", eps, "Knudsen number");
  auto* dt_opt = run->add_option("--dt", dt, "Time step");
  auto* out_opt = run->add_option("--out", out, "Output directory");

  std::string study_kind, study_config, study_out;
  auto* study = app.add_subcommand("study", "Run a parameter study");
  study->add_option("kind", study_kind, "efficiency | convergence | contraction")
      ->required()
      ->check(CLI::IsMember({"efficiency", "convergence", "contraction"}));
  study->add_option("--config", study_config, "INI config file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* study_out_opt = study->add_option("--out", study_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    return guarded([&] {
      ksweep::HarnessConfig cfg = ksweep::load_config(config_path);
      if (*solver_opt) overrides.solver = solver;
      if (*eps_opt) overrides.eps = eps;
      if (*dt_opt) overrides.dt = dt;
      if (*out_opt) overrides.out_dir = out;
      ksweep::apply_overrides(cfg, overrides);
      return ksweep::run(cfg, std::cout);
    });
  }
  return guarded([&] {
    ksweep::HarnessConfig cfg = ksweep::load_config(study_config);
    if (*study_out_opt) cfg.out_dir = study_out;
    if (study_kind == "efficiency") {
      ksweep::efficiency_matrix(cfg, std::cout);
    } else if (study_kind == "convergence") {
      const auto rows = ksweep::convergence_study(cfg, std::cout);
      if (rows.size() != cfg.study.levels.size()) return 3;
    } else {
      ksweep::contraction_study(cfg, std::cout);
    }
    return 0;
  });
}
