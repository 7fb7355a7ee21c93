#include "pvm/app/commands.hpp"
#include "pvm/app/verify.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"pvm: polytope volume monitoring experiments"};
  app.set_version_flag("--version", PVM_VERSION);
  app.require_subcommand(1);

  pvm::app::SimulateOptions sim;
  std::string filter_name;
  auto* simulate = app.add_subcommand("simulate", "run one scenario with one filter");
  simulate->add_option("--config", sim.config_path, "TOML config file")->required();
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  simulate->add_option("--filter", filter_name, "proposed or baseline")
      ->check(CLI::IsMember({"proposed", "baseline"}));
  simulate->add_option("--case", sim.case_index, "k_v case, 1-based")->check(CLI::PositiveNumber);
  simulate->add_flag("--timing", sim.timing, "write measured solve times (not reproducible)");

  pvm::app::CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "run both filters on every k_v case");
  compare->add_option("--config", cmp.config_path, "TOML config file")->required();
  compare->add_option("--out", cmp.out_dir, "output directory")->required();
  compare->add_flag("--timing", cmp.timing, "write measured solve times (not reproducible)");

  pvm::app::VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "run the built-in oracle suites");
  verify->add_flag("--quick", ver.quick, "reduced sample counts");
  verify->add_flag("--inject-fault", ver.inject_fault, "perturb results to test the checks");
  verify->add_option("--seed", ver.seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pvm::app::kConfigError;
  }

  if (*simulate) {
    if (filter_name == "proposed") sim.filter = pvm::sim::FilterKind::Proposed;
    if (filter_name == "baseline") sim.filter = pvm::sim::FilterKind::Baseline;
    return pvm::app::cmd_simulate(sim);
  }
  if (*compare) return pvm::app::cmd_compare(cmp);
  return pvm::app::cmd_verify(ver, std::cout);
}
