#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hfv/harness/commands.hpp"

namespace h = hfv::harness;

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous finite-volume harness"};
  app.require_subcommand(1);

  std::string config, records, calib, suite;
  auto* run = app.add_subcommand("run", "run one case and write records, solution and timings");
  run->add_option("--config", config, "case configuration")->required();
  auto* sweep = app.add_subcommand("sweep", "run the configured W list on a mixed pool");
  sweep->add_option("--config", config, "case configuration")->required();
  auto* calibrate = app.add_subcommand("calibrate", "fit performance-model parameters");
  calibrate->add_option("--config", config, "case configuration")->required();
  auto* predict = app.add_subcommand("predict", "compare measured records with model predictions");
  predict->add_option("--records", records, "records CSV")->required();
  predict->add_option("--calib", calib, "calibration CSV")->required();
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "mms, shock, couette or decomp")->required();
  verify->add_option("--config", config, "case configuration (suite default when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : h::kExitConfig;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  return h::guarded(err, [&] {
    if (*run) return h::cmd_run(h::load_config(config), out);
    if (*sweep) return h::cmd_sweep(h::load_config(config), out, err);
    if (*calibrate) return h::cmd_calibrate(h::load_config(config), out);
    if (*predict) return h::cmd_predict(records, calib, out);
    const h::CaseConfig c = config.empty() ? h::parse_config_string(h::default_suite_config(suite)) : h::load_config(config);
    return h::cmd_verify(suite, c, out);
  });
}
