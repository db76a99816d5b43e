// esmv: verification tool for generalized Einstein-Scalar-Maxwell models
// twisted by flat symplectic vector bundles. Scenario-driven: every command
// reads a scenario file, runs the requested checks, and emits a
// deterministic structured report.

#include "esmv/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string report_path;
  std::vector<std::string> tol_overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_scenario = true) {
  if (needs_scenario)
    cmd->add_option("--scenario", opts.scenario_path, "scenario file (JSON)")->required();
  cmd->add_option("--report", opts.report_path, "report output path (default: stdout)");
  cmd->add_option("--tol", opts.tol_overrides, "tolerance override name=value");
}

esmv::Scenario load(const CommonOpts& opts) {
  esmv::Scenario scenario = esmv::Scenario::from_file(opts.scenario_path);
  for (const std::string& ov : opts.tol_overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw esmv::ParseError("tolerance overrides look like name=value");
    scenario.params.tolerances[ov.substr(0, eq)] = std::stod(ov.substr(eq + 1));
  }
  scenario.params.validate();
  return scenario;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifier for twisted Einstein-Scalar-Maxwell models"};
  app.require_subcommand(1);

  CommonOpts validate_opts, residuals_opts, duality_opts, quantize_opts, holonomy_opts,
      demo_opts;
  int refine = 1;
  bool dump_fields = false;
  int max_len = 4;
  int demo_resolution = 8;
  std::string emit_scenario;

  CLI::App* validate = app.add_subcommand("validate", "run constructor invariants");
  add_common(validate, validate_opts);

  CLI::App* residuals = app.add_subcommand("residuals", "evaluate the field equations");
  add_common(residuals, residuals_opts);
  residuals->add_option("--refine", refine, "also run at this refinement factor");
  residuals->add_flag("--dump-fields", dump_fields, "embed pointwise residual norms");

  CLI::App* duality = app.add_subcommand("duality", "check duality covariance");
  add_common(duality, duality_opts);

  CLI::App* quantize = app.add_subcommand("quantize", "twisted Dirac quantization check");
  add_common(quantize, quantize_opts);

  CLI::App* holonomy = app.add_subcommand("holonomy", "monodromy sample and triviality");
  add_common(holonomy, holonomy_opts);
  holonomy->add_option("--max-len", max_len, "maximum reduced word length");

  CLI::App* demo = app.add_subcommand("ufold-demo", "end-to-end run on the bundled U-fold");
  add_common(demo, demo_opts, false);
  demo->add_option("--resolution", demo_resolution, "grid nodes per direction");
  demo->add_option("--emit-scenario", emit_scenario, "write the bundled scenario file");

  CLI11_PARSE(app, argc, argv);

  try {
    esmv::CommandResult result;
    std::string report_path;
    if (validate->parsed()) {
      result = esmv::cmd_validate(load(validate_opts));
      report_path = validate_opts.report_path;
    } else if (residuals->parsed()) {
      result = esmv::cmd_residuals(load(residuals_opts), refine, dump_fields);
      report_path = residuals_opts.report_path;
    } else if (duality->parsed()) {
      result = esmv::cmd_duality(load(duality_opts));
      report_path = duality_opts.report_path;
    } else if (quantize->parsed()) {
      result = esmv::cmd_quantize(load(quantize_opts));
      report_path = quantize_opts.report_path;
    } else if (holonomy->parsed()) {
      result = esmv::cmd_holonomy(load(holonomy_opts), max_len);
      report_path = holonomy_opts.report_path;
    } else if (demo->parsed()) {
      if (!emit_scenario.empty()) {
        std::ofstream out(emit_scenario, std::ios::binary);
        if (!out) throw esmv::Error("cannot open path: " + emit_scenario);
        out << esmv::bundled_ufold_scenario(demo_resolution).dump(2) << "\n";
      }
      result = esmv::cmd_ufold_demo(demo_resolution);
      report_path = demo_opts.report_path;
    }
    esmv::write_report(result.report, report_path);
    return result.exit_code;
  } catch (const esmv::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const esmv::MissingSection& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const esmv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
