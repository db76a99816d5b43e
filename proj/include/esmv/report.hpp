#pragma once

#include "esmv/scenario.hpp"

namespace esmv {

struct CommandResult {
  Json report;
  int exit_code = 0;  // 0 pass, 1 check-fail (2 = input error, set by the CLI)
};

// Convention block echoed in every report: sign and normalization choices
// are the primary failure mode of this kind of tool, so they ride along
// with every number.
Json conventions_block(const EsmParameters& params);

Json norms_json(const ResidualReport& rep);
Json covariance_json(const CovarianceReport& rep);
Json quantization_json(const QuantizationVerdict& verdict);
Json checks_json(const std::vector<CheckResult>& checks);

CommandResult cmd_validate(const Scenario& scenario);
CommandResult cmd_residuals(const Scenario& scenario, int refine = 1,
                            bool dump_fields = false);
CommandResult cmd_duality(const Scenario& scenario);
CommandResult cmd_quantize(const Scenario& scenario);
CommandResult cmd_holonomy(const Scenario& scenario, int max_len = 4);
CommandResult cmd_ufold_demo(int resolution = 8);

// Serializes with sorted keys and shortest-roundtrip floats; identical
// inputs produce byte-identical files.
void write_report(const Json& report, const std::string& path);
std::string render_report(const Json& report);

}  // namespace esmv
