#pragma once
#include <string>
#include <vector>

#include "cqnls/evolution.hpp"
#include "cqnls/model.hpp"

namespace cqnls {

// audit selections for the cli verify/atlas subcommands
struct AuditSelection {
  std::vector<std::string> phases = {"conj2", "plain2", "mixed"};
  double dyad_lo = 0.125;
  double dyad_hi = 8.0;
  int n_samples = 20000;
  int a_variant = 1;
  double mixed_C = 16.0;
};

struct RunConfig {
  SimConfig sim;
  RawParams raw{2, 3, 1};
  bool use_raw = false;  // normalize raw coefficients instead of taking beta
  AuditSelection audits;
  std::string out_dir = ".";
  std::string prefix = "run";
  std::string text;  // the source document, echoed into every artifact
};

// INI-style key/value document with [grid] [model] [evolution] [audits]
// [output] sections; unknown keys, malformed values, and constraint
// violations raise ConfigError with line/column positions
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace cqnls
