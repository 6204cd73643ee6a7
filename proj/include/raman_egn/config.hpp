#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raman_egn/channel_plan.hpp"
#include "raman_egn/link.hpp"
#include "raman_egn/modulation.hpp"
#include "raman_egn/srs.hpp"

// Configuration ingestion and emission. Input files may use engineering
// units through suffixed keys (GHz, dBm, km, ps/nm/km); everything is
// normalized to SI on load, and the normalized form re-ingests bit for bit.

namespace raman {

struct RunOptions {
  srs::ProfileKind profile = srs::ProfileKind::SimplifiedSrs;
  uint64_t seed = 1;

  double tol_db = 0.05;
  int mc_batch_log2 = 14;
  int mc_cap_log2 = 24;
  int mc_fixed_log2 = 0;  // > 0: fixed sample budget
  bool hyperbolic_d = false;
  bool gn_only = false;

  bool mu_exact_kernel = false;
  int mu_order = 64;
  int mu_cap = 1024;
  double mu_tol = 1e-6;

  int symbols = 8192;
  double phi_max = 1e-4;
  double rolloff = 1e-4;
  double guard = 0.1;
  int discard = 500;

  double ode_step = 100.0;  // m
  bool ode_exact_ratio = false;

  int threads = 0;
};

struct Config {
  double reference_wavelength = 1550e-9;  // m
  ChannelPlan plan;
  Link link;
  FormatRegistry formats;
  RunOptions run;

  double reference_freq() const { return kSpeedOfLightOverLambda(); }

 private:
  double kSpeedOfLightOverLambda() const;
};

struct Violation {
  std::string where;    // e.g. "channel 3", "span 1"
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Normalizes in place (sorts channels, reassigns 1-based indices) and
// reports every invariant violation with its location.
ValidationResult validate(Config& config);

Config load_config(const std::string& path);
Config parse_config_text(const std::string& text);

// Normalized SI form; load(emit(config)) == config bit for bit.
std::string emit_normalized(const Config& config);

}  // namespace raman
