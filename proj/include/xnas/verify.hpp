#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xnas::verify {

// Randomized trial suite for the safe-wipeout lemma, the wipeout-factor
// bounds, and the regret bound. Each trial draws N, T, eta, and a table of
// uniform rewards in [-L, L], runs the forecaster with wipeout at zeta = 1,
// and checks every property against an independent tally of the reward table.
struct SuiteConfig {
  std::int64_t trials = 10000;
  std::uint64_t seed = 7;
  int max_experts = 16;
  int max_steps = 64;
  double grad_bound = 1.0;
  bool collect_rows = false;  // emit one bound-report CSV row per trial
};

struct SuiteReport {
  std::int64_t trials = 0;
  std::int64_t safe_wipeout_failures = 0;  // hindsight-best expert wiped
  std::int64_t gamma_failures = 0;    // gamma_T outside [1, N)
  std::int64_t bound_failures = 0;    // regret above the bound (+1e-9)
  std::int64_t cap_failures = 0;      // eta* trials above L*sqrt(2 T ln N) (+1e-9)
  std::int64_t eta_star_trials = 0;
  double min_bound_slack = 0.0;
  double min_gamma = 0.0;
  double max_gamma_margin = 0.0;  // max of gamma_T / N, must stay below 1
  std::vector<std::string> csv_rows;

  bool passed() const {
    return safe_wipeout_failures == 0 && gamma_failures == 0 && bound_failures == 0 &&
           cap_failures == 0;
  }
};

SuiteReport run_suite(const SuiteConfig& config);

// Deterministic human-readable report, one line per property.
std::string report_text(const SuiteConfig& config, const SuiteReport& report);

}  // namespace xnas::verify
