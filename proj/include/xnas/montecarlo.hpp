#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xnas::mc {

// Stochastic expert-selection study: i.i.d. Gaussian reward streams around
// per-expert biases, XNAS vs the GD-softmax baseline.
struct StochasticConfig {
  int n_experts = 8;
  int steps = 1000;            // T
  int runs = 1000;             // Monte-Carlo trials per sweep point
  double sigma_r = 1.0;
  double grad_bound = 5.0;     // rewards are clipped to +-grad_bound
  double eta = 0.0;            // ignored when eta_auto
  bool eta_auto = true;        // eta = eta*(T, L, N); same eta drives both optimizers
  std::uint64_t seed = 0;
  bool wipeout = true;         // XNAS only; the baseline never wipes
  int threads = 0;             // 0 = hardware concurrency
};

enum class Optimizer { xnas, gd_softmax };
const char* optimizer_name(Optimizer opt);

struct Instance {
  int n_experts = 0;
  int steps = 0;
  std::vector<double> biases;   // N, standard normal
  std::vector<double> rewards;  // T x N, row-major, N(bias_i, sigma^2), unclipped

  double reward(int t, int i) const {
    return rewards[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_experts) +
                   static_cast<std::size_t>(i)];
  }
};

// Deterministic for a fixed stream seed.
Instance sample_instance(std::uint64_t stream_seed, int n_experts, double sigma_r, int steps);

struct TrialOutcome {
  bool correct = false;     // argmax final weight == argmax bias
  double regret = 0.0;      // regret against the best of all original experts
  double gamma_total = 1.0;
  int survivors = 0;
  std::int64_t clipped = 0;     // clipped reward entries across the whole trial
  double bound_slack = 0.0;     // bound - regret (XNAS only; 0 for the baseline)
  int selected = -1;
};

// Linear loss l_t(p) = -r_t . p with axis experts and clipped rewards r_t.
TrialOutcome run_trial(const StochasticConfig& config, Optimizer optimizer,
                       const Instance& instance);

enum class SweepAxis { n_experts, sigma };
const char* axis_name(SweepAxis axis);

struct SweepPoint {
  double value = 0.0;
  Optimizer optimizer;
  double correct_fraction = 0.0;
  double mean_regret = 0.0;
  double std_err = 0.0;        // standard error of the regret mean; 0 for runs == 1
  double mean_gamma = 0.0;
  double clip_rate = 0.0;      // clipped entries / (runs * T * N)
};

struct SweepSummary {
  SweepAxis axis;
  std::vector<SweepPoint> points;
};

// Trials are independent; both optimizers see identical reward instances
// derived from (seed, axis, value, trial index). Results do not depend on
// execution order.
SweepSummary run_sweep(const StochasticConfig& config, SweepAxis axis,
                       const std::vector<double>& axis_values,
                       const std::vector<Optimizer>& optimizers);

}  // namespace xnas::mc
