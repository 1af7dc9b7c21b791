#pragma once

#include <span>
#include <vector>

namespace xnas::pea {

// Mixture weights over the active experts, aligned with ForecasterState::active.
// Nonnegative, sum to one.
struct MixtureWeights {
  std::vector<double> u;
};

// One round of rewards, aligned with the active set. Entries are clamped to
// [-grad_bound, +grad_bound] at construction; `clipped` counts how many
// entries the clamp actually changed.
struct RewardVector {
  std::vector<double> values;
  int clipped = 0;
};

// Record of one wipeout decision.
struct WipeoutEvent {
  int step = 0;
  std::vector<int> wiped;      // original expert ids removed this round
  double threshold = 0.0;      // theta_t in weight space (0 when wipeout is off)
  double gamma_step = 1.0;     // Gamma_t = 1 + wiped mass / surviving mass
};

// Forecaster over N experts with multiplicative-weight updates and wipeout.
// Weights are kept in log domain so long horizons cannot overflow; all
// comparisons and mass ratios are evaluated on the represented values.
struct ForecasterState {
  std::vector<double> log_weights;  // ln v per original expert; stale once wiped
  std::vector<int> active;          // sorted original ids, never empty
  int step = 0;
  int horizon = 1;
  double eta = 0.0;
  double grad_bound = 0.0;
  double zeta = 1.0;
  bool wipeout_enabled = true;

  int n_experts() const { return static_cast<int>(log_weights.size()); }
};

ForecasterState init_forecaster(int n_experts, double eta, double grad_bound,
                                int horizon, double zeta = 1.0,
                                bool wipeout_enabled = true);

MixtureWeights mixture_weights(const ForecasterState& state);

// Convex combination of the active experts' predictions.
std::vector<double> predict(const ForecasterState& state,
                            const std::vector<std::vector<double>>& expert_predictions);

// R_i = -(loss_gradient . f_i), clamped to [-grad_bound, grad_bound].
RewardVector rewards_from_gradient(std::span<const double> loss_gradient,
                                   const std::vector<std::vector<double>>& expert_predictions,
                                   double grad_bound);

RewardVector clip_rewards(std::vector<double> values, double grad_bound);

// v_i <- v_i * exp(eta * R_i) for the active experts; advances the step count.
void eg_step(ForecasterState& state, const RewardVector& rewards);

// Removes experts strictly below theta_t = max_i v_i * exp(-2*eta*L*(T-t)*zeta).
// The leader is never below its own threshold, so the active set stays
// non-empty. No-op (Gamma_t = 1) when wipeout is disabled.
WipeoutEvent wipeout(ForecasterState& state);

struct RoundResult {
  std::vector<double> prediction;  // pre-update mixture prediction
  RewardVector rewards;
  WipeoutEvent wipeout;
};

// One full round: predict, rewards, EG step, wipeout, in that order.
RoundResult xnas_round(ForecasterState& state, std::span<const double> loss_gradient,
                       const std::vector<std::vector<double>>& expert_predictions);

// Gradient-descent-with-softmax baseline. Updates alpha_i = ln v_i by
// descending the loss; no wipeout in this baseline.
struct GdSoftmaxState {
  std::vector<double> alpha;
  double eta = 0.0;
  double weight_decay = 0.0;

  int n_experts() const { return static_cast<int>(alpha.size()); }
};

GdSoftmaxState init_gd_softmax(int n_experts, double eta, double weight_decay = 0.0);
GdSoftmaxState init_gd_softmax(std::vector<double> alpha, double eta,
                               double weight_decay = 0.0);

MixtureWeights gd_mixture(const GdSoftmaxState& state);

// Effective per-expert rewards of the baseline: R~_i = u_i * (R_i - sum_j u_j R_j),
// which equals -grad(loss) . u_i (f_i - p).
std::vector<double> gd_softmax_effective_rewards(std::span<const double> rewards,
                                                 std::span<const double> u);
std::vector<double> gd_softmax_effective_rewards(const RewardVector& rewards,
                                                 const MixtureWeights& u);

struct GdRoundResult {
  std::vector<double> prediction;
  std::vector<double> effective_rewards;
};

// One baseline round: predict from softmax(alpha), then
// alpha_i <- alpha_i + eta * R~_i - eta * weight_decay * alpha_i.
GdRoundResult gd_softmax_round(GdSoftmaxState& state, std::span<const double> loss_gradient,
                               const std::vector<std::vector<double>>& expert_predictions);

}  // namespace xnas::pea
