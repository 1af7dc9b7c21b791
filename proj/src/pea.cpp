#include "xnas/pea.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace xnas::pea {

namespace {

void check_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " has a non-finite entry");
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  std::vector<double> u(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    u[i] = std::exp(logits[i] - m);
    s += u[i];
  }
  for (double& x : u) x /= s;
  return u;
}

double logsumexp(std::span<const double> xs) {
  double m = xs[0];
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> weighted_sum(std::span<const double> u,
                                 const std::vector<std::vector<double>>& preds) {
  const std::size_t dim = preds[0].size();
  for (const auto& f : preds) {
    if (f.size() != dim) throw std::invalid_argument("expert predictions disagree on dimension");
  }
  std::vector<double> p(dim, 0.0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) p[d] += u[i] * preds[i][d];
  }
  return p;
}

}  // namespace

ForecasterState init_forecaster(int n_experts, double eta, double grad_bound,
                                int horizon, double zeta, bool wipeout_enabled) {
  if (n_experts < 1) throw std::invalid_argument("n_experts must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (!(grad_bound > 0.0) || !std::isfinite(grad_bound))
    throw std::invalid_argument("grad_bound must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(zeta > 0.0) || zeta > 1.0) throw std::invalid_argument("zeta must lie in (0, 1]");

  ForecasterState s;
  s.log_weights.assign(static_cast<std::size_t>(n_experts), 0.0);  // v = 1
  s.active.resize(static_cast<std::size_t>(n_experts));
  for (int i = 0; i < n_experts; ++i) s.active[static_cast<std::size_t>(i)] = i;
  s.step = 0;
  s.horizon = horizon;
  s.eta = eta;
  s.grad_bound = grad_bound;
  s.zeta = zeta;
  s.wipeout_enabled = wipeout_enabled;
  return s;
}

MixtureWeights mixture_weights(const ForecasterState& state) {
  std::vector<double> logits(state.active.size());
  for (std::size_t k = 0; k < state.active.size(); ++k)
    logits[k] = state.log_weights[static_cast<std::size_t>(state.active[k])];
  return MixtureWeights{softmax(logits)};
}

std::vector<double> predict(const ForecasterState& state,
                            const std::vector<std::vector<double>>& expert_predictions) {
  if (expert_predictions.size() != state.active.size())
    throw std::invalid_argument("one prediction per active expert required");
  const MixtureWeights mw = mixture_weights(state);
  return weighted_sum(mw.u, expert_predictions);
}

RewardVector clip_rewards(std::vector<double> values, double grad_bound) {
  RewardVector r;
  r.values = std::move(values);
  for (double& x : r.values) {
    if (x > grad_bound) {
      x = grad_bound;
      ++r.clipped;
    } else if (x < -grad_bound) {
      x = -grad_bound;
      ++r.clipped;
    }
  }
  return r;
}

RewardVector rewards_from_gradient(std::span<const double> loss_gradient,
                                   const std::vector<std::vector<double>>& expert_predictions,
                                   double grad_bound) {
  check_finite(loss_gradient, "loss gradient");
  std::vector<double> values(expert_predictions.size());
  for (std::size_t i = 0; i < expert_predictions.size(); ++i) {
    const auto& f = expert_predictions[i];
    if (f.size() != loss_gradient.size())
      throw std::invalid_argument("gradient and prediction dimensions differ");
    double dot = 0.0;
    for (std::size_t d = 0; d < f.size(); ++d) dot += loss_gradient[d] * f[d];
    values[i] = -dot;
  }
  return clip_rewards(std::move(values), grad_bound);
}

void eg_step(ForecasterState& state, const RewardVector& rewards) {
  if (rewards.values.size() != state.active.size())
    throw std::invalid_argument("rewards must cover exactly the active set");
  if (state.step >= state.horizon)
    throw std::invalid_argument("eg_step past the horizon");
  for (std::size_t k = 0; k < state.active.size(); ++k)
    state.log_weights[static_cast<std::size_t>(state.active[k])] += state.eta * rewards.values[k];
  ++state.step;
}

WipeoutEvent wipeout(ForecasterState& state) {
  WipeoutEvent ev;
  ev.step = state.step;
  if (!state.wipeout_enabled) return ev;

  double max_log = state.log_weights[static_cast<std::size_t>(state.active[0])];
  for (int id : state.active)
    max_log = std::max(max_log, state.log_weights[static_cast<std::size_t>(id)]);
  const double gap =
      2.0 * state.eta * state.grad_bound * static_cast<double>(state.horizon - state.step) * state.zeta;
  const double log_theta = max_log - gap;
  ev.threshold = std::exp(log_theta);

  std::vector<int> survivors;
  std::vector<double> wiped_logs;
  survivors.reserve(state.active.size());
  for (int id : state.active) {
    // Strict comparison: a weight exactly at the threshold survives.
    if (state.log_weights[static_cast<std::size_t>(id)] < log_theta) {
      ev.wiped.push_back(id);
      wiped_logs.push_back(state.log_weights[static_cast<std::size_t>(id)]);
    } else {
      survivors.push_back(id);
    }
  }
  if (!ev.wiped.empty()) {
    std::vector<double> survivor_logs;
    survivor_logs.reserve(survivors.size());
    for (int id : survivors) survivor_logs.push_back(state.log_weights[static_cast<std::size_t>(id)]);
    ev.gamma_step = 1.0 + std::exp(logsumexp(wiped_logs) - logsumexp(survivor_logs));
    state.active = std::move(survivors);
  }
  return ev;
}

RoundResult xnas_round(ForecasterState& state, std::span<const double> loss_gradient,
                       const std::vector<std::vector<double>>& expert_predictions) {
  RoundResult r;
  r.prediction = predict(state, expert_predictions);
  r.rewards = rewards_from_gradient(loss_gradient, expert_predictions, state.grad_bound);
  eg_step(state, r.rewards);
  r.wipeout = wipeout(state);
  return r;
}

GdSoftmaxState init_gd_softmax(int n_experts, double eta, double weight_decay) {
  if (n_experts < 1) throw std::invalid_argument("n_experts must be >= 1");
  return init_gd_softmax(std::vector<double>(static_cast<std::size_t>(n_experts), 0.0), eta,
                         weight_decay);
}

GdSoftmaxState init_gd_softmax(std::vector<double> alpha, double eta, double weight_decay) {
  if (alpha.empty()) throw std::invalid_argument("alpha must be non-empty");
  check_finite(alpha, "alpha");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be nonnegative");
  GdSoftmaxState s;
  s.alpha = std::move(alpha);
  s.eta = eta;
  s.weight_decay = weight_decay;
  return s;
}

MixtureWeights gd_mixture(const GdSoftmaxState& state) {
  return MixtureWeights{softmax(state.alpha)};
}

std::vector<double> gd_softmax_effective_rewards(std::span<const double> rewards,
                                                 std::span<const double> u) {
  if (rewards.size() != u.size())
    throw std::invalid_argument("rewards and mixture must cover the same index set");
  double mean_reward = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mean_reward += u[i] * rewards[i];
  std::vector<double> eff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) eff[i] = u[i] * (rewards[i] - mean_reward);
  return eff;
}

std::vector<double> gd_softmax_effective_rewards(const RewardVector& rewards,
                                                 const MixtureWeights& u) {
  return gd_softmax_effective_rewards(rewards.values, u.u);
}

GdRoundResult gd_softmax_round(GdSoftmaxState& state, std::span<const double> loss_gradient,
                               const std::vector<std::vector<double>>& expert_predictions) {
  if (expert_predictions.size() != state.alpha.size())
    throw std::invalid_argument("one prediction per expert required");
  check_finite(loss_gradient, "loss gradient");
  const MixtureWeights mw = gd_mixture(state);
  GdRoundResult r;
  r.prediction = weighted_sum(mw.u, expert_predictions);
  std::vector<double> raw(expert_predictions.size());
  for (std::size_t i = 0; i < expert_predictions.size(); ++i) {
    const auto& f = expert_predictions[i];
    if (f.size() != loss_gradient.size())
      throw std::invalid_argument("gradient and prediction dimensions differ");
    double dot = 0.0;
    for (std::size_t d = 0; d < f.size(); ++d) dot += loss_gradient[d] * f[d];
    raw[i] = -dot;
  }
  r.effective_rewards = gd_softmax_effective_rewards(raw, mw.u);
  for (std::size_t i = 0; i < state.alpha.size(); ++i) {
    state.alpha[i] += state.eta * r.effective_rewards[i] - state.eta * state.weight_decay * state.alpha[i];
  }
  return r;
}

}  // namespace xnas::pea
