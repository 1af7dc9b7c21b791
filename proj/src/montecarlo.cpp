#include "xnas/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "xnas/pea.hpp"
#include "xnas/regret.hpp"
#include "xnas/rng.hpp"
#include "xnas/stats.hpp"

namespace xnas::mc {

const char* optimizer_name(Optimizer opt) {
  return opt == Optimizer::xnas ? "xnas" : "gd_softmax";
}

const char* axis_name(SweepAxis axis) { return axis == SweepAxis::n_experts ? "N" : "sigma"; }

Instance sample_instance(std::uint64_t stream_seed, int n_experts, double sigma_r, int steps) {
  if (n_experts < 1 || steps < 1) throw std::invalid_argument("instance dimensions must be >= 1");
  if (!(sigma_r > 0.0)) throw std::invalid_argument("sigma_r must be positive");
  rng::Stream stream(stream_seed);
  Instance inst;
  inst.n_experts = n_experts;
  inst.steps = steps;
  inst.biases.resize(static_cast<std::size_t>(n_experts));
  for (double& b : inst.biases) b = stream.gaussian();
  inst.rewards.resize(static_cast<std::size_t>(n_experts) * static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < n_experts; ++i) {
      inst.rewards[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_experts) +
                   static_cast<std::size_t>(i)] =
          stream.gaussian(inst.biases[static_cast<std::size_t>(i)], sigma_r);
    }
  }
  return inst;
}

namespace {

int argmax_lowest_index(const std::vector<double>& xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    if (xs[static_cast<std::size_t>(i)] > xs[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

double resolve_eta(const StochasticConfig& config, int n_experts) {
  if (!config.eta_auto) return config.eta;
  return regret::optimal_eta(config.steps, config.grad_bound, n_experts).eta_star;
}

}  // namespace

TrialOutcome run_trial(const StochasticConfig& config, Optimizer optimizer,
                       const Instance& instance) {
  const int n = instance.n_experts;
  const int T = instance.steps;
  if (n < 1 || T < 1 || static_cast<int>(instance.biases.size()) != n ||
      instance.rewards.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(T))
    throw std::invalid_argument("instance dimensions do not match");
  const double bound = config.grad_bound;
  const double eta = resolve_eta(config, n);

  TrialOutcome out;
  regret::RegretLedger ledger(n);
  std::vector<double> clipped_row(static_cast<std::size_t>(n));
  std::vector<double> expert_losses(static_cast<std::size_t>(n));

  if (optimizer == Optimizer::xnas) {
    pea::ForecasterState state =
        pea::init_forecaster(n, eta, bound, T, 1.0, config.wipeout);
    pea::RewardVector rv;
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < n; ++i) {
        double r = instance.reward(t, i);
        if (r > bound) {
          r = bound;
          ++out.clipped;
        } else if (r < -bound) {
          r = -bound;
          ++out.clipped;
        }
        clipped_row[static_cast<std::size_t>(i)] = r;
        expert_losses[static_cast<std::size_t>(i)] = -r;
      }
      const pea::MixtureWeights mw = pea::mixture_weights(state);
      double forecaster_loss = 0.0;
      for (std::size_t k = 0; k < state.active.size(); ++k)
        forecaster_loss -= mw.u[k] * clipped_row[static_cast<std::size_t>(state.active[k])];
      rv.values.resize(state.active.size());
      for (std::size_t k = 0; k < state.active.size(); ++k)
        rv.values[k] = clipped_row[static_cast<std::size_t>(state.active[k])];
      pea::eg_step(state, rv);
      const pea::WipeoutEvent ev = pea::wipeout(state);
      regret::record_step(ledger, forecaster_loss, expert_losses, ev.gamma_step);
      regret::record_aux(ledger, forecaster_loss, expert_losses);
    }
    out.survivors = static_cast<int>(state.active.size());
    // Final selection: largest weight among the remaining experts, ties to
    // the lowest index.
    int sel = state.active[0];
    for (int id : state.active) {
      if (state.log_weights[static_cast<std::size_t>(id)] >
          state.log_weights[static_cast<std::size_t>(sel)])
        sel = id;
    }
    out.selected = sel;
    out.gamma_total = ledger.gamma_total();
    out.regret = ledger.regret();
    out.bound_slack = regret::regret_bound(eta, T, bound, n, out.gamma_total) - out.regret;
  } else {
    pea::GdSoftmaxState state = pea::init_gd_softmax(n, eta, 0.0);
    std::vector<double> eff;
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < n; ++i) {
        double r = instance.reward(t, i);
        if (r > bound) {
          r = bound;
          ++out.clipped;
        } else if (r < -bound) {
          r = -bound;
          ++out.clipped;
        }
        clipped_row[static_cast<std::size_t>(i)] = r;
        expert_losses[static_cast<std::size_t>(i)] = -r;
      }
      const pea::MixtureWeights mw = pea::gd_mixture(state);
      double forecaster_loss = 0.0;
      for (int i = 0; i < n; ++i)
        forecaster_loss -= mw.u[static_cast<std::size_t>(i)] * clipped_row[static_cast<std::size_t>(i)];
      eff = pea::gd_softmax_effective_rewards(clipped_row, mw.u);
      for (int i = 0; i < n; ++i)
        state.alpha[static_cast<std::size_t>(i)] += state.eta * eff[static_cast<std::size_t>(i)];
      regret::record_step(ledger, forecaster_loss, expert_losses, 1.0);
      regret::record_aux(ledger, forecaster_loss, expert_losses);
    }
    out.survivors = n;
    out.selected = argmax_lowest_index(state.alpha);
    out.gamma_total = 1.0;
    out.regret = ledger.regret();
    out.bound_slack = 0.0;
  }
  out.correct = out.selected == argmax_lowest_index(instance.biases);
  return out;
}

namespace {

void parallel_trials(int runs, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, runs));
  if (threads == 1) {
    for (int k = 0; k < runs; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int k = next.fetch_add(1); k < runs; k = next.fetch_add(1)) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SweepSummary run_sweep(const StochasticConfig& config, SweepAxis axis,
                       const std::vector<double>& axis_values,
                       const std::vector<Optimizer>& optimizers) {
  if (axis_values.empty()) throw std::invalid_argument("at least one axis value required");
  if (optimizers.empty()) throw std::invalid_argument("at least one optimizer required");
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");

  SweepSummary summary;
  summary.axis = axis;
  const std::uint64_t base = rng::derive(config.seed, "stochastic-instance");

  for (double value : axis_values) {
    StochasticConfig point_cfg = config;
    if (axis == SweepAxis::n_experts) {
      point_cfg.n_experts = static_cast<int>(value);
      if (point_cfg.n_experts < 1 || static_cast<double>(point_cfg.n_experts) != value)
        throw std::invalid_argument("N sweep values must be positive integers");
    } else {
      point_cfg.sigma_r = value;
    }
    const std::uint64_t point_seed = rng::derive(rng::derive(base, axis_name(axis)), value);

    // One outcome slot per (trial, optimizer); the fold below is sequential,
    // so thread scheduling cannot affect the summary.
    std::vector<std::vector<TrialOutcome>> outcomes(
        optimizers.size(), std::vector<TrialOutcome>(static_cast<std::size_t>(config.runs)));
    parallel_trials(config.runs, config.threads, [&](int k) {
      const Instance inst =
          sample_instance(rng::derive(point_seed, static_cast<std::uint64_t>(k)),
                          point_cfg.n_experts, point_cfg.sigma_r, point_cfg.steps);
      for (std::size_t o = 0; o < optimizers.size(); ++o)
        outcomes[o][static_cast<std::size_t>(k)] = run_trial(point_cfg, optimizers[o], inst);
    });

    for (std::size_t o = 0; o < optimizers.size(); ++o) {
      SweepPoint pt;
      pt.value = value;
      pt.optimizer = optimizers[o];
      std::vector<double> regrets(static_cast<std::size_t>(config.runs));
      double correct = 0.0, gamma = 0.0;
      std::int64_t clipped = 0;
      for (int k = 0; k < config.runs; ++k) {
        const TrialOutcome& t = outcomes[o][static_cast<std::size_t>(k)];
        regrets[static_cast<std::size_t>(k)] = t.regret;
        correct += t.correct ? 1.0 : 0.0;
        gamma += t.gamma_total;
        clipped += t.clipped;
      }
      pt.correct_fraction = correct / config.runs;
      pt.mean_regret = stats::mean(regrets);
      pt.std_err = stats::std_error(regrets);
      pt.mean_gamma = gamma / config.runs;
      pt.clip_rate = static_cast<double>(clipped) /
                     (static_cast<double>(config.runs) * point_cfg.steps * point_cfg.n_experts);
      summary.points.push_back(pt);
    }
  }
  return summary;
}

}  // namespace xnas::mc
