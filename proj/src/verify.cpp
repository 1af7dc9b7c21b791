#include "xnas/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xnas/csv.hpp"
#include "xnas/pea.hpp"
#include "xnas/regret.hpp"
#include "xnas/rng.hpp"

namespace xnas::verify {

SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport report;
  report.trials = config.trials;
  report.min_bound_slack = std::numeric_limits<double>::infinity();
  report.min_gamma = std::numeric_limits<double>::infinity();
  report.max_gamma_margin = 0.0;

  const std::uint64_t base = rng::derive(config.seed, "verify-suite");
  const double bound_l = config.grad_bound;

  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    rng::Stream stream(rng::derive(base, static_cast<std::uint64_t>(trial)));
    const int n = stream.uniform_int(2, config.max_experts);
    const int t_total = stream.uniform_int(1, config.max_steps);
    // Half the trials run at the theory rate (checked against the cap as
    // well), half at a random rate.
    const bool use_eta_star = trial % 2 == 0;
    const regret::EtaPlan plan = regret::optimal_eta(t_total, bound_l, n);
    const double eta = use_eta_star
                           ? plan.eta_star
                           : std::exp(stream.uniform(std::log(1e-2), std::log(2.0)));

    pea::ForecasterState state = pea::init_forecaster(n, eta, bound_l, t_total, 1.0, true);
    regret::RegretLedger ledger(n);
    std::vector<double> rewards(static_cast<std::size_t>(n));
    std::vector<double> cumulative(static_cast<std::size_t>(n), 0.0);
    std::vector<double> expert_losses(static_cast<std::size_t>(n));
    pea::RewardVector rv;

    for (int t = 0; t < t_total; ++t) {
      for (int i = 0; i < n; ++i) {
        rewards[static_cast<std::size_t>(i)] = stream.uniform(-bound_l, bound_l);
        cumulative[static_cast<std::size_t>(i)] += rewards[static_cast<std::size_t>(i)];
        expert_losses[static_cast<std::size_t>(i)] = -rewards[static_cast<std::size_t>(i)];
      }
      const pea::MixtureWeights mw = pea::mixture_weights(state);
      double forecaster_loss = 0.0;
      for (std::size_t k = 0; k < state.active.size(); ++k)
        forecaster_loss -= mw.u[k] * rewards[static_cast<std::size_t>(state.active[k])];
      rv.values.resize(state.active.size());
      for (std::size_t k = 0; k < state.active.size(); ++k)
        rv.values[k] = rewards[static_cast<std::size_t>(state.active[k])];
      pea::eg_step(state, rv);
      const pea::WipeoutEvent ev = pea::wipeout(state);
      regret::record_step(ledger, forecaster_loss, expert_losses, ev.gamma_step);
      regret::record_aux(ledger, forecaster_loss, expert_losses);
    }

    // Safe wipeout: the cumulative-reward maximizer must still be active.
    // Active sets only shrink, so membership at T implies membership at
    // every step.
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (cumulative[static_cast<std::size_t>(i)] > cumulative[static_cast<std::size_t>(best)]) best = i;
    }
    if (std::find(state.active.begin(), state.active.end(), best) == state.active.end())
      ++report.safe_wipeout_failures;

    // Wipeout factor: 1 <= gamma_T < N.
    const double gamma = ledger.gamma_total();
    if (!(gamma >= 1.0 && gamma < static_cast<double>(n))) ++report.gamma_failures;
    report.min_gamma = std::min(report.min_gamma, gamma);
    report.max_gamma_margin = std::max(report.max_gamma_margin, gamma / static_cast<double>(n));

    // Realized regret within the bound.
    const double realized = ledger.regret();
    const double bound = regret::regret_bound(eta, t_total, bound_l, n, gamma);
    const double slack = bound - realized;
    report.min_bound_slack = std::min(report.min_bound_slack, slack);
    if (realized > bound + 1e-9) ++report.bound_failures;
    if (use_eta_star) {
      ++report.eta_star_trials;
      if (realized > plan.regret_cap + 1e-9) ++report.cap_failures;
    }

    if (config.collect_rows) {
      regret::BoundReport br;
      br.regret = realized;
      br.bound = bound;
      br.eta_used = eta;
      br.gamma_total = gamma;
      br.slack = slack;
      report.csv_rows.push_back(regret::bound_report_csv_row(trial, n, t_total, br));
    }
  }
  return report;
}

std::string report_text(const SuiteConfig& config, const SuiteReport& report) {
  using io::format_number;
  std::string text;
  const auto line = [&](const char* name, std::int64_t failures, const std::string& detail) {
    text += failures == 0 ? "PASS " : "FAIL ";
    text += name;
    text += ": ";
    text += detail;
    text += '\n';
  };
  text += "verify: trials=" + format_number(report.trials) +
          " seed=" + format_number(static_cast<std::int64_t>(config.seed)) +
          " max_experts=" + format_number(config.max_experts) +
          " max_steps=" + format_number(config.max_steps) +
          " grad_bound=" + format_number(config.grad_bound) + "\n";
  line("safe-wipeout", report.safe_wipeout_failures,
       format_number(report.safe_wipeout_failures) + " incorrect wipeouts of the hindsight-best expert");
  line("wipeout-factor", report.gamma_failures,
       format_number(report.gamma_failures) + " trials outside 1 <= gamma_T < N (min gamma " +
           format_number(report.min_gamma) + ", max gamma/N " +
           format_number(report.max_gamma_margin) + ")");
  line("regret-bound", report.bound_failures,
       format_number(report.bound_failures) + " trials above the bound (min slack " +
           format_number(report.min_bound_slack) + ")");
  line("regret-cap", report.cap_failures,
       format_number(report.cap_failures) + " of " + format_number(report.eta_star_trials) +
           " eta* trials above L*sqrt(2 T ln N)");
  text += report.passed() ? "verify: PASS\n" : "verify: FAIL\n";
  return text;
}

}  // namespace xnas::verify
