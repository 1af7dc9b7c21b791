#include "xnas/regret.hpp"

#include <algorithm>
#include <cmath>

#include "xnas/csv.hpp"

namespace xnas::regret {

RegretLedger::RegretLedger(int n_experts) {
  if (n_experts < 1) throw std::invalid_argument("ledger needs at least one expert");
  expert_cumloss.assign(static_cast<std::size_t>(n_experts), 0.0);
  aux_expert.assign(static_cast<std::size_t>(n_experts), 0.0);
}

double RegretLedger::regret() const {
  const double best = *std::min_element(expert_cumloss.begin(), expert_cumloss.end());
  return forecaster_cumloss - best;
}

double RegretLedger::gamma_total() const { return std::exp(gamma_log); }

void record_step(RegretLedger& ledger, double forecaster_loss,
                 std::span<const double> expert_losses, double gamma_step) {
  if (expert_losses.size() != ledger.expert_cumloss.size())
    throw std::invalid_argument("one loss per original expert required");
  if (!(gamma_step >= 1.0)) throw std::invalid_argument("gamma_step must be >= 1");
  if (!std::isfinite(forecaster_loss)) throw std::invalid_argument("non-finite forecaster loss");
  for (double l : expert_losses) {
    if (!std::isfinite(l)) throw std::invalid_argument("non-finite expert loss");
  }
  ledger.forecaster_cumloss += forecaster_loss;
  for (std::size_t i = 0; i < expert_losses.size(); ++i) ledger.expert_cumloss[i] += expert_losses[i];
  ledger.gamma_log += std::log(gamma_step);
  ++ledger.steps;
}

void record_aux(RegretLedger& ledger, double aux_forecaster_loss,
                std::span<const double> aux_expert_losses) {
  if (aux_expert_losses.size() != ledger.aux_expert.size())
    throw std::invalid_argument("one auxiliary loss per original expert required");
  ledger.aux_forecaster += aux_forecaster_loss;
  for (std::size_t i = 0; i < aux_expert_losses.size(); ++i)
    ledger.aux_expert[i] += aux_expert_losses[i];
}

double regret_bound(double eta, std::int64_t horizon, double grad_bound, int n_experts,
                    double gamma_total) {
  if (!(eta > 0.0) || !(grad_bound > 0.0) || horizon < 1 || n_experts < 1)
    throw std::invalid_argument("regret_bound needs positive parameters");
  // gamma_T lies in [1, N); a lone expert can only ever have gamma_T = 1.
  const bool gamma_ok =
      gamma_total >= 1.0 &&
      (gamma_total < static_cast<double>(n_experts) || (n_experts == 1 && gamma_total == 1.0));
  if (!gamma_ok) throw std::invalid_argument("gamma_total outside [1, N)");
  return eta * static_cast<double>(horizon) * grad_bound * grad_bound / 2.0 +
         std::log(static_cast<double>(n_experts)) / eta - std::log(gamma_total) / eta;
}

EtaPlan optimal_eta(std::int64_t horizon, double grad_bound, int n_experts) {
  if (horizon < 1 || !(grad_bound > 0.0) || n_experts < 1)
    throw std::invalid_argument("optimal_eta needs positive parameters");
  if (n_experts == 1) throw SingleExpertError{};
  const double t = static_cast<double>(horizon);
  const double log_n = std::log(static_cast<double>(n_experts));
  EtaPlan plan;
  plan.eta_star = std::sqrt(2.0 * log_n / (t * grad_bound * grad_bound));
  plan.regret_cap = grad_bound * std::sqrt(2.0 * t * log_n);
  return plan;
}

const char* bound_report_csv_header() {
  return "trial_id,N,T,eta,gamma_T,regret,bound,slack";
}

std::string bound_report_csv_row(std::int64_t trial_id, int n_experts, std::int64_t horizon,
                                 const BoundReport& report) {
  using io::format_number;
  std::string row;
  row += format_number(trial_id);
  row += ',';
  row += format_number(n_experts);
  row += ',';
  row += format_number(horizon);
  row += ',';
  row += format_number(report.eta_used);
  row += ',';
  row += format_number(report.gamma_total);
  row += ',';
  row += format_number(report.regret);
  row += ',';
  row += format_number(report.bound);
  row += ',';
  row += format_number(report.slack);
  return row;
}

}  // namespace xnas::regret
