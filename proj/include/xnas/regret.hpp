#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xnas::regret {

// Cumulative loss accounting for one run. Regret is always measured against
// every original expert, wiped or not; a correct wipeout never removes the
// loss minimizer, so this matches the hindsight definition while also
// catching an incorrect wipeout.
struct RegretLedger {
  double forecaster_cumloss = 0.0;
  std::vector<double> expert_cumloss;   // per original expert
  double aux_forecaster = 0.0;          // sum of linearized losses at p_t
  std::vector<double> aux_expert;       // per original expert
  double gamma_log = 0.0;               // sum of ln Gamma_t
  int steps = 0;

  explicit RegretLedger(int n_experts);

  double regret() const;       // L_t - min_i L_{t,i}
  double gamma_total() const;  // gamma_T = exp(gamma_log)
};

void record_step(RegretLedger& ledger, double forecaster_loss,
                 std::span<const double> expert_losses, double gamma_step);

// Auxiliary (linearized) losses, recorded separately; for linear losses they
// coincide with the real ones.
void record_aux(RegretLedger& ledger, double aux_forecaster_loss,
                std::span<const double> aux_expert_losses);

// eta*T*L^2/2 + ln(N)/eta - ln(gamma_T)/eta.
double regret_bound(double eta, std::int64_t horizon, double grad_bound, int n_experts,
                    double gamma_total);

struct EtaPlan {
  double eta_star;    // sqrt(2 ln N / (T L^2))
  double regret_cap;  // L sqrt(2 T ln N)
};

// Throws SingleExpertError for n_experts == 1 (ln 1 = 0 leaves eta undefined).
EtaPlan optimal_eta(std::int64_t horizon, double grad_bound, int n_experts);

struct SingleExpertError : std::invalid_argument {
  SingleExpertError() : std::invalid_argument("optimal eta is undefined for a single expert") {}
};

struct BoundReport {
  double regret = 0.0;
  double bound = 0.0;
  double eta_used = 0.0;
  double gamma_total = 1.0;
  double slack = 0.0;  // bound - regret
};

// One CSV row: trial_id, N, T, eta, gamma_T, regret, bound, slack.
std::string bound_report_csv_row(std::int64_t trial_id, int n_experts, std::int64_t horizon,
                                 const BoundReport& report);
const char* bound_report_csv_header();

}  // namespace xnas::regret
