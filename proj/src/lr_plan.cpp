#include "xnas/lr_plan.hpp"

#include <stdexcept>

#include "xnas/regret.hpp"

namespace xnas::lrplan {

namespace {
void validate(const SearchSchedule& s) {
  if (s.validation_size < 1) throw std::invalid_argument("validation_size must be >= 1");
  if (s.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (s.replications.empty()) throw std::invalid_argument("at least one cell type required");
  for (const auto& [name, r] : s.replications) {
    if (r < 1) throw std::invalid_argument("replications for '" + name + "' must be >= 1");
  }
  if (!(s.grad_bound > 0.0)) throw std::invalid_argument("grad_bound must be positive");
  if (s.experts_per_forecaster < 1) throw std::invalid_argument("experts_per_forecaster must be >= 1");
}
}  // namespace

std::int64_t effective_horizon(const SearchSchedule& schedule, const std::string& cell_type) {
  validate(schedule);
  for (const auto& [name, r] : schedule.replications) {
    if (name == cell_type)
      return schedule.validation_size * static_cast<std::int64_t>(schedule.epochs) *
             static_cast<std::int64_t>(r);
  }
  throw std::invalid_argument("unknown cell type: " + cell_type);
}

std::vector<RatePlanEntry> plan(const SearchSchedule& schedule) {
  validate(schedule);
  std::vector<RatePlanEntry> entries;
  entries.reserve(schedule.replications.size());
  for (const auto& [name, r] : schedule.replications) {
    RatePlanEntry e;
    e.cell_type = name;
    e.horizon = effective_horizon(schedule, name);
    e.eta_star =
        regret::optimal_eta(e.horizon, schedule.grad_bound, schedule.experts_per_forecaster).eta_star;
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace xnas::lrplan
