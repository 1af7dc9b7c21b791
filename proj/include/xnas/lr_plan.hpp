#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace xnas::lrplan {

// Search schedule parameters from which per-cell-type horizons follow.
// `validation_size` counts per-example feedbacks per epoch; forecasters of a
// cell type replicated r_c times receive r_c feedbacks per example.
struct SearchSchedule {
  std::int64_t validation_size = 0;                         // d
  int epochs = 0;                                           // E
  std::vector<std::pair<std::string, int>> replications;    // cell type -> r_c, in config order
  double grad_bound = 1.0;                                  // L
  int experts_per_forecaster = 0;                           // N
};

// T_c = d * E * r_c.
std::int64_t effective_horizon(const SearchSchedule& schedule, const std::string& cell_type);

struct RatePlanEntry {
  std::string cell_type;
  std::int64_t horizon = 0;
  double eta_star = 0.0;
};

// One optimal learning rate per cell type, in the schedule's order.
std::vector<RatePlanEntry> plan(const SearchSchedule& schedule);

}  // namespace xnas::lrplan
