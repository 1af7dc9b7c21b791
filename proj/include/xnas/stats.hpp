#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace xnas::stats {

double mean(std::span<const double> xs);

// Standard error of the mean; 0 for fewer than two samples.
double std_error(std::span<const double> xs);

// Spearman rank correlation. Ties get average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

// Residual sum of squares of the one-parameter least-squares fit y ~ c*g.
double fit_scale_residual(std::span<const double> y, std::span<const double> g);

}  // namespace xnas::stats
