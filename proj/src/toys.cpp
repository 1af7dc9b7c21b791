#include "xnas/toys.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xnas/pea.hpp"

namespace xnas::toys {

std::vector<Phase3> default_toy3d_schedule() {
  return {{Linear3{0.0, 0.0, 2.0}, 30}, {Linear3{0.0, -1.0, -2.0}, 90}};
}

const char* optimizer_name(OptimizerTag tag) {
  return tag == OptimizerTag::xnas ? "xnas" : "gd_softmax";
}

std::array<double, 3> grad_alpha_3d(const std::array<double, 3>& point,
                                    const std::array<double, 3>& loss_gradient) {
  const auto [x, y, z] = point;
  const auto [dx, dy, dz] = loss_gradient;
  return {
      x * ((y + z) * dx - y * dy - z * dz),
      y * ((x + z) * dy - x * dx - z * dz),
      z * ((x + y) * dz - x * dx - y * dy),
  };
}

std::array<double, 2> grad_alpha_2d(double x, const std::array<double, 2>& loss_gradient) {
  const double g = x * (1.0 - x) * (loss_gradient[0] - loss_gradient[1]);
  return {g, -g};
}

namespace {

std::vector<std::vector<double>> axis_experts(int n) {
  std::vector<std::vector<double>> f(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  return f;
}

double distance_to_point(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(s);
}

// Distance from a simplex point to the loss-minimizing subset of the simplex
// (the hull of the minimum-coefficient corners of a linear loss).
double distance_to_optimum_3d(const std::vector<double>& p, const Linear3& loss) {
  const std::array<double, 3> c = {loss.a, loss.b, loss.c};
  const double cmin = *std::min_element(c.begin(), c.end());
  std::vector<int> corners;
  for (int i = 0; i < 3; ++i) {
    if (c[static_cast<std::size_t>(i)] == cmin) corners.push_back(i);
  }
  if (corners.size() == 3) return 0.0;  // whole simplex optimal
  if (corners.size() == 1) {
    std::vector<double> q(3, 0.0);
    q[static_cast<std::size_t>(corners[0])] = 1.0;
    return distance_to_point(p, q);
  }
  // Two optimal corners: project onto the connecting segment.
  const int i = corners[0], j = corners[1];
  const double pi = p[static_cast<std::size_t>(i)], pj = p[static_cast<std::size_t>(j)];
  double s = (pi - pj + 1.0) / 2.0;  // minimizer of the squared distance along the segment
  s = std::clamp(s, 0.0, 1.0);
  std::vector<double> q(3, 0.0);
  q[static_cast<std::size_t>(i)] = s;
  q[static_cast<std::size_t>(j)] = 1.0 - s;
  return distance_to_point(p, q);
}

struct Loss2 {
  bool quadratic = false;
  // Linear part: coefficient on x is -1 for the linear variants.
  double value(double x, double y) const {
    if (quadratic) return 0.5 * (x - 1.0) * (x - 1.0) + 0.5 * y * y;
    return -x;
  }
  std::array<double, 2> gradient(double x, double y) const {
    if (quadratic) return {x - 1.0, y};
    return {-1.0, 0.0};
  }
};

}  // namespace

ToyRunResult run_toy3d(double eta, bool wipeout, const std::vector<Phase3>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule must have at least one phase");
  int total = 0;
  double max_coeff = 0.0;
  for (const auto& ph : schedule) {
    if (ph.steps < 1) throw std::invalid_argument("phase step counts must be >= 1");
    total += ph.steps;
    max_coeff = std::max({max_coeff, std::abs(ph.loss.a), std::abs(ph.loss.b), std::abs(ph.loss.c)});
  }
  // Reward bound: axis rewards equal the loss coefficients, so the bound is
  // the largest coefficient magnitude (2 for the default schedule).
  const double grad_bound = std::max(1.0, max_coeff);
  const auto experts = axis_experts(3);

  pea::ForecasterState fc = pea::init_forecaster(3, eta, grad_bound, total, 1.0, wipeout);
  pea::GdSoftmaxState gd = pea::init_gd_softmax(3, eta, 0.0);

  ToyRunResult out;
  int step = 0;
  for (const auto& ph : schedule) {
    const std::array<double, 3> g = {ph.loss.a, ph.loss.b, ph.loss.c};
    for (int s = 0; s < ph.steps; ++s) {
      ++step;
      // XNAS: the mixture over the active axes, embedded back into 3D.
      {
        const std::vector<int> active_ids = fc.active;  // ids before the round
        const auto mw = pea::mixture_weights(fc);
        std::vector<double> point(3, 0.0);
        for (std::size_t k = 0; k < active_ids.size(); ++k)
          point[static_cast<std::size_t>(active_ids[k])] = mw.u[k];
        std::vector<std::vector<double>> preds;
        preds.reserve(active_ids.size());
        for (int id : active_ids) preds.push_back(experts[static_cast<std::size_t>(id)]);
        const auto round = pea::xnas_round(fc, g, preds);
        std::vector<double> updates(3, 0.0);
        for (std::size_t k = 0; k < round.rewards.values.size(); ++k)
          updates[static_cast<std::size_t>(active_ids[k])] = round.rewards.values[k];
        const double loss_val = g[0] * point[0] + g[1] * point[1] + g[2] * point[2];
        out.xnas.points.push_back({step, OptimizerTag::xnas, point, updates, loss_val,
                                   distance_to_optimum_3d(point, ph.loss)});
      }
      // GD with softmax.
      {
        const auto mw = pea::gd_mixture(gd);
        const std::vector<double> point = mw.u;
        const auto round = pea::gd_softmax_round(gd, g, experts);
        const double loss_val = g[0] * point[0] + g[1] * point[1] + g[2] * point[2];
        out.gd.points.push_back({step, OptimizerTag::gd_softmax, point, round.effective_rewards,
                                 loss_val, distance_to_optimum_3d(point, ph.loss)});
      }
    }
  }
  return out;
}

ToyRunResult run_toy2d(Toy2dVariant variant, double eta, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  Loss2 loss;
  std::vector<double> init_alpha = {0.0, 0.0};
  switch (variant) {
    case Toy2dVariant::linear_balanced:
      break;
    case Toy2dVariant::linear_imbalanced:
      init_alpha = {0.0, 5.0};
      break;
    case Toy2dVariant::quadratic:
      loss.quadratic = true;
      break;
  }
  const auto experts = axis_experts(2);
  const std::vector<double> optimum = {1.0, 0.0};

  pea::ForecasterState fc = pea::init_forecaster(2, eta, 1.0, steps, 1.0, false);
  fc.log_weights = init_alpha;
  pea::GdSoftmaxState gd = pea::init_gd_softmax(init_alpha, eta, 0.0);

  ToyRunResult out;
  for (int s = 1; s <= steps; ++s) {
    {
      const auto mw = pea::mixture_weights(fc);
      const std::vector<double>& point = mw.u;
      const auto g = loss.gradient(point[0], point[1]);
      const auto round = pea::xnas_round(fc, g, experts);
      out.xnas.points.push_back({s, OptimizerTag::xnas, point, round.rewards.values,
                                 loss.value(point[0], point[1]),
                                 distance_to_point(point, optimum)});
    }
    {
      const auto mw = pea::gd_mixture(gd);
      const std::vector<double> point = mw.u;
      const auto g = loss.gradient(point[0], point[1]);
      const auto round = pea::gd_softmax_round(gd, g, experts);
      out.gd.points.push_back({s, OptimizerTag::gd_softmax, point, round.effective_rewards,
                               loss.value(point[0], point[1]),
                               distance_to_point(point, optimum)});
    }
  }
  return out;
}

}  // namespace xnas::toys
