#pragma once

#include <array>
#include <vector>

namespace xnas::toys {

// Linear loss a*x + b*y + c*z over the 3-simplex.
struct Linear3 {
  double a = 0.0, b = 0.0, c = 0.0;
};

struct Phase3 {
  Linear3 loss;
  int steps = 0;
};

// Region-shift schedule: 2z for 30 steps, then -y-2z for 90 steps.
std::vector<Phase3> default_toy3d_schedule();

enum class Toy2dVariant { linear_balanced, linear_imbalanced, quadratic };
enum class OptimizerTag { xnas, gd_softmax };

const char* optimizer_name(OptimizerTag tag);

// Softmax-parameterized gradient on the 3-simplex:
// d(alpha_z) = z * ((x+y) dz - x dx - y dy), and symmetrically for x, y.
std::array<double, 3> grad_alpha_3d(const std::array<double, 3>& point,
                                    const std::array<double, 3>& loss_gradient);

// 2D case with y = 1-x: d(alpha_x) = x*y*(dx - dy), d(alpha_y) = -d(alpha_x)
// exactly.
std::array<double, 2> grad_alpha_2d(double x, const std::array<double, 2>& loss_gradient);

struct TrajectoryPoint {
  int step = 0;                       // 1-based round index
  OptimizerTag optimizer;
  std::vector<double> mixture;        // pre-update mixture point on the simplex
  std::vector<double> update_terms;   // per-axis reward terms applied this round
  double loss = 0.0;                  // loss at the pre-update point
  double dist_opt = 0.0;              // Euclidean distance to the current optimum set
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
};

struct ToyRunResult {
  Trajectory xnas;
  Trajectory gd;
};

// Axis experts f_x=(1,0,0), f_y=(0,1,0), f_z=(0,0,1), init alpha = 0. The
// same schedule and learning rate drive both optimizers.
ToyRunResult run_toy3d(double eta = 0.1, bool wipeout = false,
                       const std::vector<Phase3>& schedule = default_toy3d_schedule());

ToyRunResult run_toy2d(Toy2dVariant variant, double eta = 0.1, int steps = 50);

}  // namespace xnas::toys
