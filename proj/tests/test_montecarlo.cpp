#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "xnas/montecarlo.hpp"
#include "xnas/pea.hpp"
#include "xnas/regret.hpp"
#include "xnas/stats.hpp"

using namespace xnas;

TEST_CASE("sample_instance is deterministic and concentrates around the biases") {
  const auto a = mc::sample_instance(42, 4, 1.0, 1000);
  const auto b = mc::sample_instance(42, 4, 1.0, 1000);
  CHECK(a.biases == b.biases);
  CHECK(a.rewards == b.rewards);
  const auto c = mc::sample_instance(43, 4, 1.0, 1000);
  CHECK(a.rewards != c.rewards);

  // Gaussian concentration: the sample mean of each expert's rewards stays
  // within 4 sigma / sqrt(T) of its bias for >= 99% of experts.
  int within = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = mc::sample_instance(seed, 8, 1.0, 1000);
    for (int i = 0; i < inst.n_experts; ++i) {
      double mean = 0.0;
      for (int t = 0; t < inst.steps; ++t) mean += inst.reward(t, i);
      mean /= inst.steps;
      total += 1;
      if (std::abs(mean - inst.biases[static_cast<std::size_t>(i)]) <= 4.0 / std::sqrt(1000.0)) ++within;
    }
  }
  CHECK(static_cast<double>(within) / total >= 0.99);
}

TEST_CASE("sample_instance near-zero noise collapses rewards to the biases") {
  const auto inst = mc::sample_instance(7, 5, 1e-12, 20);
  for (int t = 0; t < inst.steps; ++t) {
    for (int i = 0; i < inst.n_experts; ++i) {
      CHECK(inst.reward(t, i) == doctest::Approx(inst.biases[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("run_trial on a single expert is trivially correct") {
  mc::StochasticConfig cfg;
  cfg.n_experts = 1;
  cfg.steps = 50;
  cfg.eta_auto = false;  // eta* is undefined for N = 1
  cfg.eta = 0.1;
  const auto inst = mc::sample_instance(3, 1, 1.0, 50);
  const auto out = mc::run_trial(cfg, mc::Optimizer::xnas, inst);
  CHECK(out.correct);
  CHECK(out.regret == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.survivors == 1);
}

TEST_CASE("run_trial in the near-deterministic limit selects the top bias") {
  mc::StochasticConfig cfg;
  cfg.n_experts = 6;
  cfg.steps = 200;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = mc::sample_instance(seed, 6, 1e-9, 200);
    const auto xn = mc::run_trial(cfg, mc::Optimizer::xnas, inst);
    CHECK(xn.correct);
  }
}

TEST_CASE("xnas selection equals the argmax of cumulative clipped rewards") {
  mc::StochasticConfig cfg;
  cfg.n_experts = 8;
  cfg.steps = 300;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto inst = mc::sample_instance(seed, 8, 2.0, 300);
    const auto out = mc::run_trial(cfg, mc::Optimizer::xnas, inst);
    std::vector<double> cumulative(8, 0.0);
    for (int t = 0; t < inst.steps; ++t) {
      for (int i = 0; i < 8; ++i)
        cumulative[static_cast<std::size_t>(i)] +=
            std::clamp(inst.reward(t, i), -cfg.grad_bound, cfg.grad_bound);
    }
    const int brute = static_cast<int>(
        std::max_element(cumulative.begin(), cumulative.end()) - cumulative.begin());
    CHECK(out.selected == brute);
    // The regret bound holds on every trial; rewards are clipped so its
    // precondition is satisfied.
    CHECK(out.bound_slack >= -1e-9);
    CHECK(out.gamma_total >= 1.0);
    CHECK(out.gamma_total < 8.0);
  }
}

TEST_CASE("run_trial matches the generic per-round composition") {
  // The trial's vectorized path must agree with driving pea rounds with
  // explicit axis experts.
  mc::StochasticConfig cfg;
  cfg.n_experts = 4;
  cfg.steps = 60;
  const auto inst = mc::sample_instance(55, 4, 1.5, 60);
  const auto fast = mc::run_trial(cfg, mc::Optimizer::xnas, inst);

  const double eta = regret::optimal_eta(60, cfg.grad_bound, 4).eta_star;
  auto state = pea::init_forecaster(4, eta, cfg.grad_bound, 60, 1.0, true);
  std::vector<std::vector<double>> axes(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  for (int t = 0; t < 60; ++t) {
    std::vector<double> grad(4);
    for (int i = 0; i < 4; ++i)
      grad[static_cast<std::size_t>(i)] =
          -std::clamp(inst.reward(t, i), -cfg.grad_bound, cfg.grad_bound);
    std::vector<std::vector<double>> preds;
    for (int id : state.active) preds.push_back(axes[static_cast<std::size_t>(id)]);
    pea::xnas_round(state, grad, preds);
  }
  int sel = state.active[0];
  for (int id : state.active) {
    if (state.log_weights[static_cast<std::size_t>(id)] > state.log_weights[static_cast<std::size_t>(sel)])
      sel = id;
  }
  CHECK(sel == fast.selected);
  CHECK(static_cast<int>(state.active.size()) == fast.survivors);
}

TEST_CASE("run_sweep is reproducible and aggregates sanely") {
  mc::StochasticConfig cfg;
  cfg.runs = 40;
  cfg.steps = 120;
  cfg.seed = 99;
  const std::vector<double> ns = {2, 4};
  const std::vector<mc::Optimizer> opts = {mc::Optimizer::xnas, mc::Optimizer::gd_softmax};
  const auto a = mc::run_sweep(cfg, mc::SweepAxis::n_experts, ns, opts);
  const auto b = mc::run_sweep(cfg, mc::SweepAxis::n_experts, ns, opts);
  REQUIRE(a.points.size() == 4);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].correct_fraction == b.points[i].correct_fraction);
    CHECK(a.points[i].mean_regret == b.points[i].mean_regret);
    CHECK(a.points[i].std_err == b.points[i].std_err);
    CHECK(a.points[i].correct_fraction >= 0.0);
    CHECK(a.points[i].correct_fraction <= 1.0);
  }

  // Thread count must not change the summary.
  auto serial = cfg;
  serial.threads = 1;
  const auto c = mc::run_sweep(serial, mc::SweepAxis::n_experts, ns, opts);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].mean_regret == c.points[i].mean_regret);
  }

  // Degenerate statistics: one run reports a zero standard error.
  auto one = cfg;
  one.runs = 1;
  const auto d = mc::run_sweep(one, mc::SweepAxis::n_experts, {2}, {mc::Optimizer::xnas});
  CHECK(d.points[0].std_err == 0.0);
}

TEST_CASE("sigma sweep: correct fraction falls with noise, xnas stays ahead") {
  mc::StochasticConfig cfg;
  cfg.n_experts = 8;
  cfg.runs = 400;
  cfg.steps = 400;
  cfg.seed = 1234;
  const std::vector<double> sigmas = {0.5, 4.0, 16.0};
  const auto summary = mc::run_sweep(cfg, mc::SweepAxis::sigma,
                                     sigmas, {mc::Optimizer::xnas, mc::Optimizer::gd_softmax});
  std::vector<double> xn_frac, gd_frac;
  for (const auto& pt : summary.points) {
    (pt.optimizer == mc::Optimizer::xnas ? xn_frac : gd_frac).push_back(pt.correct_fraction);
  }
  REQUIRE(xn_frac.size() == 3);
  CHECK(xn_frac[0] >= xn_frac[1]);
  CHECK(xn_frac[1] >= xn_frac[2]);
  CHECK(gd_frac[0] >= gd_frac[1]);
  CHECK(gd_frac[1] >= gd_frac[2]);
  for (std::size_t i = 0; i < 3; ++i) CHECK(xn_frac[i] >= gd_frac[i]);
}

TEST_CASE("N sweep: fraction and regret move oppositely (Spearman < 0)") {
  mc::StochasticConfig cfg;
  cfg.runs = 300;
  cfg.steps = 400;
  cfg.sigma_r = 4.0;  // hard enough that the fraction clearly drops with N
  cfg.seed = 555;
  const std::vector<double> ns = {2, 4, 8, 16, 32};
  const auto summary =
      mc::run_sweep(cfg, mc::SweepAxis::n_experts, ns, {mc::Optimizer::xnas, mc::Optimizer::gd_softmax});
  for (auto opt : {mc::Optimizer::xnas, mc::Optimizer::gd_softmax}) {
    std::vector<double> frac, reg;
    for (const auto& pt : summary.points) {
      if (pt.optimizer != opt) continue;
      frac.push_back(pt.correct_fraction);
      reg.push_back(pt.mean_regret);
    }
    CHECK(stats::spearman(frac, reg) < 0.0);
  }
}
