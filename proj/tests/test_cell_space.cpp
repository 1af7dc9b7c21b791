#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "xnas/cell_space.hpp"
#include "xnas/pea.hpp"
#include "xnas/rng.hpp"
#include "xnas/stats.hpp"

using namespace xnas;

namespace {

cell::CellBuildConfig small_build(std::uint64_t seed = 1) {
  cell::CellBuildConfig cfg;
  cfg.n_inputs = 2;
  cfg.n_nodes = 1;
  cfg.feature_dim = 4;
  cfg.experts_per_edge = 5;
  cfg.eta_arch = 0.05;
  cfg.horizon = 100;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::vector<double>> gaussian_inputs(int n, int d, rng::Stream& stream) {
  std::vector<std::vector<double>> xs(static_cast<std::size_t>(n),
                                      std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& x : xs) {
    for (double& v : x) v = stream.gaussian();
  }
  return xs;
}

}  // namespace

TEST_CASE("forward with identity experts and uniform mixtures sums the inputs") {
  auto c = make_cell_graph(small_build());
  // Force every expert to the identity.
  for (auto& edge : c.edges) {
    for (auto& op : edge.experts) {
      op.kind = cell::ExpertKind::identity;
      op.weight.clear();
    }
  }
  rng::Stream stream(5);
  const auto inputs = gaussian_inputs(2, 4, stream);
  const auto out = cell::forward(c, inputs);
  for (int d = 0; d < 4; ++d) {
    CHECK(out[static_cast<std::size_t>(d)] ==
          doctest::Approx(inputs[0][static_cast<std::size_t>(d)] + inputs[1][static_cast<std::size_t>(d)])
              .epsilon(1e-12));
  }
}

TEST_CASE("a single active expert collapses forward to the discrete forward") {
  auto c = make_cell_graph(small_build(7));
  // Wipe all but expert 2 on every edge.
  for (auto& edge : c.edges) {
    edge.forecaster.active = {2};
  }
  rng::Stream stream(6);
  const auto inputs = gaussian_inputs(2, 4, stream);
  cell::DiscreteCell d;
  d.n_inputs = 2;
  d.node_edges = {{{0, 2}, {1, 2}}};
  const auto mixture_out = cell::forward(c, inputs);
  const auto discrete_out = cell::discrete_forward(c, d, inputs);
  for (std::size_t i = 0; i < mixture_out.size(); ++i)
    CHECK(mixture_out[i] == doctest::Approx(discrete_out[i]).epsilon(1e-12));
}

TEST_CASE("planted targets have zero loss under the planted cell") {
  auto c = make_cell_graph(small_build(11));
  rng::Stream plant(rng::derive(11, "planted-cell"));
  const auto planted = cell::random_planted_cell(c, plant);
  rng::Stream data(17);
  const auto sample = cell::sample_round(c, planted, 0.0, data);
  const auto predicted = cell::apply_readout(c, cell::discrete_forward(c, planted, sample.inputs));
  for (std::size_t i = 0; i < predicted.size(); ++i)
    CHECK(predicted[i] == doctest::Approx(sample.target[i]).epsilon(1e-12));
}

TEST_CASE("forward is linear in each edge's mixture coefficients") {
  auto c = make_cell_graph(small_build(13));
  rng::Stream stream(19);
  const auto inputs = gaussian_inputs(2, 4, stream);
  std::vector<std::vector<double>> u(c.edges.size());
  for (std::size_t e = 0; e < c.edges.size(); ++e) u[e] = cell::mixture_of(c, static_cast<int>(e));

  const auto base = cell::forward_with_mixtures(c, inputs, u).output;
  auto u2 = u;
  for (double& v : u2[0]) v *= 2.0;  // double one edge's coefficients
  const auto doubled = cell::forward_with_mixtures(c, inputs, u2).output;
  // Node 2 is the only intermediate; its edge-0 contribution doubles.
  const auto zero = [&] {
    auto uz = u;
    for (double& v : uz[0]) v = 0.0;
    return cell::forward_with_mixtures(c, inputs, uz).output;
  }();
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(doubled[i] - zero[i] == doctest::Approx(2.0 * (base[i] - zero[i])).epsilon(1e-10));
  }
}

TEST_CASE("per-edge architecture gradients match finite differences") {
  // Two intermediate nodes so that edge gradients flow through downstream
  // mixtures as well.
  cell::CellBuildConfig bc = small_build(23);
  bc.n_nodes = 2;
  auto c = make_cell_graph(bc);
  rng::Stream stream(29);
  const auto inputs = gaussian_inputs(2, 4, stream);
  std::vector<double> target(4);
  for (double& v : target) v = stream.gaussian();

  std::vector<std::vector<double>> u(c.edges.size());
  for (std::size_t e = 0; e < c.edges.size(); ++e) u[e] = cell::mixture_of(c, static_cast<int>(e));

  const auto loss_at = [&](const std::vector<std::vector<double>>& mixtures) {
    const auto out = cell::forward_with_mixtures(c, inputs, mixtures).output;
    const auto y = cell::apply_readout(c, out);
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) l += 0.5 * (y[i] - target[i]) * (y[i] - target[i]);
    return l;
  };

  // Analytic per-edge gradients via one xnas probe round (rewards = -grad.f).
  const auto trace = cell::forward_with_mixtures(c, inputs, u);
  const auto y = cell::apply_readout(c, trace.output);
  // d loss / d u_i of edge e equals grad_p . f_i; compare against the
  // finite difference of the mixture coefficient.
  const double h = 1e-6;
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    for (std::size_t i = 0; i < u[e].size(); ++i) {
      auto hi = u, lo = u;
      hi[e][i] += h;
      lo[e][i] -= h;
      const double fd = (loss_at(hi) - loss_at(lo)) / (2.0 * h);
      // Analytic: adjoint of the edge's destination dotted with f_i. Recover
      // it from a fresh backward pass through pea rewards: build the
      // downstream adjoint numerically instead via a tiny offset trick.
      // Simplest exact route: gradient = d loss / d u_i with everything else
      // fixed, which equals grad_out^T d out/d u_i; use the linearity check:
      auto probe = u;
      probe[e][i] += 1.0;
      const auto out_probe = cell::forward_with_mixtures(c, inputs, probe).output;
      std::vector<double> dout(out_probe.size());
      for (std::size_t k = 0; k < dout.size(); ++k) dout[k] = out_probe[k] - trace.output[k];
      const auto y_probe = cell::apply_readout(c, dout);
      double analytic = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) analytic += (y[k] - target[k]) * y_probe[k];
      const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-4});
      CHECK(std::abs(fd - analytic) / denom < 1e-5);
    }
  }
}

TEST_CASE("search arch gradients agree with finite differences of the val loss") {
  // End-to-end check of the adjoints actually used by run_search, via the
  // recorded first-round log-weight movement.
  cell::SearchConfig cfg;
  cfg.n_nodes = 2;
  cfg.feature_dim = 4;
  cfg.epochs = 1;
  cfg.steps_per_epoch = 1;
  cfg.eta_w = 0.0;
  cfg.seed = 404;
  cfg.record_arch_trace = true;
  cfg.eta_arch = 0.01;
  const auto result = cell::run_search(cfg);
  REQUIRE(result.arch_trace.size() == 1);

  // Rebuild the same round by hand.
  cell::CellBuildConfig bc;
  bc.n_inputs = cfg.n_inputs;
  bc.n_nodes = cfg.n_nodes;
  bc.feature_dim = cfg.feature_dim;
  bc.experts_per_edge = cfg.experts_per_edge;
  bc.eta_arch = 0.01;
  bc.grad_bound = cfg.grad_bound;
  bc.horizon = 1;
  bc.seed = cfg.seed;
  auto c = make_cell_graph(bc);
  rng::Stream plant(rng::derive(cfg.seed, "planted-cell"));
  const auto planted = cell::random_planted_cell(c, plant);
  rng::Stream train(rng::derive(cfg.seed, "train-data"));
  rng::Stream val(rng::derive(cfg.seed, "val-data"));
  cell::sample_round(c, planted, cfg.noise_sigma, train);  // consumed by the train step
  const auto sample = cell::sample_round(c, planted, cfg.noise_sigma, val);

  std::vector<std::vector<double>> u(c.edges.size());
  for (std::size_t e = 0; e < c.edges.size(); ++e) u[e] = cell::mixture_of(c, static_cast<int>(e));
  const auto loss_at = [&](const std::vector<std::vector<double>>& mixtures) {
    const auto out = cell::forward_with_mixtures(c, sample.inputs, mixtures).output;
    const auto yy = cell::apply_readout(c, out);
    double l = 0.0;
    for (std::size_t i = 0; i < yy.size(); ++i)
      l += 0.5 * (yy[i] - sample.target[i]) * (yy[i] - sample.target[i]);
    return l;
  };

  const double h = 1e-6;
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    for (std::size_t i = 0; i < u[e].size(); ++i) {
      // Implied reward from the recorded movement: delta log_w / eta.
      const double moved =
          (result.arch_trace[0][e][i] - 0.0) / 0.01;  // initial log-weights are zero
      auto hi = u, lo = u;
      hi[e][i] += h;
      lo[e][i] -= h;
      const double fd = (loss_at(hi) - loss_at(lo)) / (2.0 * h);
      // Reward = -dl/du_i (clipping is inactive at these magnitudes).
      const double denom = std::max({std::abs(fd), std::abs(moved), 1e-4});
      CHECK(std::abs(-fd - moved) / denom < 1e-5);
    }
  }
}

TEST_CASE("discretize keeps the strongest two edges with deterministic ties") {
  cell::CellBuildConfig bc = small_build(31);
  bc.n_nodes = 2;
  bc.wipeout = false;
  auto c = make_cell_graph(bc);
  // Node 3 has incoming sources {0, 1, 2}; craft strengths 0.9, 0.8, 0.3 by
  // setting log-weights directly.
  const auto set_strength = [&](int src, int dst, double top, int top_idx) {
    const int e = c.edge_index(src, dst);
    REQUIRE(e >= 0);
    auto& lw = c.edges[static_cast<std::size_t>(e)].forecaster.log_weights;
    // softmax with one dominant coordinate approximating `top`.
    const double rest = (1.0 - top) / static_cast<double>(lw.size() - 1);
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = std::log(rest);
    lw[static_cast<std::size_t>(top_idx)] = std::log(top);
  };
  set_strength(0, 3, 0.9, 1);
  set_strength(1, 3, 0.8, 4);
  set_strength(2, 3, 0.3, 2);
  set_strength(0, 2, 0.6, 0);
  set_strength(1, 2, 0.6, 3);
  const auto d = cell::discretize(c);
  REQUIRE(d.node_edges.size() == 2);
  CHECK(d.node_edges[1] == std::vector<cell::DiscreteEdge>{{0, 1}, {1, 4}});
  CHECK(d.node_edges[0] == std::vector<cell::DiscreteEdge>{{0, 0}, {1, 3}});

  // Rescaling any forecaster's weights leaves the choice unchanged.
  for (double& v : c.edges[0].forecaster.log_weights) v += 3.7;
  CHECK(cell::discretize(c) == d);

  // All-collapsed forecasters tie at strength 1; the lower sources win.
  for (auto& edge : c.edges) {
    for (std::size_t i = 0; i < edge.forecaster.log_weights.size(); ++i)
      edge.forecaster.log_weights[i] = i == 0 ? 40.0 : -40.0;
  }
  const auto tie = cell::discretize(c);
  CHECK(tie.node_edges[1] == std::vector<cell::DiscreteEdge>{{0, 0}, {1, 0}});
}

TEST_CASE("cell_depth averages retained source indices") {
  cell::DiscreteCell all_zero;
  all_zero.n_inputs = 2;
  all_zero.node_edges = {{{0, 0}, {0, 1}}, {{0, 0}, {0, 2}}, {{0, 0}, {0, 1}}, {{0, 0}, {0, 3}}};
  CHECK(cell::cell_depth(all_zero) == 0.0);

  cell::DiscreteCell spread;
  spread.n_inputs = 2;
  spread.node_edges = {{{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}, {{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}};
  CHECK(cell::cell_depth(spread) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("normalized entropy spans uniform to one-hot") {
  CHECK(cell::normalized_entropy({0.25, 0.25, 0.25, 0.25}, 4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cell::normalized_entropy({1.0, 0.0, 0.0, 0.0}, 4) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cell::normalized_entropy({0.5, 0.5, 0.0, 0.0}, 4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(cell::normalized_entropy({1.0}, 1), std::invalid_argument);

  auto c = make_cell_graph(small_build(37));
  CHECK(cell::mean_normalized_entropy(c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-edge search equals the bare forecaster step for step") {
  cell::SearchConfig cfg;
  cfg.n_inputs = 1;
  cfg.n_nodes = 1;
  cfg.feature_dim = 4;
  cfg.experts_per_edge = 5;
  cfg.epochs = 2;
  cfg.steps_per_epoch = 40;
  cfg.eta_arch = 0.03;
  cfg.eta_w = 0.0;  // frozen weights
  cfg.noise_sigma = 0.01;
  cfg.seed = 91;
  cfg.identity_readout = true;
  cfg.record_arch_trace = true;
  const auto result = cell::run_search(cfg);
  REQUIRE(result.arch_trace.size() == 80);

  // Bare replica: same experts, same data stream, same rounds.
  cell::CellBuildConfig bc;
  bc.n_inputs = 1;
  bc.n_nodes = 1;
  bc.feature_dim = 4;
  bc.experts_per_edge = 5;
  bc.eta_arch = 0.03;
  bc.grad_bound = cfg.grad_bound;
  bc.horizon = 80;
  bc.identity_readout = true;
  bc.seed = 91;
  auto c = make_cell_graph(bc);
  rng::Stream plant(rng::derive(std::uint64_t{91}, "planted-cell"));
  const auto planted = cell::random_planted_cell(c, plant);
  rng::Stream train(rng::derive(std::uint64_t{91}, "train-data"));
  rng::Stream val(rng::derive(std::uint64_t{91}, "val-data"));

  auto bare = pea::init_forecaster(5, 0.03, cfg.grad_bound, 80, 1.0, true);
  std::vector<double> pred;
  for (int round = 0; round < 80; ++round) {
    cell::sample_round(c, planted, cfg.noise_sigma, train);  // train sample unused (frozen w)
    const auto sample = cell::sample_round(c, planted, cfg.noise_sigma, val);
    std::vector<std::vector<double>> preds;
    for (int id : bare.active) {
      c.edges[0].experts[static_cast<std::size_t>(id)].apply(pred, sample.inputs[0]);
      preds.push_back(pred);
    }
    const auto p = pea::predict(bare, preds);
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) grad[i] = p[i] - sample.target[i];
    pea::xnas_round(bare, grad, preds);
    for (std::size_t i = 0; i < bare.log_weights.size(); ++i) {
      CHECK(std::abs(bare.log_weights[i] -
                     result.arch_trace[static_cast<std::size_t>(round)][0][i]) <= 1e-12);
    }
  }
}

TEST_CASE("planted recovery at the default desk scale") {
  int recovered = 0;
  const int seeds = 6;  // the acceptance suite runs the full 20-seed study
  for (int s = 0; s < seeds; ++s) {
    cell::SearchConfig cfg;
    cfg.seed = 9000 + static_cast<std::uint64_t>(s);
    const auto result = cell::run_search(cfg);
    REQUIRE(result.discretized);
    if (result.recovered) ++recovered;
    // The horizon-end wipeout collapses every forecaster to its leader.
    CHECK(result.epoch_rows.back().survivors_total ==
          static_cast<int>(result.cell.edges.size()));
  }
  CHECK(recovered >= seeds - 1);
}

TEST_CASE("weight decay drives the baseline toward uniform mixtures") {
  cell::SearchConfig base;
  base.optimizer = cell::ArchOptimizer::gd_softmax;
  base.epochs = 10;
  base.steps_per_epoch = 50;
  base.seed = 777;
  const auto rows = cell::entropy_vs_weight_decay(base, {0.0, 3e-4, 1e-3, 3e-3, 1e-2});
  REQUIRE(rows.size() == 5);
  std::vector<double> lambdas, entropies;
  for (const auto& [l, h] : rows) {
    lambdas.push_back(l);
    entropies.push_back(h);
  }
  CHECK(entropies.back() > entropies.front());
  CHECK(stats::spearman(lambdas, entropies) > 0.8);

  // Decay-dominated limit: alpha pinned near zero, mixtures near uniform.
  const auto heavy = cell::entropy_vs_weight_decay(base, {5.0});
  CHECK(heavy[0].second > 0.95);

  cell::SearchConfig wrong = base;
  wrong.optimizer = cell::ArchOptimizer::xnas;
  CHECK_THROWS_AS(cell::entropy_vs_weight_decay(wrong, {0.0}), std::invalid_argument);
}

TEST_CASE("discretize requires two incoming edges per node") {
  cell::CellBuildConfig bc = small_build(41);
  bc.n_inputs = 1;  // node 1 has a single predecessor
  auto c = make_cell_graph(bc);
  CHECK_THROWS_AS(cell::discretize(c), std::invalid_argument);
}
