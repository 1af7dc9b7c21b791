#include "xnas/cell_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xnas/regret.hpp"

namespace xnas::cell {

const char* arch_optimizer_name(ArchOptimizer opt) {
  return opt == ArchOptimizer::xnas ? "xnas" : "gd_softmax";
}

void ExpertOp::apply(std::vector<double>& out, const std::vector<double>& x) const {
  const std::size_t d = x.size();
  out.assign(d, 0.0);
  switch (kind) {
    case ExpertKind::identity:
      out = x;
      return;
    case ExpertKind::scale:
      for (std::size_t i = 0; i < d; ++i) out[i] = 0.1 * x[i];
      return;
    case ExpertKind::fixed_linear:
    case ExpertKind::trainable_linear:
      for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        const double* row = weight.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) s += row[c] * x[c];
        out[r] = s;
      }
      return;
  }
}

void ExpertOp::apply_transpose(std::vector<double>& out, const std::vector<double>& x) const {
  const std::size_t d = x.size();
  out.assign(d, 0.0);
  switch (kind) {
    case ExpertKind::identity:
      out = x;
      return;
    case ExpertKind::scale:
      for (std::size_t i = 0; i < d; ++i) out[i] = 0.1 * x[i];
      return;
    case ExpertKind::fixed_linear:
    case ExpertKind::trainable_linear:
      for (std::size_t r = 0; r < d; ++r) {
        const double* row = weight.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) out[c] += row[c] * x[r];
      }
      return;
  }
}

int CellGraph::edge_index(int src, int dst) const {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].src == src && edges[e].dst == dst) return static_cast<int>(e);
  }
  return -1;
}

namespace {

std::vector<double> random_orthogonal(int d, rng::Stream& stream) {
  // Gram-Schmidt on a Gaussian matrix (rows).
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d),
                                        std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& row : rows) {
    for (double& v : row) v = stream.gaussian();
  }
  for (int r = 0; r < d; ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    for (int p = 0; p < r; ++p) {
      const auto& prev = rows[static_cast<std::size_t>(p)];
      double dot = 0.0;
      for (int c = 0; c < d; ++c)
        dot += row[static_cast<std::size_t>(c)] * prev[static_cast<std::size_t>(c)];
      for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] -= dot * prev[static_cast<std::size_t>(c)];
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  std::vector<double> flat(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c)
      flat[static_cast<std::size_t>(r) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] =
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return flat;
}

std::vector<ExpertOp> make_expert_menu(int n_experts, int d, rng::Stream& stream) {
  // Menu layout: identity, 0.1-scale, fixed random orthogonal maps, and one
  // trainable linear map in the last slot.
  std::vector<ExpertOp> menu;
  menu.reserve(static_cast<std::size_t>(n_experts));
  for (int i = 0; i < n_experts; ++i) {
    ExpertOp op;
    if (i == 0) {
      op.kind = ExpertKind::identity;
    } else if (i == n_experts - 1 && n_experts >= 2) {
      op.kind = ExpertKind::trainable_linear;
      op.weight.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
      for (double& w : op.weight) w = 0.001 * stream.gaussian();
    } else if (i == 1) {
      op.kind = ExpertKind::scale;
    } else {
      op.kind = ExpertKind::fixed_linear;
      op.weight = random_orthogonal(d, stream);
    }
    menu.push_back(std::move(op));
  }
  return menu;
}

std::vector<int> plantable_expert_indices(int n_experts) {
  // Identity and the fixed orthogonal maps; never the near-zero scale op
  // (collinear with identity) and never the trainable map.
  std::vector<int> kinds;
  kinds.push_back(0);
  for (int i = 2; i <= n_experts - 2; ++i) kinds.push_back(i);
  return kinds;
}

}  // namespace

CellGraph make_cell_graph(const CellBuildConfig& config) {
  if (config.n_inputs < 1 || config.n_nodes < 1)
    throw std::invalid_argument("cell needs at least one input and one intermediate node");
  if (config.feature_dim < 1) throw std::invalid_argument("feature_dim must be >= 1");
  if (config.experts_per_edge < 1) throw std::invalid_argument("experts_per_edge must be >= 1");

  CellGraph cell;
  cell.n_inputs = config.n_inputs;
  cell.n_nodes = config.n_nodes;
  cell.feature_dim = config.feature_dim;
  cell.experts_per_edge = config.experts_per_edge;
  cell.optimizer = config.optimizer;

  rng::Stream init(rng::derive(config.seed, "cell-init"));
  for (int k = config.n_inputs; k < config.n_inputs + config.n_nodes; ++k) {
    for (int j = 0; j < k; ++j) {
      Edge edge;
      edge.src = j;
      edge.dst = k;
      edge.experts = make_expert_menu(config.experts_per_edge, config.feature_dim, init);
      edge.forecaster = pea::init_forecaster(config.experts_per_edge, config.eta_arch,
                                             config.grad_bound, config.horizon, 1.0, config.wipeout);
      edge.gd = pea::init_gd_softmax(config.experts_per_edge, config.eta_arch, config.weight_decay);
      cell.edges.push_back(std::move(edge));
    }
  }
  if (config.identity_readout) {
    cell.readout.assign(
        static_cast<std::size_t>(config.feature_dim) * static_cast<std::size_t>(config.feature_dim), 0.0);
    for (int i = 0; i < config.feature_dim; ++i)
      cell.readout[static_cast<std::size_t>(i) * static_cast<std::size_t>(config.feature_dim) +
                   static_cast<std::size_t>(i)] = 1.0;
  } else {
    cell.readout = random_orthogonal(config.feature_dim, init);
  }
  return cell;
}

std::vector<double> mixture_of(const CellGraph& cell, int edge_index) {
  const Edge& edge = cell.edges[static_cast<std::size_t>(edge_index)];
  if (cell.optimizer == ArchOptimizer::gd_softmax) return pea::gd_mixture(edge.gd).u;
  const pea::MixtureWeights mw = pea::mixture_weights(edge.forecaster);
  std::vector<double> u(static_cast<std::size_t>(cell.experts_per_edge), 0.0);
  for (std::size_t k = 0; k < edge.forecaster.active.size(); ++k)
    u[static_cast<std::size_t>(edge.forecaster.active[k])] = mw.u[k];
  return u;
}

std::vector<double> strength_mixture_of(const CellGraph& cell, int edge_index) {
  const Edge& edge = cell.edges[static_cast<std::size_t>(edge_index)];
  if (cell.optimizer == ArchOptimizer::gd_softmax) return pea::gd_mixture(edge.gd).u;
  const auto& lw = edge.forecaster.log_weights;
  double m = lw[0];
  for (double v : lw) m = std::max(m, v);
  std::vector<double> u(lw.size());
  double s = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    u[i] = std::exp(lw[i] - m);
    s += u[i];
  }
  for (double& v : u) v /= s;
  return u;
}

ForwardTrace forward_with_mixtures(const CellGraph& cell,
                                   const std::vector<std::vector<double>>& inputs,
                                   const std::vector<std::vector<double>>& edge_u) {
  if (static_cast<int>(inputs.size()) != cell.n_inputs)
    throw std::invalid_argument("wrong number of input vectors");
  const std::size_t d = static_cast<std::size_t>(cell.feature_dim);
  for (const auto& x : inputs) {
    if (x.size() != d) throw std::invalid_argument("input dimension mismatch");
  }
  if (edge_u.size() != cell.edges.size())
    throw std::invalid_argument("one mixture per edge required");

  ForwardTrace trace;
  trace.node_values.resize(static_cast<std::size_t>(cell.n_total_nodes()));
  for (int i = 0; i < cell.n_inputs; ++i) trace.node_values[static_cast<std::size_t>(i)] = inputs[static_cast<std::size_t>(i)];
  trace.expert_preds.resize(cell.edges.size());
  trace.edge_mixtures.resize(cell.edges.size());

  std::vector<double> pred;
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    std::vector<double> value(d, 0.0);
    for (std::size_t e = 0; e < cell.edges.size(); ++e) {
      const Edge& edge = cell.edges[e];
      if (edge.dst != k) continue;
      const auto& u = edge_u[e];
      if (u.size() != edge.experts.size())
        throw std::invalid_argument("mixture length does not match the expert menu");
      auto& preds = trace.expert_preds[e];
      preds.resize(edge.experts.size());
      std::vector<double> mix(d, 0.0);
      for (std::size_t i = 0; i < edge.experts.size(); ++i) {
        edge.experts[i].apply(pred, trace.node_values[static_cast<std::size_t>(edge.src)]);
        preds[i] = pred;
        for (std::size_t c = 0; c < d; ++c) mix[c] += u[i] * pred[c];
      }
      trace.edge_mixtures[e] = mix;
      for (std::size_t c = 0; c < d; ++c) value[c] += mix[c];
    }
    trace.node_values[static_cast<std::size_t>(k)] = std::move(value);
  }

  trace.output.assign(d, 0.0);
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    for (std::size_t c = 0; c < d; ++c) trace.output[c] += trace.node_values[static_cast<std::size_t>(k)][c];
  }
  return trace;
}

std::vector<double> forward(const CellGraph& cell, const std::vector<std::vector<double>>& inputs) {
  std::vector<std::vector<double>> edge_u(cell.edges.size());
  for (std::size_t e = 0; e < cell.edges.size(); ++e) edge_u[e] = mixture_of(cell, static_cast<int>(e));
  return forward_with_mixtures(cell, inputs, edge_u).output;
}

std::vector<double> apply_readout(const CellGraph& cell, const std::vector<double>& output) {
  const std::size_t d = static_cast<std::size_t>(cell.feature_dim);
  std::vector<double> y(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    const double* row = cell.readout.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) s += row[c] * output[c];
    y[r] = s;
  }
  return y;
}

DiscreteCell discretize(const CellGraph& cell) {
  DiscreteCell out;
  out.n_inputs = cell.n_inputs;
  out.node_edges.resize(static_cast<std::size_t>(cell.n_nodes));
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    struct Candidate {
      double strength;
      int src;
      int expert;
    };
    std::vector<Candidate> candidates;
    for (std::size_t e = 0; e < cell.edges.size(); ++e) {
      const Edge& edge = cell.edges[e];
      if (edge.dst != k) continue;
      const std::vector<double> u = strength_mixture_of(cell, static_cast<int>(e));
      int best = 0;
      for (int i = 1; i < static_cast<int>(u.size()); ++i) {
        if (u[static_cast<std::size_t>(i)] > u[static_cast<std::size_t>(best)]) best = i;
      }
      candidates.push_back({u[static_cast<std::size_t>(best)], edge.src, best});
    }
    if (candidates.size() < 2)
      throw std::invalid_argument("discretize needs at least 2 incoming edges per node");
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.strength != b.strength) return a.strength > b.strength;
      return a.src < b.src;
    });
    std::vector<DiscreteEdge> kept = {{candidates[0].src, candidates[0].expert},
                                      {candidates[1].src, candidates[1].expert}};
    std::sort(kept.begin(), kept.end(),
              [](const DiscreteEdge& a, const DiscreteEdge& b) { return a.src < b.src; });
    out.node_edges[static_cast<std::size_t>(k - cell.n_inputs)] = std::move(kept);
  }
  return out;
}

double cell_depth(const DiscreteCell& cell) {
  double sum = 0.0;
  int count = 0;
  for (const auto& node : cell.node_edges) {
    for (const auto& edge : node) {
      sum += edge.src;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("cell has no connections");
  return sum / count;
}

double normalized_entropy(const std::vector<double>& u, int n_experts) {
  if (n_experts < 2) throw std::invalid_argument("normalized entropy needs N >= 2");
  double h = 0.0;
  for (double p : u) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(n_experts));
}

double mean_normalized_entropy(const CellGraph& cell) {
  if (cell.experts_per_edge < 2) throw std::invalid_argument("normalized entropy needs N >= 2");
  double sum = 0.0;
  for (std::size_t e = 0; e < cell.edges.size(); ++e)
    sum += normalized_entropy(mixture_of(cell, static_cast<int>(e)), cell.experts_per_edge);
  return sum / static_cast<double>(cell.edges.size());
}

std::vector<double> discrete_forward(const CellGraph& cell, const DiscreteCell& discrete,
                                     const std::vector<std::vector<double>>& inputs) {
  if (static_cast<int>(inputs.size()) != cell.n_inputs)
    throw std::invalid_argument("wrong number of input vectors");
  const std::size_t d = static_cast<std::size_t>(cell.feature_dim);
  std::vector<std::vector<double>> values(static_cast<std::size_t>(cell.n_total_nodes()));
  for (int i = 0; i < cell.n_inputs; ++i) values[static_cast<std::size_t>(i)] = inputs[static_cast<std::size_t>(i)];
  std::vector<double> pred;
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    std::vector<double> value(d, 0.0);
    for (const DiscreteEdge& de : discrete.node_edges[static_cast<std::size_t>(k - cell.n_inputs)]) {
      const int e = cell.edge_index(de.src, k);
      if (e < 0) throw std::invalid_argument("discrete edge missing from the graph");
      cell.edges[static_cast<std::size_t>(e)].experts[static_cast<std::size_t>(de.expert)].apply(
          pred, values[static_cast<std::size_t>(de.src)]);
      for (std::size_t c = 0; c < d; ++c) value[c] += pred[c];
    }
    values[static_cast<std::size_t>(k)] = std::move(value);
  }
  std::vector<double> output(d, 0.0);
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    for (std::size_t c = 0; c < d; ++c) output[c] += values[static_cast<std::size_t>(k)][c];
  }
  return output;
}

DiscreteCell random_planted_cell(const CellGraph& cell, rng::Stream& stream) {
  const std::vector<int> kinds = plantable_expert_indices(cell.experts_per_edge);
  if (kinds.empty()) throw std::invalid_argument("no plantable expert kinds for this menu");
  DiscreteCell planted;
  planted.n_inputs = cell.n_inputs;
  planted.node_edges.resize(static_cast<std::size_t>(cell.n_nodes));
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    const int n_pred = k;
    const int want = std::min(2, n_pred);
    std::vector<int> sources;
    while (static_cast<int>(sources.size()) < want) {
      const int s = stream.uniform_int(0, n_pred - 1);
      if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
    }
    std::sort(sources.begin(), sources.end());
    std::vector<DiscreteEdge> edges;
    for (int s : sources) {
      const int kind = kinds[static_cast<std::size_t>(stream.uniform_int(0, static_cast<int>(kinds.size()) - 1))];
      edges.push_back({s, kind});
    }
    planted.node_edges[static_cast<std::size_t>(k - cell.n_inputs)] = std::move(edges);
  }
  return planted;
}

RoundSample sample_round(const CellGraph& cell, const DiscreteCell& planted, double noise_sigma,
                         rng::Stream& stream) {
  RoundSample sample;
  sample.inputs.resize(static_cast<std::size_t>(cell.n_inputs));
  for (auto& x : sample.inputs) {
    x.resize(static_cast<std::size_t>(cell.feature_dim));
    for (double& v : x) v = stream.gaussian();
  }
  sample.target = apply_readout(cell, discrete_forward(cell, planted, sample.inputs));
  for (double& v : sample.target) v += noise_sigma * stream.gaussian();
  return sample;
}

double resolve_eta_arch(const SearchConfig& config) {
  if (config.eta_arch > 0.0) return config.eta_arch;
  if (config.optimizer == ArchOptimizer::gd_softmax) return 0.1;
  // Quarter of the theory rate: the full rate drives the mixtures so close to
  // one-hot that edge strengths become indistinguishable in double precision.
  const double eta_star =
      regret::optimal_eta(config.rounds(), config.grad_bound, config.experts_per_edge).eta_star;
  return eta_star / 4.0;
}

namespace {

struct Adjoints {
  // Per intermediate node: gradient of the sample loss w.r.t. the node value.
  std::vector<std::vector<double>> node;
};

// delta = readout(output) - target; returns 0.5*||delta||^2 and fills the
// per-node adjoints by reverse traversal (all experts are linear).
double backward(const CellGraph& cell, const ForwardTrace& trace,
                const std::vector<std::vector<double>>& edge_u, const std::vector<double>& target,
                Adjoints& adj) {
  const std::size_t d = static_cast<std::size_t>(cell.feature_dim);
  const std::vector<double> yhat = apply_readout(cell, trace.output);
  double loss = 0.0;
  std::vector<double> delta(d);
  for (std::size_t c = 0; c < d; ++c) {
    delta[c] = yhat[c] - target[c];
    loss += 0.5 * delta[c] * delta[c];
  }
  // d loss / d output = readout^T delta; every intermediate node receives it
  // through the output sum.
  std::vector<double> g_out(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    const double* row = cell.readout.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) g_out[c] += row[c] * delta[r];
  }

  adj.node.assign(static_cast<std::size_t>(cell.n_total_nodes()), {});
  std::vector<double> tmp;
  for (int k = cell.n_total_nodes() - 1; k >= cell.n_inputs; --k) {
    std::vector<double> a = g_out;
    // Contributions from downstream edges k -> m.
    for (std::size_t e = 0; e < cell.edges.size(); ++e) {
      const Edge& edge = cell.edges[e];
      if (edge.src != k) continue;
      const auto& am = adj.node[static_cast<std::size_t>(edge.dst)];
      for (std::size_t i = 0; i < edge.experts.size(); ++i) {
        const double ui = edge_u[e][i];
        if (ui == 0.0) continue;
        edge.experts[i].apply_transpose(tmp, am);
        for (std::size_t c = 0; c < d; ++c) a[c] += ui * tmp[c];
      }
    }
    adj.node[static_cast<std::size_t>(k)] = std::move(a);
  }
  return loss;
}

}  // namespace

SearchResult run_search(const SearchConfig& config) {
  if (config.epochs < 1 || config.steps_per_epoch < 1)
    throw std::invalid_argument("epochs and steps_per_epoch must be >= 1");
  const int rounds = config.rounds();
  const double eta_arch = resolve_eta_arch(config);

  CellBuildConfig build;
  build.n_inputs = config.n_inputs;
  build.n_nodes = config.n_nodes;
  build.feature_dim = config.feature_dim;
  build.experts_per_edge = config.experts_per_edge;
  build.eta_arch = eta_arch;
  build.grad_bound = config.grad_bound;
  build.horizon = rounds;
  build.weight_decay = config.weight_decay;
  build.wipeout = config.wipeout;
  build.optimizer = config.optimizer;
  build.identity_readout = config.identity_readout;
  build.seed = config.seed;

  SearchResult result;
  result.cell = make_cell_graph(build);
  CellGraph& cell = result.cell;

  rng::Stream plant_stream(rng::derive(config.seed, "planted-cell"));
  result.planted = random_planted_cell(cell, plant_stream);

  rng::Stream train_stream(rng::derive(config.seed, "train-data"));
  rng::Stream val_stream(rng::derive(config.seed, "val-data"));

  const std::size_t n_edges = cell.edges.size();
  std::vector<std::vector<double>> edge_u(n_edges);
  Adjoints adj;
  std::vector<double> tmp;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_val_loss = 0.0;
    for (int s = 0; s < config.steps_per_epoch; ++s) {
      for (std::size_t e = 0; e < n_edges; ++e) edge_u[e] = mixture_of(cell, static_cast<int>(e));

      // Weight step on a train sample: SGD on each trainable expert, its
      // gradient attenuated by the expert's own mixture weight.
      {
        const RoundSample sample = sample_round(cell, result.planted, config.noise_sigma, train_stream);
        const ForwardTrace trace = forward_with_mixtures(cell, sample.inputs, edge_u);
        backward(cell, trace, edge_u, sample.target, adj);
        if (config.eta_w > 0.0) {
          const std::size_t d = static_cast<std::size_t>(cell.feature_dim);
          for (std::size_t e = 0; e < n_edges; ++e) {
            Edge& edge = cell.edges[e];
            const std::size_t last = edge.experts.size() - 1;
            if (edge.experts[last].kind != ExpertKind::trainable_linear) continue;
            const double ui = edge_u[e][last];
            if (ui == 0.0) continue;
            const auto& a = adj.node[static_cast<std::size_t>(edge.dst)];
            const auto& x = trace.node_values[static_cast<std::size_t>(edge.src)];
            auto& w = edge.experts[last].weight;
            for (std::size_t r = 0; r < d; ++r) {
              const double scale = config.eta_w * ui * a[r];
              for (std::size_t c = 0; c < d; ++c) w[r * d + c] -= scale * x[c];
            }
          }
        }
      }

      // Architecture round on a validation sample.
      {
        const RoundSample sample = sample_round(cell, result.planted, config.noise_sigma, val_stream);
        const ForwardTrace trace = forward_with_mixtures(cell, sample.inputs, edge_u);
        epoch_val_loss += backward(cell, trace, edge_u, sample.target, adj);
        for (std::size_t e = 0; e < n_edges; ++e) {
          Edge& edge = cell.edges[e];
          const auto& grad = adj.node[static_cast<std::size_t>(edge.dst)];
          if (config.optimizer == ArchOptimizer::xnas) {
            // Predictions restricted to the active set, in active order.
            std::vector<std::vector<double>> preds;
            preds.reserve(edge.forecaster.active.size());
            for (int id : edge.forecaster.active)
              preds.push_back(trace.expert_preds[e][static_cast<std::size_t>(id)]);
            pea::xnas_round(edge.forecaster, grad, preds);
          } else {
            pea::gd_softmax_round(edge.gd, grad, trace.expert_preds[e]);
          }
        }
      }

      if (config.record_arch_trace) {
        std::vector<std::vector<double>> snapshot(n_edges);
        for (std::size_t e = 0; e < n_edges; ++e) {
          snapshot[e] = config.optimizer == ArchOptimizer::xnas ? cell.edges[e].forecaster.log_weights
                                                                : cell.edges[e].gd.alpha;
        }
        result.arch_trace.push_back(std::move(snapshot));
      }
    }

    EpochRow row;
    row.epoch = epoch + 1;
    row.val_loss = epoch_val_loss / config.steps_per_epoch;
    row.mean_entropy = mean_normalized_entropy(cell);
    row.survivors_total = 0;
    for (const Edge& edge : cell.edges) {
      row.survivors_total += config.optimizer == ArchOptimizer::xnas
                                 ? static_cast<int>(edge.forecaster.active.size())
                                 : cell.experts_per_edge;
    }
    result.epoch_rows.push_back(row);
  }

  result.mean_entropy_final = mean_normalized_entropy(cell);
  bool can_discretize = true;
  for (int k = cell.n_inputs; k < cell.n_total_nodes(); ++k) {
    if (k < 2) can_discretize = false;  // fewer than 2 predecessors
  }
  if (can_discretize) {
    result.discovered = discretize(cell);
    result.discretized = true;
    result.recovered = result.discovered == result.planted;
    result.depth = cell_depth(result.discovered);
  }
  return result;
}

std::vector<std::pair<double, double>> entropy_vs_weight_decay(const SearchConfig& base,
                                                               const std::vector<double>& lambdas) {
  if (base.optimizer != ArchOptimizer::gd_softmax)
    throw std::invalid_argument("the weight-decay sweep applies to the gd_softmax optimizer only");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    SearchConfig cfg = base;
    cfg.weight_decay = lambda;
    const SearchResult res = run_search(cfg);
    rows.emplace_back(lambda, res.mean_entropy_final);
  }
  return rows;
}

}  // namespace xnas::cell
