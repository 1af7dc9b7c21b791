#pragma once

#include <cstdint>
#include <vector>

#include "xnas/pea.hpp"
#include "xnas/rng.hpp"

namespace xnas::cell {

enum class ArchOptimizer { xnas, gd_softmax };
const char* arch_optimizer_name(ArchOptimizer opt);

enum class ExpertKind { identity, scale, fixed_linear, trainable_linear };

// A candidate operation on an edge. All kinds are linear maps of the feature
// vector, so the whole cell stays exactly differentiable.
struct ExpertOp {
  ExpertKind kind = ExpertKind::identity;
  std::vector<double> weight;  // d x d row-major for the linear kinds

  void apply(std::vector<double>& out, const std::vector<double>& x) const;
  void apply_transpose(std::vector<double>& out, const std::vector<double>& x) const;
};

struct Edge {
  int src = 0;
  int dst = 0;
  std::vector<ExpertOp> experts;
  pea::ForecasterState forecaster;  // architecture weights (XNAS path)
  pea::GdSoftmaxState gd;           // architecture weights (baseline path)
};

// DAG over nodes 0..n_inputs+n_nodes-1: inputs first, then intermediate
// nodes, one forecaster per (j, k) pair with j < k and k intermediate.
// Intermediate node value x^(k) = sum of its incoming edge mixtures; cell
// output = sum of intermediate node values; a fixed linear readout maps the
// output to the prediction space.
struct CellGraph {
  int n_inputs = 2;
  int n_nodes = 2;  // intermediate nodes
  int feature_dim = 8;
  int experts_per_edge = 5;
  ArchOptimizer optimizer = ArchOptimizer::xnas;
  std::vector<Edge> edges;
  std::vector<double> readout;  // d x d row-major

  int n_total_nodes() const { return n_inputs + n_nodes; }
  int edge_index(int src, int dst) const;  // -1 if absent
};

struct CellBuildConfig {
  int n_inputs = 2;
  int n_nodes = 2;
  int feature_dim = 8;
  int experts_per_edge = 5;  // identity, 0.1-scale, fixed orthogonals, one trainable
  double eta_arch = 0.05;
  double grad_bound = 5.0;
  int horizon = 1500;         // forecaster horizon (== search rounds)
  double weight_decay = 0.0;  // baseline only
  bool wipeout = true;
  ArchOptimizer optimizer = ArchOptimizer::xnas;
  bool identity_readout = false;
  std::uint64_t seed = 0;
};

CellGraph make_cell_graph(const CellBuildConfig& config);

// Current architecture mixture of one edge, over the full expert menu
// (wiped experts contribute zero).
std::vector<double> mixture_of(const CellGraph& cell, int edge_index);

// Mixture used for discretization strength: softmax over the full expert
// menu's final log-weights (XNAS keeps a wiped expert's last weight), or
// softmax(alpha) for the baseline. Invariant under rescaling v.
std::vector<double> strength_mixture_of(const CellGraph& cell, int edge_index);

struct ForwardTrace {
  std::vector<std::vector<double>> node_values;                 // all nodes
  std::vector<std::vector<std::vector<double>>> expert_preds;   // per edge, per expert
  std::vector<std::vector<double>> edge_mixtures;               // per edge
  std::vector<double> output;                                   // sum of intermediates
};

// Forward pass with explicit per-edge mixture coefficients (not necessarily
// normalized); the cell is linear in each edge's coefficients.
ForwardTrace forward_with_mixtures(const CellGraph& cell,
                                   const std::vector<std::vector<double>>& inputs,
                                   const std::vector<std::vector<double>>& edge_u);

// Forward pass under the cell's current architecture mixtures.
std::vector<double> forward(const CellGraph& cell, const std::vector<std::vector<double>>& inputs);

std::vector<double> apply_readout(const CellGraph& cell, const std::vector<double>& output);

// Discrete architecture: per intermediate node the retained incoming edges,
// each with its single chosen expert.
struct DiscreteEdge {
  int src = 0;
  int expert = 0;
  bool operator==(const DiscreteEdge&) const = default;
};

struct DiscreteCell {
  int n_inputs = 2;
  std::vector<std::vector<DiscreteEdge>> node_edges;  // per intermediate node, sorted by src
  bool operator==(const DiscreteCell&) const = default;
};

// Keeps the 2 strongest incoming edges per node (strength = max_i u_i of the
// strength mixture; ties to the lower source index) and the argmax expert on
// each kept edge (ties to the lower expert index).
DiscreteCell discretize(const CellGraph& cell);

// Mean source index over all retained connections (inputs 0..; intermediate
// nodes follow).
double cell_depth(const DiscreteCell& cell);

// -(1/ln N) * sum_i u_i ln u_i, with 0 ln 0 := 0.
double normalized_entropy(const std::vector<double>& u, int n_experts);

// Average normalized entropy of the current mixtures over all forecasters.
double mean_normalized_entropy(const CellGraph& cell);

// Evaluate a discrete cell with the cell graph's expert instances.
std::vector<double> discrete_forward(const CellGraph& cell, const DiscreteCell& discrete,
                                     const std::vector<std::vector<double>>& inputs);

// Planted ground-truth cell drawn from the parameter-free expert kinds.
DiscreteCell random_planted_cell(const CellGraph& cell, rng::Stream& stream);

struct RoundSample {
  std::vector<std::vector<double>> inputs;
  std::vector<double> target;
};

// One synthetic supervised sample: Gaussian inputs; target = readout applied
// to the planted cell's output plus Gaussian noise.
RoundSample sample_round(const CellGraph& cell, const DiscreteCell& planted, double noise_sigma,
                         rng::Stream& stream);

struct SearchConfig {
  int n_inputs = 2;
  int n_nodes = 2;
  int feature_dim = 8;
  int experts_per_edge = 5;
  int epochs = 30;
  int steps_per_epoch = 50;
  double eta_arch = 0.0;   // 0 = auto: eta*(T, L, N)/4 for XNAS, 0.1 for the baseline
  double eta_w = 0.005;
  double weight_decay = 0.0;
  double grad_bound = 5.0;
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
  ArchOptimizer optimizer = ArchOptimizer::xnas;
  bool wipeout = true;
  bool identity_readout = false;
  bool record_arch_trace = false;

  int rounds() const { return epochs * steps_per_epoch; }
};

double resolve_eta_arch(const SearchConfig& config);

struct EpochRow {
  int epoch = 0;
  double val_loss = 0.0;       // mean over the epoch
  double mean_entropy = 0.0;   // at epoch end
  int survivors_total = 0;     // at epoch end
};

struct SearchResult {
  CellGraph cell;
  DiscreteCell planted;
  DiscreteCell discovered;
  bool discretized = false;  // false when a node has < 2 predecessors
  bool recovered = false;
  double depth = 0.0;
  double mean_entropy_final = 0.0;
  std::vector<EpochRow> epoch_rows;
  // Per round, per edge: log-weights (XNAS) or alpha (baseline) after the round.
  std::vector<std::vector<std::vector<double>>> arch_trace;
};

// Alternating search: one weight-descent step on a train sample, then one
// architecture round per forecaster on a validation sample.
SearchResult run_search(const SearchConfig& config);

// One search per weight decay value (shared seed); returns (lambda, final
// mean normalized entropy) pairs. Baseline optimizer only.
std::vector<std::pair<double, double>> entropy_vs_weight_decay(const SearchConfig& base,
                                                               const std::vector<double>& lambdas);

}  // namespace xnas::cell
