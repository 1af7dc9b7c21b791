#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xnas/cell_space.hpp"
#include "xnas/csv.hpp"
#include "xnas/lr_plan.hpp"
#include "xnas/manifest.hpp"
#include "xnas/montecarlo.hpp"
#include "xnas/regret.hpp"
#include "xnas/toys.hpp"
#include "xnas/verify.hpp"

namespace {

using nlohmann::json;
using xnas::io::format_number;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;        // usage or config errors
constexpr int kExitVerifyFail = 2;   // verification failures

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config_file(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  // A manifest is accepted as a config: its resolved config block is reused.
  if (j.contains("config") && j.contains("subcommand")) {
    if (j["subcommand"] != subcommand)
      throw ConfigError("manifest subcommand '" + j["subcommand"].get<std::string>() +
                        "' does not match '" + subcommand + "'");
    return j["config"];
  }
  return j;
}

// Buffers every output, then writes them all; removes anything written if a
// write fails so no partial outputs survive.
class OutputSet {
 public:
  void add(std::string path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  std::vector<std::string> paths() const {
    std::vector<std::string> p;
    for (const auto& [path, content] : files_) p.push_back(path);
    return p;
  }

  void write_all() {
    std::vector<std::string> written;
    for (const auto& [path, content] : files_) {
      std::ofstream out(path, std::ios::binary);
      if (out) out << content;
      if (!out) {
        for (const auto& w : written) std::remove(w.c_str());
        throw ConfigError("cannot write output file: " + path);
      }
      out.close();
      written.push_back(path);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string csv_preamble(const xnas::io::RunManifest& manifest) {
  std::string head = "# manifest_hash=" + xnas::io::hash_hex(manifest.hash()) + "\n";
  head += "# config=" + manifest.config.dump() + "\n";
  return head;
}

xnas::io::RunManifest make_manifest(const std::string& subcommand, json config, std::uint64_t seed,
                                    const std::vector<std::string>& outputs) {
  xnas::io::RunManifest m;
  m.subcommand = subcommand;
  m.config = std::move(config);
  m.seed = seed;
  m.version = xnas::io::kToolVersion;
  m.outputs = outputs;
  return m;
}

// ---------------------------------------------------------------------------
// lr-plan
// ---------------------------------------------------------------------------

xnas::lrplan::SearchSchedule schedule_from_json(const json& j) {
  xnas::lrplan::SearchSchedule schedule;
  try {
    schedule.validation_size = j.at("validation_size").get<std::int64_t>();
    schedule.epochs = j.at("epochs").get<int>();
    schedule.grad_bound = j.value("grad_bound", 1.0);
    schedule.experts_per_forecaster = j.at("experts_per_forecaster").get<int>();
    const json& reps = j.at("replications");
    if (reps.is_array()) {
      for (const auto& pair : reps)
        schedule.replications.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<int>());
    } else {
      for (const auto& [name, r] : reps.items())
        schedule.replications.emplace_back(name, r.get<int>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad lr-plan config: ") + e.what());
  }
  return schedule;
}

json schedule_to_json(const xnas::lrplan::SearchSchedule& s) {
  json j;
  j["validation_size"] = s.validation_size;
  j["epochs"] = s.epochs;
  j["grad_bound"] = s.grad_bound;
  j["experts_per_forecaster"] = s.experts_per_forecaster;
  json reps = json::array();
  for (const auto& [name, r] : s.replications) reps.push_back(json::array({name, r}));
  j["replications"] = reps;
  return j;
}

int run_lr_plan(const std::string& config_path, const std::string& out_path) {
  const json config = load_config_file(config_path, "lr-plan");
  const xnas::lrplan::SearchSchedule schedule = schedule_from_json(config);
  const auto entries = xnas::lrplan::plan(schedule);

  const auto manifest = make_manifest("lr-plan", schedule_to_json(schedule), 0, {out_path});
  std::string csv = csv_preamble(manifest);
  csv += "cell_type,T_c,eta_star\n";
  for (const auto& e : entries) {
    csv += e.cell_type + "," + format_number(e.horizon) + "," + format_number(e.eta_star) + "\n";
  }

  OutputSet outputs;
  outputs.add(out_path, csv);
  outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
  outputs.write_all();
  for (const auto& e : entries)
    std::cout << e.cell_type << ": T=" << e.horizon << " eta*=" << format_number(e.eta_star) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// toys
// ---------------------------------------------------------------------------

std::string trajectory_csv(const xnas::toys::ToyRunResult& result, int dims) {
  std::string csv = "step,optimizer";
  const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < dims; ++a) csv += std::string(",u_") + axes[a];
  for (int a = 0; a < dims; ++a) csv += std::string(",update_") + axes[a];
  csv += ",loss,dist_opt\n";
  const auto emit = [&](const xnas::toys::Trajectory& traj) {
    for (const auto& pt : traj.points) {
      csv += format_number(pt.step);
      csv += ",";
      csv += xnas::toys::optimizer_name(pt.optimizer);
      for (double v : pt.mixture) csv += "," + format_number(v);
      for (double v : pt.update_terms) csv += "," + format_number(v);
      csv += "," + format_number(pt.loss) + "," + format_number(pt.dist_opt) + "\n";
    }
  };
  emit(result.xnas);
  emit(result.gd);
  return csv;
}

int run_toy3d(double eta, bool wipeout, const std::string& out_path) {
  const auto result = xnas::toys::run_toy3d(eta, wipeout);
  json config;
  config["eta"] = eta;
  config["wipeout"] = wipeout;
  config["zeta"] = 1.0;
  double grad_bound = 1.0;
  config["schedule"] = json::array();
  for (const auto& ph : xnas::toys::default_toy3d_schedule()) {
    config["schedule"].push_back({{"a", ph.loss.a}, {"b", ph.loss.b}, {"c", ph.loss.c}, {"steps", ph.steps}});
    grad_bound = std::max({grad_bound, std::abs(ph.loss.a), std::abs(ph.loss.b), std::abs(ph.loss.c)});
  }
  config["grad_bound"] = grad_bound;
  const auto manifest = make_manifest("toy3d", config, 0, {out_path});

  OutputSet outputs;
  outputs.add(out_path, csv_preamble(manifest) + trajectory_csv(result, 3));
  outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
  outputs.write_all();
  std::cout << "toy3d: " << result.xnas.points.size() << " steps per optimizer, final xnas u_z="
            << format_number(result.xnas.points.back().mixture[2]) << "\n";
  return kExitOk;
}

int run_toy2d(const std::string& variant_name, double eta, int steps, const std::string& out_path) {
  xnas::toys::Toy2dVariant variant;
  if (variant_name == "linear_balanced") {
    variant = xnas::toys::Toy2dVariant::linear_balanced;
  } else if (variant_name == "linear_imbalanced") {
    variant = xnas::toys::Toy2dVariant::linear_imbalanced;
  } else if (variant_name == "quadratic") {
    variant = xnas::toys::Toy2dVariant::quadratic;
  } else {
    throw ConfigError("unknown toy2d variant: " + variant_name);
  }
  const auto result = xnas::toys::run_toy2d(variant, eta, steps);
  json config;
  config["variant"] = variant_name;
  config["eta"] = eta;
  config["steps"] = steps;
  const auto manifest = make_manifest("toy2d", config, 0, {out_path});

  OutputSet outputs;
  outputs.add(out_path, csv_preamble(manifest) + trajectory_csv(result, 2));
  outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
  outputs.write_all();
  std::cout << "toy2d " << variant_name
            << ": final xnas u_x=" << format_number(result.xnas.points.back().mixture[0])
            << " gd u_x=" << format_number(result.gd.points.back().mixture[0]) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stochastic
// ---------------------------------------------------------------------------

int run_stochastic(xnas::mc::StochasticConfig config, const std::vector<int>& n_list,
                   const std::vector<double>& sigma_list, const std::string& optimizers_arg,
                   const std::string& out_path) {
  if (!n_list.empty() && !sigma_list.empty())
    throw ConfigError("choose one sweep axis: --n-list or --sigma-list");
  std::vector<xnas::mc::Optimizer> optimizers;
  {
    std::stringstream ss(optimizers_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "xnas") {
        optimizers.push_back(xnas::mc::Optimizer::xnas);
      } else if (tok == "gd_softmax") {
        optimizers.push_back(xnas::mc::Optimizer::gd_softmax);
      } else {
        throw ConfigError("unknown optimizer: " + tok);
      }
    }
  }
  if (optimizers.empty()) throw ConfigError("no optimizers selected");

  xnas::mc::SweepAxis axis = xnas::mc::SweepAxis::n_experts;
  std::vector<double> values;
  if (!sigma_list.empty()) {
    axis = xnas::mc::SweepAxis::sigma;
    values = sigma_list;
  } else if (!n_list.empty()) {
    for (int n : n_list) values.push_back(n);
  } else {
    values = {static_cast<double>(config.n_experts)};
  }

  const auto summary = xnas::mc::run_sweep(config, axis, values, optimizers);

  json jc;
  jc["axis"] = xnas::mc::axis_name(axis);
  jc["values"] = values;
  jc["optimizers"] = json::array();
  for (auto opt : optimizers) jc["optimizers"].push_back(xnas::mc::optimizer_name(opt));
  jc["n_experts"] = config.n_experts;
  jc["steps"] = config.steps;
  jc["runs"] = config.runs;
  jc["sigma_r"] = config.sigma_r;
  jc["grad_bound"] = config.grad_bound;
  jc["eta"] = config.eta_auto ? json("auto") : json(config.eta);
  // The auto rate depends on the sweep point; record every resolved value.
  json resolved = json::array();
  for (double value : values) {
    const int n = axis == xnas::mc::SweepAxis::n_experts ? static_cast<int>(value) : config.n_experts;
    const double eta = config.eta_auto
                           ? xnas::regret::optimal_eta(config.steps, config.grad_bound, n).eta_star
                           : config.eta;
    resolved.push_back(json::array({value, eta}));
  }
  jc["eta_resolved"] = resolved;
  jc["zeta"] = 1.0;
  jc["seed"] = config.seed;
  jc["wipeout"] = config.wipeout;
  const auto manifest = make_manifest("stochastic", jc, config.seed, {out_path});

  std::string csv = csv_preamble(manifest);
  csv += "axis,value,optimizer,correct_fraction,mean_regret,std_err,mean_gamma,clip_rate\n";
  for (const auto& pt : summary.points) {
    csv += std::string(xnas::mc::axis_name(axis)) + "," + format_number(pt.value) + "," +
           xnas::mc::optimizer_name(pt.optimizer) + "," + format_number(pt.correct_fraction) + "," +
           format_number(pt.mean_regret) + "," + format_number(pt.std_err) + "," +
           format_number(pt.mean_gamma) + "," + format_number(pt.clip_rate) + "\n";
  }

  OutputSet outputs;
  outputs.add(out_path, csv);
  outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
  outputs.write_all();
  std::cout << "stochastic sweep: " << summary.points.size() << " points -> " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cell-search
// ---------------------------------------------------------------------------

xnas::cell::SearchConfig cell_config_from_json(const json& j) {
  xnas::cell::SearchConfig cfg;
  try {
    cfg.n_inputs = j.value("n_inputs", cfg.n_inputs);
    cfg.n_nodes = j.value("n_nodes", cfg.n_nodes);
    cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
    cfg.experts_per_edge = j.value("experts_per_edge", cfg.experts_per_edge);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.steps_per_epoch = j.value("steps_per_epoch", cfg.steps_per_epoch);
    if (j.contains("eta_arch") && !j["eta_arch"].is_string())
      cfg.eta_arch = j["eta_arch"].get<double>();
    cfg.eta_w = j.value("eta_w", cfg.eta_w);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.grad_bound = j.value("grad_bound", cfg.grad_bound);
    cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.wipeout = j.value("wipeout", cfg.wipeout);
    const std::string opt = j.value("optimizer", std::string("xnas"));
    if (opt == "xnas") {
      cfg.optimizer = xnas::cell::ArchOptimizer::xnas;
    } else if (opt == "gd_softmax") {
      cfg.optimizer = xnas::cell::ArchOptimizer::gd_softmax;
    } else {
      throw ConfigError("unknown optimizer: " + opt);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad cell-search config: ") + e.what());
  }
  return cfg;
}

json cell_config_to_json(const xnas::cell::SearchConfig& cfg) {
  json j;
  j["n_inputs"] = cfg.n_inputs;
  j["n_nodes"] = cfg.n_nodes;
  j["feature_dim"] = cfg.feature_dim;
  j["experts_per_edge"] = cfg.experts_per_edge;
  j["epochs"] = cfg.epochs;
  j["steps_per_epoch"] = cfg.steps_per_epoch;
  j["eta_arch"] = xnas::cell::resolve_eta_arch(cfg);
  j["eta_w"] = cfg.eta_w;
  j["weight_decay"] = cfg.weight_decay;
  j["grad_bound"] = cfg.grad_bound;
  j["noise_sigma"] = cfg.noise_sigma;
  j["seed"] = cfg.seed;
  j["optimizer"] = xnas::cell::arch_optimizer_name(cfg.optimizer);
  j["wipeout"] = cfg.wipeout;
  j["zeta"] = 1.0;
  j["identity_readout"] = cfg.identity_readout;
  return j;
}

const char* expert_kind_name(xnas::cell::ExpertKind kind) {
  switch (kind) {
    case xnas::cell::ExpertKind::identity:
      return "identity";
    case xnas::cell::ExpertKind::scale:
      return "scale";
    case xnas::cell::ExpertKind::fixed_linear:
      return "fixed_linear";
    case xnas::cell::ExpertKind::trainable_linear:
      return "trainable_linear";
  }
  return "?";
}

json discrete_cell_to_json(const xnas::cell::CellGraph& cell, const xnas::cell::DiscreteCell& d) {
  json nodes = json::array();
  for (std::size_t m = 0; m < d.node_edges.size(); ++m) {
    json edges = json::array();
    for (const auto& e : d.node_edges[m]) {
      const int idx = cell.edge_index(e.src, d.n_inputs + static_cast<int>(m));
      json je;
      je["src"] = e.src;
      je["expert"] = e.expert;
      je["kind"] = idx >= 0 ? expert_kind_name(
                                  cell.edges[static_cast<std::size_t>(idx)].experts[static_cast<std::size_t>(e.expert)].kind)
                            : "?";
      edges.push_back(je);
    }
    nodes.push_back({{"node", d.n_inputs + static_cast<int>(m)}, {"edges", edges}});
  }
  return nodes;
}

int run_cell_search(const std::string& config_path, const std::string& out_path) {
  const json config = load_config_file(config_path, "cell-search");
  const xnas::cell::SearchConfig cfg = cell_config_from_json(config);
  const auto result = xnas::cell::run_search(cfg);

  const std::size_t dot = out_path.find_last_of('.');
  const std::size_t slash = out_path.find_last_of('/');
  const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                               ? out_path.substr(0, dot)
                               : out_path;
  const std::string cell_path = stem + ".cell.json";
  const auto manifest =
      make_manifest("cell-search", cell_config_to_json(cfg), cfg.seed, {out_path, cell_path});

  std::string csv = csv_preamble(manifest);
  csv += "epoch,val_loss,mean_entropy,survivors_total\n";
  for (const auto& row : result.epoch_rows) {
    csv += format_number(row.epoch) + "," + format_number(row.val_loss) + "," +
           format_number(row.mean_entropy) + "," + format_number(row.survivors_total) + "\n";
  }

  json jcell;
  jcell["manifest_hash"] = xnas::io::hash_hex(manifest.hash());
  jcell["planted"] = discrete_cell_to_json(result.cell, result.planted);
  if (result.discretized) {
    jcell["discovered"] = discrete_cell_to_json(result.cell, result.discovered);
    jcell["depth"] = result.depth;
    jcell["recovered"] = result.recovered;
  }
  jcell["mean_normalized_entropy"] = result.mean_entropy_final;

  OutputSet outputs;
  outputs.add(out_path, csv);
  outputs.add(cell_path, jcell.dump(2) + "\n");
  outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
  outputs.write_all();
  std::cout << "cell-search: " << result.epoch_rows.size() << " epochs";
  if (result.discretized) {
    std::cout << ", depth=" << format_number(result.depth)
              << ", recovered=" << (result.recovered ? "yes" : "no");
  }
  std::cout << ", final H=" << format_number(result.mean_entropy_final) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(std::int64_t trials, std::uint64_t seed, const std::string& out_path) {
  xnas::verify::SuiteConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.collect_rows = !out_path.empty();
  const auto report = xnas::verify::run_suite(cfg);

  if (!out_path.empty()) {
    json jc;
    jc["trials"] = cfg.trials;
    jc["seed"] = cfg.seed;
    jc["max_experts"] = cfg.max_experts;
    jc["max_steps"] = cfg.max_steps;
    jc["grad_bound"] = cfg.grad_bound;
    const auto manifest = make_manifest("verify", jc, cfg.seed, {out_path});
    std::string csv = csv_preamble(manifest);
    csv += std::string(xnas::regret::bound_report_csv_header()) + "\n";
    for (const auto& row : report.csv_rows) csv += row + "\n";
    OutputSet outputs;
    outputs.add(out_path, csv);
    outputs.add(xnas::io::manifest_path_for(out_path), manifest.dump());
    outputs.write_all();
  }
  std::cout << xnas::verify::report_text(cfg, report);
  return report.passed() ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponentiated-gradient-with-wipeout optimizer for prediction with expert advice: "
               "toys, stochastic studies, learning-rate planning and a toy cell search"};
  app.require_subcommand(1);

  // lr-plan
  std::string lr_config, lr_out = "lr_plan.csv";
  auto* lr = app.add_subcommand("lr-plan", "per-cell-type optimal learning rates");
  lr->add_option("--config", lr_config, "schedule config (JSON)")->required();
  lr->add_option("--out", lr_out, "output CSV path");

  // toy3d
  double t3_eta = 0.1;
  bool t3_wipeout = false;
  std::string t3_out = "toy3d.csv";
  auto* t3 = app.add_subcommand("toy3d", "deterministic 3D axes toy");
  t3->add_option("--eta", t3_eta, "learning rate");
  t3->add_flag("--wipeout", t3_wipeout, "enable wipeout");
  t3->add_option("--out", t3_out, "output CSV path");

  // toy2d
  std::string t2_variant = "linear_balanced";
  double t2_eta = 0.1;
  int t2_steps = 50;
  std::string t2_out = "toy2d.csv";
  auto* t2 = app.add_subcommand("toy2d", "deterministic 2D axes toy");
  t2->add_option("--variant", t2_variant, "linear_balanced | linear_imbalanced | quadratic");
  t2->add_option("--eta", t2_eta, "learning rate");
  t2->add_option("--steps", t2_steps, "number of rounds");
  t2->add_option("--out", t2_out, "output CSV path");

  // stochastic
  xnas::mc::StochasticConfig mc_cfg;
  std::vector<int> mc_n_list;
  std::vector<double> mc_sigma_list;
  std::string mc_optimizers = "xnas,gd_softmax";
  std::string mc_out = "stochastic.csv";
  bool mc_no_wipeout = false;
  double mc_eta = 0.0;
  auto* st = app.add_subcommand("stochastic", "Monte-Carlo expert-selection study");
  st->add_option("--n-list", mc_n_list, "expert-count sweep values")->delimiter(',');
  st->add_option("--sigma-list", mc_sigma_list, "reward-noise sweep values")->delimiter(',');
  st->add_option("--n", mc_cfg.n_experts, "experts (fixed when sweeping sigma)");
  st->add_option("--sigma", mc_cfg.sigma_r, "reward noise (fixed when sweeping N)");
  st->add_option("--runs", mc_cfg.runs, "Monte-Carlo runs per point");
  st->add_option("--steps", mc_cfg.steps, "rounds per run");
  st->add_option("--seed", mc_cfg.seed, "master seed");
  st->add_option("--grad-bound", mc_cfg.grad_bound, "reward clipping bound");
  st->add_option("--eta", mc_eta, "learning rate (default: eta* from the horizon)");
  st->add_flag("--no-wipeout", mc_no_wipeout, "disable wipeout for the xnas optimizer");
  st->add_option("--optimizers", mc_optimizers, "comma-separated: xnas,gd_softmax");
  st->add_option("--threads", mc_cfg.threads, "worker threads (0 = hardware)");
  st->add_option("--out", mc_out, "output CSV path");

  // cell-search
  std::string cs_config, cs_out = "cell_search.csv";
  auto* cs = app.add_subcommand("cell-search", "toy differentiable cell search");
  cs->add_option("--config", cs_config, "search config (JSON)")->required();
  cs->add_option("--out", cs_out, "output CSV path");

  // verify
  std::int64_t vf_trials = 10000;
  std::uint64_t vf_seed = 7;
  std::string vf_out;
  auto* vf = app.add_subcommand("verify", "run the lemma/theorem property suites");
  vf->add_option("--trials", vf_trials, "number of randomized trials");
  vf->add_option("--seed", vf_seed, "suite seed");
  vf->add_option("--out", vf_out, "optional per-trial bound report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (lr->parsed()) return run_lr_plan(lr_config, lr_out);
    if (t3->parsed()) return run_toy3d(t3_eta, t3_wipeout, t3_out);
    if (t2->parsed()) return run_toy2d(t2_variant, t2_eta, t2_steps, t2_out);
    if (st->parsed()) {
      if (mc_eta > 0.0) {
        mc_cfg.eta = mc_eta;
        mc_cfg.eta_auto = false;
      }
      mc_cfg.wipeout = !mc_no_wipeout;
      return run_stochastic(mc_cfg, mc_n_list, mc_sigma_list, mc_optimizers, mc_out);
    }
    if (cs->parsed()) return run_cell_search(cs_config, cs_out);
    if (vf->parsed()) return run_verify(vf_trials, vf_seed, vf_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
