// dynlsm: simulate, fit and evaluate dynamic latent space network models.
//
// Exit status: 0 success, 1 usage error, 2 data or numeric error.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dynlsm/engine.hpp"
#include "dynlsm/io.hpp"
#include "dynlsm/metrics.hpp"
#include "dynlsm/simulate.hpp"

using namespace dynlsm;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;

// "out.csv" -> "out_r3.csv" when running replicates.
std::string replicate_path(const std::string& path, int r, int total) {
  if (path.empty() || total <= 1) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const std::string tag = "_r" + std::to_string(r + 1);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_file(path, text);
}

struct SimulateArgs {
  std::string kind;
  Index n = 100;
  Index T = 10;
  Index d = 2;
  double tau = 0.1;
  double rho = 0.0;
  std::optional<double> intercept;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
  std::string out, truth, probs, heldout;
  std::optional<double> holdout;
  std::optional<std::uint64_t> mask_seed;
  int replicates = 1;
};

void run_simulate(const SimulateArgs& a) {
  const LikelihoodKind kind = parse_kind(a.kind);
  if (a.holdout && a.heldout.empty())
    throw ConfigError("--heldout: required with --holdout");
  if (a.replicates < 1) throw ConfigError("--replicates: must be >= 1");
  for (int r = 0; r < a.replicates; ++r) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(r);
    SimulatedSeries sim;
    if (kind == LikelihoodKind::bernoulli) {
      BinarySimSpec spec{a.n, a.T, a.d, a.tau, a.rho, a.intercept.value_or(1.0),
                         seed};
      sim = simulate_binary(spec);
    } else {
      GaussianSimSpec spec{a.n,         a.T, a.d, a.tau, a.intercept.value_or(0.1),
                           a.noise_sd, seed};
      sim = simulate_gaussian(spec);
    }
    const std::string seed_tag = "seed=" + std::to_string(seed);
    io::SeriesFile file{sim.series, seed};
    if (a.holdout) {
      const auto masked =
          mask_edges(sim.series, *a.holdout, a.mask_seed.value_or(seed));
      file.series = masked.train;
      io::EdgeTable held;
      held.comment = seed_tag + ",holdout=" + io::format_double(*a.holdout);
      for (const auto& h : masked.heldout) {
        held.edges.push_back(h.edge);
        held.values.push_back(h.value);
      }
      io::save_edge_table(replicate_path(a.heldout, r, a.replicates), held);
    }
    io::save_series(replicate_path(a.out, r, a.replicates), file);
    if (!a.truth.empty())
      io::save_trajectory(replicate_path(a.truth, r, a.replicates),
                          {seed_tag, sim.truth});
    if (!a.probs.empty()) {
      if (kind != LikelihoodKind::bernoulli)
        throw ConfigError("--probs: bernoulli only");
      io::EdgeTable probs;
      probs.comment = seed_tag;
      probs.column = "prob";
      for (const auto& e : all_pairs(sim.series.n, sim.series.T)) {
        probs.edges.push_back(e);
        probs.values.push_back(sim.probabilities[e.t](e.i, e.j));
      }
      io::save_edge_table(replicate_path(a.probs, r, a.replicates), probs);
    }
  }
}

struct FitArgs {
  std::string series, config, out, trace;
  bool dense_zeros = false;
  bool include_xi = false;
  std::optional<std::string> family, scales;
  std::optional<Index> d;
  std::optional<double> alpha, tau, sigma0, tol;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
  bool jacobi = false;
};

ModelConfig build_config(const FitArgs& a) {
  ModelConfig cfg;
  if (!a.config.empty()) cfg = io::config_from_json(io::read_file(a.config));
  if (a.family) cfg.family = parse_family(*a.family);
  if (a.d) cfg.d = *a.d;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.max_iters) cfg.max_iters = *a.max_iters;
  if (a.tol) cfg.stop_tol = *a.tol;
  if (a.seed) cfg.seed = *a.seed;
  if (a.jacobi) cfg.jacobi = true;
  if (a.scales) {
    if (*a.scales == "fixed")
      cfg.scales = FixedScales{};
    else if (*a.scales == "adaptive_global")
      cfg.scales = AdaptiveGlobal{};
    else if (*a.scales == "adaptive_nodewise")
      cfg.scales = AdaptiveNodewise{};
    else
      throw ConfigError("--scales: expected fixed, adaptive_global or "
                        "adaptive_nodewise");
  }
  if (a.tau || a.sigma0) {
    auto* f = std::get_if<FixedScales>(&cfg.scales);
    if (!f) throw ConfigError("--tau/--sigma0: require --scales fixed");
    if (a.tau) f->tau = *a.tau;
    if (a.sigma0) f->sigma0 = *a.sigma0;
  }
  validate_config(cfg);
  return cfg;
}

std::string provenance(const io::FitArchive& a) {
  return "family=" + to_string(a.config.family) +
         ",scales=" + scale_mode_name(a.config.scales) +
         ",fit_seed=" + std::to_string(a.config.seed) +
         ",data_seed=" + std::to_string(a.data.seed);
}

int run_fit(const FitArgs& a) {
  const ModelConfig cfg = build_config(a);
  const auto file = io::load_series(a.series, {a.dense_zeros});
  io::FitArchive archive;
  archive.config = cfg;
  archive.data = {file.series.kind, file.series.n, file.series.T,
                  file.series.noise_sd, file.seed};
  int status = 0;
  try {
    archive.result = fit(file.series, cfg);
  } catch (const FitError& e) {
    std::cerr << "dynlsm fit: " << e.what() << '\n';
    archive.result = e.partial();
    status = kDataError;
  }
  if (status == 0) io::save_archive(a.out, archive, a.include_xi);
  if (!a.trace.empty())
    io::save_trace(a.trace, provenance(archive), archive.result.trace);
  return status;
}

void run_predict(const std::string& fit_path, const std::string& pairs_path,
                 const std::string& out) {
  const auto archive = io::load_archive(fit_path);
  const VariationalState& s = archive.result.state;
  std::vector<EdgeRef> pairs;
  if (pairs_path.empty()) {
    pairs = all_pairs(s.n, s.T);
  } else {
    pairs = io::load_edge_table(pairs_path, /*require_values=*/false).edges;
    for (const auto& e : pairs)
      if (e.t >= s.T || e.i >= s.n || e.j >= s.n)
        throw DataError(pairs_path + ": pair (" + std::to_string(e.t + 1) +
                        "," + std::to_string(e.i + 1) + "," +
                        std::to_string(e.j + 1) + ") outside the fitted network");
  }
  io::EdgeTable scores;
  scores.comment = provenance(archive);
  scores.column = "score";
  scores.edges = pairs;
  scores.values = predict_edges(s, archive.data.kind, pairs);
  std::ostringstream text;
  io::write_edge_table(text, scores);
  emit(out, text.str());
}

struct EvaluateArgs {
  std::string scores, labels, fit, truth, out;
};

void run_evaluate(const EvaluateArgs& a) {
  const auto scores = io::load_edge_table(a.scores);
  if (scores.edges.empty()) throw DataError(a.scores + ": scores: no rows");
  io::Metrics m;
  m.scores_comment = scores.comment;
  if (!a.labels.empty()) {
    const auto labels = io::load_edge_table(a.labels);
    if (labels.edges.empty()) throw DataError(a.labels + ": labels: no rows");
    std::map<std::tuple<Index, Index, Index>, double> by_edge;
    for (std::size_t k = 0; k < scores.edges.size(); ++k) {
      const auto& e = scores.edges[k];
      by_edge[{e.t, e.i, e.j}] = scores.values[k];
    }
    std::vector<double> pred, truth;
    bool binary = true;
    for (std::size_t k = 0; k < labels.edges.size(); ++k) {
      const auto& e = labels.edges[k];
      const auto it = by_edge.find({e.t, e.i, e.j});
      if (it == by_edge.end())
        throw DataError(a.scores + ": score: no row for (" +
                        std::to_string(e.t + 1) + "," +
                        std::to_string(e.i + 1) + "," +
                        std::to_string(e.j + 1) + ")");
      pred.push_back(it->second);
      truth.push_back(labels.values[k]);
      binary = binary && (labels.values[k] == 0.0 || labels.values[k] == 1.0);
    }
    m.count = pred.size();
    double sse = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k)
      sse += (pred[k] - truth[k]) * (pred[k] - truth[k]);
    m.rmse = std::sqrt(sse / static_cast<double>(pred.size()));
    try {
      m.pcc = pcc(pred, truth);
    } catch (const DataError&) {
    }
    if (binary) {
      m.tp_ratio = tp_ratio(pred, truth);
      try {
        m.auc = auc(pred, truth);
      } catch (const DataError&) {
      }
    }
  }
  if (!a.truth.empty()) {
    if (a.fit.empty()) throw ConfigError("--truth: requires --fit");
    const auto archive = io::load_archive(a.fit);
    const auto truth = io::load_trajectory(a.truth);
    m.rmse_inner_products =
        rmse_inner_products(trajectory(archive.result.state), truth.positions);
  }
  if (a.labels.empty() && a.truth.empty())
    throw ConfigError("evaluate: give --labels and/or --fit with --truth");
  emit(a.out, io::metrics_to_json(m));
}

void run_align(const std::string& fit_path, const std::string& out) {
  const auto archive = io::load_archive(fit_path);
  const auto aligned = procrustes_align(trajectory(archive.result.state));
  std::ostringstream text;
  io::write_trajectory(text, {provenance(archive), aligned.positions});
  emit(out, text.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational inference for dynamic latent space networks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a network series");
  simulate->add_option("--kind", sim.kind, "bernoulli or gaussian")->required();
  simulate->add_option("--n", sim.n, "Nodes");
  simulate->add_option("--T", sim.T, "Time points");
  simulate->add_option("--d", sim.d, "Latent dimension");
  simulate->add_option("--tau", sim.tau, "Transition sd");
  simulate->add_option("--rho", sim.rho, "Increment correlation (bernoulli)");
  simulate->add_option("--intercept", sim.intercept,
                       "Intercept (default 1 bernoulli, 0.1 gaussian)");
  simulate->add_option("--noise-sd", sim.noise_sd, "Noise sd (gaussian)");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--out", sim.out, "Series CSV")->required();
  simulate->add_option("--truth", sim.truth, "True trajectory CSV");
  simulate->add_option("--probs", sim.probs, "True edge probabilities CSV");
  simulate->add_option("--holdout", sim.holdout, "Fraction of pairs to hold out");
  simulate->add_option("--heldout", sim.heldout, "Heldout entries CSV");
  simulate->add_option("--mask-seed", sim.mask_seed, "Holdout seed");
  simulate->add_option("--replicates", sim.replicates,
                       "Replicates with seeds seed, seed+1, ...");

  FitArgs fa;
  auto* fitc = app.add_subcommand("fit", "Fit a model to a series");
  fitc->add_option("--series", fa.series, "Series CSV")->required();
  fitc->add_flag("--dense-zeros", fa.dense_zeros,
                 "Absent bernoulli rows are observed zeros");
  fitc->add_option("--config", fa.config, "Config JSON");
  fitc->add_option("--family", fa.family, "smf or mf");
  fitc->add_option("--d", fa.d, "Latent dimension");
  fitc->add_option("--alpha", fa.alpha, "Likelihood power");
  fitc->add_option("--scales", fa.scales,
                   "fixed, adaptive_global or adaptive_nodewise");
  fitc->add_option("--tau", fa.tau, "Transition sd (fixed scales)");
  fitc->add_option("--sigma0", fa.sigma0, "Initial sd (fixed scales)");
  fitc->add_option("--max-iters", fa.max_iters, "Sweep cap");
  fitc->add_option("--tol", fa.tol, "Stopping tolerance");
  fitc->add_option("--seed", fa.seed, "Initialization seed");
  fitc->add_flag("--jacobi", fa.jacobi, "Update node chains in parallel");
  fitc->add_option("--out", fa.out, "Fit archive JSON")->required();
  fitc->add_option("--trace", fa.trace, "Trace CSV");
  fitc->add_flag("--include-xi", fa.include_xi,
                 "Store tangent parameters in the archive");

  std::string pred_fit, pred_pairs, pred_out;
  auto* predict = app.add_subcommand("predict", "Score node pairs");
  predict->add_option("--fit", pred_fit, "Fit archive")->required();
  predict->add_option("--pairs", pred_pairs, "Pair list CSV (default: all)");
  predict->add_option("--out", pred_out, "Scores CSV (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions");
  evaluate->add_option("--scores", ev.scores, "Scores CSV")->required();
  evaluate->add_option("--labels", ev.labels, "Labels or true values CSV");
  evaluate->add_option("--fit", ev.fit, "Fit archive (with --truth)");
  evaluate->add_option("--truth", ev.truth, "True trajectory CSV");
  evaluate->add_option("--out", ev.out, "Metrics JSON (default stdout)");

  std::string align_fit, align_out;
  auto* align = app.add_subcommand("align", "Procrustes-aligned trajectory");
  align->add_option("--fit", align_fit, "Fit archive")->required();
  align->add_option("--out", align_out, "Trajectory CSV (default stdout)");

  std::string export_fit, export_out;
  auto* exportc = app.add_subcommand("export", "Readable fit summary");
  exportc->add_option("--fit", export_fit, "Fit archive")->required();
  exportc->add_option("--out", export_out, "Summary JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "dynlsm: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*simulate) run_simulate(sim);
    if (*fitc) return run_fit(fa);
    if (*predict) run_predict(pred_fit, pred_pairs, pred_out);
    if (*evaluate) run_evaluate(ev);
    if (*align) run_align(align_fit, align_out);
    if (*exportc)
      emit(export_out, io::summary_json(io::load_archive(export_fit)));
  } catch (const ConfigError& e) {
    std::cerr << "dynlsm: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "dynlsm: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
