#include "dbmd/cli.hpp"

#include <cstdio>
#include <fstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbmd/clustering.hpp"
#include "dbmd/datagen.hpp"
#include "dbmd/h_solver.hpp"
#include "dbmd/io.hpp"
#include "dbmd/noise.hpp"
#include "dbmd/rng.hpp"
#include "dbmd/runtime.hpp"
#include "dbmd/w_solvers.hpp"

namespace dbmd {

namespace {

std::string shard_path(const std::string& prefix, std::size_t c,
                       const std::string& ext) {
  return prefix + "_shard" + std::to_string(c) + ext;
}

std::vector<double> broadcast_per_worker(std::vector<double> values,
                                         std::size_t workers,
                                         double fallback,
                                         const char* what) {
  if (values.empty()) values.assign(workers, fallback);
  if (values.size() == 1) values.assign(workers, values[0]);
  require(values.size() == workers,
          std::string(what) + ": give one value, or one per worker");
  return values;
}

struct SynthArgs {
  std::string out;
  std::string format = "bin";
  int rank = 10;
  double basis_value = 1.5;
  int basis_support = 20;
  int basis_overlap = 2;
  int workers = 5;
  int cols = 100;
  std::string h_dist = "bernoulli";
  double p = 0.1;
  double alpha0 = 1.0;
  std::vector<double> sigma;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
  const std::string ext = "." + a.format;
  const MatrixFormat fmt =
      a.format == "csv" ? MatrixFormat::kCsv : MatrixFormat::kBin;
  const Matrix w =
      gen_basis(a.basis_value, a.basis_support, a.basis_overlap, a.rank);
  const auto workers = static_cast<std::size_t>(a.workers);
  std::vector<Matrix> h_blocks(workers);
  for (std::size_t c = 0; c < workers; ++c) {
    const std::uint64_t block_seed = CounterRng::derive(a.seed, kStreamHInit, c);
    if (a.h_dist == "bernoulli") {
      h_blocks[c] = gen_h_bernoulli(a.rank, a.cols, a.p, block_seed);
    } else {
      h_blocks[c] = gen_h_dirichlet(a.rank, a.cols,
                                    Vector::Constant(a.rank, a.alpha0),
                                    block_seed);
    }
  }
  const auto sigma =
      broadcast_per_worker(a.sigma, workers, 1.0, "--sigma");
  const auto shards = gen_observations(w, h_blocks, sigma, a.seed);

  std::vector<int> truth;
  for (const auto& h : h_blocks) {
    const auto labels = assign_clusters(h);
    truth.insert(truth.end(), labels.begin(), labels.end());
  }

  save_matrix(a.out + "_basis" + ext, w, fmt);
  for (std::size_t c = 0; c < workers; ++c) {
    save_matrix(shard_path(a.out, c, ext), shards[c].x, fmt);
  }
  save_labels(a.out + "_labels.csv", truth);

  std::printf("synth: %d workers, %lld features, %d cols/shard, rank %d\n",
              a.workers, static_cast<long long>(w.rows()), a.cols, a.rank);
  std::printf("  basis  %s_basis%s\n", a.out.c_str(), ext.c_str());
  std::printf("  shards %s_shard0%s .. %s_shard%zu%s\n", a.out.c_str(),
              ext.c_str(), a.out.c_str(), workers - 1, ext.c_str());
  std::printf("  labels %s_labels.csv\n", a.out.c_str());
  return 0;
}

struct FitArgs {
  std::vector<std::string> inputs;
  int workers = 0;
  std::string partition_scheme = "contiguous";
  std::string solver = "admm";
  int rank = 0;
  double lambda = 0.0;
  double alpha0 = 1.0;
  double rho = 50.0;
  double gamma = 0.001;
  bool weighted = false;
  std::vector<double> sigma2;
  double w_tol = 1e-2;
  int max_w_iters = 1000;
  int agd_min_iters = 30;
  int max_outer = 50;
  double outer_tol = 1e-4;
  double epsilon_h = 1e-8;
  int restarts = 1;
  std::uint64_t seed = 0;
  std::string metrics_out;
  std::string labels_out;
  std::string w_out;
  std::string h_out;
};

int run_fit(const FitArgs& a) {
  std::vector<DataShard> shards;
  if (a.inputs.size() == 1 && a.workers > 1) {
    const Matrix x = load_matrix(a.inputs[0], format_from_path(a.inputs[0]));
    const auto scheme = a.partition_scheme == "strided"
                            ? PartitionScheme::kStrided
                            : PartitionScheme::kContiguous;
    shards = partition(x, a.workers, scheme);
  } else {
    require(a.workers == 0 ||
                a.workers == static_cast<int>(a.inputs.size()),
            "--workers must match the number of shard files");
    for (const auto& path : a.inputs) {
      DataShard shard;
      shard.x = load_matrix(path, format_from_path(path));
      shards.push_back(std::move(shard));
    }
  }
  const auto sigma2 =
      broadcast_per_worker(a.sigma2, shards.size(), 1.0, "--sigma2");
  for (std::size_t c = 0; c < shards.size(); ++c) {
    require(sigma2[c] > 0.0, "--sigma2 values must be positive");
    shards[c].sigma2 = sigma2[c];
  }

  RunConfig cfg;
  cfg.strategy = strategy_from_string(a.solver);
  cfg.workers = static_cast<int>(shards.size());
  cfg.hp.rank = a.rank;
  cfg.hp.lambda = a.lambda;
  cfg.hp.alpha = Hyperparams::shifted_alpha(a.alpha0, a.rank);
  cfg.hp.rho = a.rho;
  cfg.hp.gamma = a.gamma;
  cfg.hp.weighted = a.weighted;
  cfg.hp.w_tol = a.w_tol;
  cfg.hp.max_w_iters = a.max_w_iters;
  cfg.hp.agd_min_iters = a.agd_min_iters;
  cfg.hp.max_outer = a.max_outer;
  cfg.hp.outer_tol = a.outer_tol;
  cfg.hp.epsilon_h = a.epsilon_h;
  cfg.hp.restarts = a.restarts;
  cfg.hp.seed = a.seed;

  auto [state, report] = fit(shards, cfg);

  Eigen::Index total_cols = 0;
  for (const auto& shard : shards) total_cols += shard.cols();
  std::printf("fit: solver %s, %d workers, %lld x %lld data, rank %d%s\n",
              a.solver.c_str(), cfg.workers,
              static_cast<long long>(shards[0].rows()),
              static_cast<long long>(total_cols), a.rank,
              a.weighted ? ", weighted" : "");
  const double final_obj =
      report.rounds.empty() ? report.initial_objective
                            : report.rounds.back().objective;
  std::printf("  objective %.6f -> %.6f over %zu outer rounds (%s)\n",
              report.initial_objective, final_obj, report.rounds.size(),
              report.converged ? "converged" : "round limit");
  std::printf("  comm: %llu entries up, %llu down\n",
              static_cast<unsigned long long>(report.comm.collect_entries),
              static_cast<unsigned long long>(report.comm.broadcast_entries));
  std::printf("  wall time %.3f s\n", report.wall_time_s);

  if (!a.metrics_out.empty()) {
    std::ofstream out(a.metrics_out);
    require(static_cast<bool>(out), a.metrics_out + ": cannot open");
    out << report.to_json_string(cfg) << '\n';
  }
  if (!a.labels_out.empty()) {
    std::vector<int> labels;
    for (const auto& h : state.h) {
      const auto block = assign_clusters(h);
      labels.insert(labels.end(), block.begin(), block.end());
    }
    save_labels(a.labels_out, labels);
  }
  if (!a.w_out.empty()) {
    save_matrix(a.w_out, state.w, format_from_path(a.w_out));
  }
  if (!a.h_out.empty()) {
    for (std::size_t c = 0; c < state.h.size(); ++c) {
      save_matrix(shard_path(a.h_out, c, ".bin"), state.h[c],
                  MatrixFormat::kBin);
    }
  }
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string metrics_out;
};

int run_eval(const EvalArgs& a) {
  const auto pred = load_labels(a.pred);
  const auto truth = load_labels(a.truth);
  int k_pred = 0;
  int k_true = 0;
  for (int v : pred) k_pred = std::max(k_pred, v + 1);
  for (int v : truth) k_true = std::max(k_true, v + 1);
  const double acc = hungarian_accuracy(pred, truth, k_pred, k_true);
  std::printf("accuracy %.6f (%zu samples, %d predicted vs %d true classes)\n",
              acc, pred.size(), k_pred, k_true);
  if (!a.metrics_out.empty()) {
    nlohmann::json doc;
    doc["schema"] = "dbmd/1";
    doc["accuracy"] = acc;
    doc["samples"] = pred.size();
    doc["k_pred"] = k_pred;
    doc["k_true"] = k_true;
    std::ofstream out(a.metrics_out);
    require(static_cast<bool>(out), a.metrics_out + ": cannot open");
    out << doc.dump(2) << '\n';
  }
  return 0;
}

struct VarratioArgs {
  std::string solver = "admm";
  int reps = 100;
  double s_min = 1.0;
  double s_max = 10.0;
  double s_step = 1.0;
  int rank = 10;
  int cols = 100;
  int workers = 5;
  double p = 0.1;
  double basis_value = 1.5;
  int basis_support = 20;
  int basis_overlap = 2;
  double rho = 50.0;
  double gamma = 1.0;
  double w_tol = 1e-6;
  int max_w_iters = 4000;
  std::uint64_t seed = 0;
  std::string out = "varratio.csv";
};

int run_varratio(const VarratioArgs& a) {
  require(a.s_step > 0.0, "--s-step must be positive");
  require(a.s_min <= a.s_max, "--s-min must not exceed --s-max");
  std::ofstream csv(a.out);
  require(static_cast<bool>(csv), a.out + ": cannot open");
  csv << "s,theoretical,empirical,reps_used\n";
  std::printf("%8s %14s %12s %10s\n", "s", "theoretical", "empirical",
              "reps");
  for (double s = a.s_min; s <= a.s_max + 1e-12; s += a.s_step) {
    VarianceRatioConfig cfg;
    cfg.basis_value = a.basis_value;
    cfg.basis_support = a.basis_support;
    cfg.basis_overlap = a.basis_overlap;
    cfg.rank = a.rank;
    cfg.cols_per_shard = a.cols;
    cfg.workers = a.workers;
    cfg.bernoulli_p = a.p;
    cfg.sigma.assign(static_cast<std::size_t>(a.workers), 1.0);
    cfg.sigma.back() = s;
    cfg.strategy = strategy_from_string(a.solver);
    cfg.rho = a.rho;
    cfg.gamma = a.gamma;
    cfg.reps = a.reps;
    cfg.seed = a.seed;
    cfg.w_tol = a.w_tol;
    cfg.max_w_iters = a.max_w_iters;
    const auto res = empirical_variance_ratio(cfg);
    csv << s << ',' << res.theoretical << ',' << res.empirical << ','
        << res.reps_used << '\n';
    std::printf("%8.3f %14.6f %12.6f %10d\n", s, res.theoretical,
                res.empirical, res.reps_used);
  }
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

struct ConvergenceArgs {
  std::string dist = "bernoulli";
  std::vector<int> cols = {100, 500, 5000};
  std::vector<std::string> solvers = {"agd", "admm", "cease"};
  int rank = 20;
  double p = 0.05;
  double alpha0 = 1.0;
  int workers = 5;
  double sigma = 1.0;
  double lambda = 0.0;
  double rho = 50.0;
  double gamma = 0.001;
  double basis_value = 1.5;
  int basis_support = 20;
  int basis_overlap = 2;
  double w_tol = 1e-2;
  int max_w_iters = 2000;
  int agd_min_iters = 30;
  std::uint64_t seed = 0;
  std::string out = "convergence.csv";
};

int run_convergence(const ConvergenceArgs& a) {
  std::ofstream csv(a.out);
  require(static_cast<bool>(csv), a.out + ": cannot open");
  csv << "dist,n_c,solver,round,objective,step_norm,primal_residual\n";
  const Matrix w_true =
      gen_basis(a.basis_value, a.basis_support, a.basis_overlap, a.rank);
  std::printf("%10s %7s %7s %8s %6s %16s %12s\n", "dist", "n_c", "solver",
              "rounds", "conv", "objective", "entries");
  for (int n_c : a.cols) {
    const auto workers = static_cast<std::size_t>(a.workers);
    std::vector<Matrix> h_blocks(workers);
    for (std::size_t c = 0; c < workers; ++c) {
      const std::uint64_t block_seed =
          CounterRng::derive(a.seed, kStreamHInit, c);
      h_blocks[c] =
          a.dist == "bernoulli"
              ? gen_h_bernoulli(a.rank, n_c, a.p, block_seed)
              : gen_h_dirichlet(a.rank, n_c,
                                Vector::Constant(a.rank, a.alpha0),
                                block_seed);
    }
    const std::vector<double> sigma(workers, a.sigma);
    const auto shards = gen_observations(w_true, h_blocks, sigma, a.seed);
    for (const auto& solver : a.solvers) {
      ModelState state;
      state.w = Matrix::Ones(w_true.rows(), a.rank);
      state.h = h_blocks;
      Hyperparams hp;
      hp.rank = a.rank;
      hp.lambda = a.lambda;
      hp.rho = a.rho;
      hp.gamma = a.gamma;
      hp.w_tol = a.w_tol;
      hp.max_w_iters = a.max_w_iters;
      hp.agd_min_iters = a.agd_min_iters;
      CommLedger ledger;
      const auto res = run_w_update(strategy_from_string(solver), state,
                                    shards, hp, ledger, true);
      for (std::size_t k = 0; k < res.trace.size(); ++k) {
        csv << a.dist << ',' << n_c << ',' << solver << ',' << (k + 1) << ','
            << res.trace[k].objective << ',' << res.trace[k].step_norm << ','
            << res.trace[k].primal_residual << '\n';
      }
      std::printf("%10s %7d %7s %8d %6s %16.4f %12llu\n", a.dist.c_str(), n_c,
                  solver.c_str(), res.rounds, res.converged ? "yes" : "no",
                  res.trace.back().objective,
                  static_cast<unsigned long long>(ledger.total_entries()));
    }
  }
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Distributed sparse-basis / simplex-coefficient matrix "
               "decomposition"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a sharded synthetic dataset");
  synth_cmd->add_option("--out", synth.out, "Output path prefix")->required();
  synth_cmd->add_option("--format", synth.format, "File format")
      ->check(CLI::IsMember({"csv", "bin"}));
  synth_cmd->add_option("--rank", synth.rank, "Basis rank");
  synth_cmd->add_option("--basis-value", synth.basis_value,
                        "Nonzero basis entry value");
  synth_cmd->add_option("--basis-support", synth.basis_support,
                        "Nonzero rows per basis column");
  synth_cmd->add_option("--basis-overlap", synth.basis_overlap,
                        "Rows shared by consecutive basis columns");
  synth_cmd->add_option("--workers", synth.workers, "Number of shards");
  synth_cmd->add_option("--cols", synth.cols, "Columns per shard");
  synth_cmd->add_option("--h-dist", synth.h_dist, "Coefficient distribution")
      ->check(CLI::IsMember({"bernoulli", "dirichlet"}));
  synth_cmd->add_option("--p", synth.p, "Bernoulli inclusion probability");
  synth_cmd->add_option("--alpha0", synth.alpha0,
                        "Dirichlet concentration (dirichlet only)");
  synth_cmd
      ->add_option("--sigma", synth.sigma,
                   "Noise std, one value or one per worker")
      ->delimiter(',');
  synth_cmd->add_option("--seed", synth.seed, "Seed");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the decomposition");
  fit_cmd->add_option("inputs", fit_args.inputs,
                      "Shard files, or one file to partition")
      ->required();
  fit_cmd->add_option("--workers", fit_args.workers,
                      "Worker count when partitioning a single file");
  fit_cmd->add_option("--partition", fit_args.partition_scheme,
                      "Partition scheme for a single input")
      ->check(CLI::IsMember({"contiguous", "strided"}));
  fit_cmd->add_option("--solver", fit_args.solver, "Basis update strategy")
      ->check(CLI::IsMember({"agd", "admm", "cease"}));
  fit_cmd->add_option("--rank", fit_args.rank, "Factorization rank")
      ->required();
  fit_cmd->add_option("--lambda", fit_args.lambda, "L1 weight on the basis");
  fit_cmd->add_option("--alpha0", fit_args.alpha0,
                      "Simplex prior concentration (>= 1)");
  fit_cmd->add_option("--rho", fit_args.rho, "Consensus penalty (admm)");
  fit_cmd->add_option("--gamma", fit_args.gamma, "Proximal weight (cease)");
  fit_cmd->add_flag("--weighted", fit_args.weighted,
                    "Noise-weighted aggregation");
  fit_cmd
      ->add_option("--sigma2", fit_args.sigma2,
                   "Initial noise variances, one value or one per worker")
      ->delimiter(',');
  fit_cmd->add_option("--w-tol", fit_args.w_tol, "Basis movement tolerance");
  fit_cmd->add_option("--max-w-iters", fit_args.max_w_iters,
                      "Max basis rounds per outer round");
  fit_cmd->add_option("--agd-min-iters", fit_args.agd_min_iters,
                      "Minimum accelerated rounds");
  fit_cmd->add_option("--max-outer", fit_args.max_outer, "Max outer rounds");
  fit_cmd->add_option("--outer-tol", fit_args.outer_tol,
                      "Outer objective tolerance");
  fit_cmd->add_option("--epsilon-h", fit_args.epsilon_h,
                      "Coefficient interior floor");
  fit_cmd
      ->add_option("--restarts", fit_args.restarts,
                   "Independent starts; the lowest final objective wins")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit_args.seed, "Seed");
  fit_cmd->add_option("--metrics-out", fit_args.metrics_out,
                      "Write a metrics JSON here");
  fit_cmd->add_option("--labels-out", fit_args.labels_out,
                      "Write cluster labels here");
  fit_cmd->add_option("--w-out", fit_args.w_out, "Write the basis here");
  fit_cmd->add_option("--h-out", fit_args.h_out,
                      "Prefix for per-shard coefficient files");

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Score labels against ground truth");
  eval_cmd->add_option("--pred", eval_args.pred, "Predicted labels")
      ->required();
  eval_cmd->add_option("--truth", eval_args.truth, "True labels")->required();
  eval_cmd->add_option("--metrics-out", eval_args.metrics_out,
                       "Write a metrics JSON here");

  VarratioArgs var_args;
  auto* var_cmd = app.add_subcommand(
      "varratio", "Weighted vs plain aggregation variance sweep");
  var_cmd->add_option("--solver", var_args.solver, "Strategy")
      ->check(CLI::IsMember({"admm", "cease"}));
  var_cmd->add_option("--reps", var_args.reps, "Noise redraws per point");
  var_cmd->add_option("--s-min", var_args.s_min, "Smallest last-shard std");
  var_cmd->add_option("--s-max", var_args.s_max, "Largest last-shard std");
  var_cmd->add_option("--s-step", var_args.s_step, "Std increment");
  var_cmd->add_option("--rank", var_args.rank, "Basis rank");
  var_cmd->add_option("--cols", var_args.cols, "Columns per shard");
  var_cmd->add_option("--workers", var_args.workers, "Worker count");
  var_cmd->add_option("--p", var_args.p, "Bernoulli inclusion probability");
  var_cmd->add_option("--basis-value", var_args.basis_value,
                      "Nonzero basis entry value");
  var_cmd->add_option("--basis-support", var_args.basis_support,
                      "Nonzero rows per basis column");
  var_cmd->add_option("--basis-overlap", var_args.basis_overlap,
                      "Rows shared by consecutive columns");
  var_cmd->add_option("--rho", var_args.rho, "Consensus penalty");
  var_cmd->add_option("--gamma", var_args.gamma, "Proximal weight");
  var_cmd->add_option("--w-tol", var_args.w_tol, "Basis movement tolerance");
  var_cmd->add_option("--max-w-iters", var_args.max_w_iters,
                      "Max rounds per update");
  var_cmd->add_option("--seed", var_args.seed, "Seed");
  var_cmd->add_option("--out", var_args.out, "Output CSV");

  ConvergenceArgs conv_args;
  auto* conv_cmd = app.add_subcommand(
      "convergence", "Per-round basis update traces across shard widths");
  conv_cmd->add_option("--dist", conv_args.dist, "Coefficient distribution")
      ->check(CLI::IsMember({"bernoulli", "dirichlet"}));
  conv_cmd->add_option("--cols", conv_args.cols, "Columns per shard, list")
      ->delimiter(',');
  conv_cmd->add_option("--solvers", conv_args.solvers, "Strategies to trace")
      ->delimiter(',');
  conv_cmd->add_option("--rank", conv_args.rank, "Basis rank");
  conv_cmd->add_option("--p", conv_args.p, "Bernoulli inclusion probability");
  conv_cmd->add_option("--alpha0", conv_args.alpha0,
                       "Dirichlet concentration");
  conv_cmd->add_option("--workers", conv_args.workers, "Worker count");
  conv_cmd->add_option("--sigma", conv_args.sigma, "Noise std (all shards)");
  conv_cmd->add_option("--lambda", conv_args.lambda, "L1 weight");
  conv_cmd->add_option("--rho", conv_args.rho, "Consensus penalty");
  conv_cmd->add_option("--gamma", conv_args.gamma, "Proximal weight");
  conv_cmd->add_option("--basis-value", conv_args.basis_value,
                       "Nonzero basis entry value");
  conv_cmd->add_option("--basis-support", conv_args.basis_support,
                       "Nonzero rows per basis column");
  conv_cmd->add_option("--basis-overlap", conv_args.basis_overlap,
                       "Rows shared by consecutive columns");
  conv_cmd->add_option("--w-tol", conv_args.w_tol,
                       "Basis movement tolerance");
  conv_cmd->add_option("--max-w-iters", conv_args.max_w_iters,
                       "Max rounds per update");
  conv_cmd->add_option("--agd-min-iters", conv_args.agd_min_iters,
                       "Minimum accelerated rounds");
  conv_cmd->add_option("--seed", conv_args.seed, "Seed");
  conv_cmd->add_option("--out", conv_args.out, "Output CSV");

  try {
    app.parse(argc, argv);
    if (*synth_cmd) return run_synth(synth);
    if (*fit_cmd) return run_fit(fit_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*var_cmd) return run_varratio(var_args);
    return run_convergence(conv_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("dbmd");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dbmd
