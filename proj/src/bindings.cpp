#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbmd/clustering.hpp"
#include "dbmd/datagen.hpp"
#include "dbmd/h_solver.hpp"
#include "dbmd/noise.hpp"
#include "dbmd/numerics.hpp"
#include "dbmd/runtime.hpp"

namespace py = pybind11;

namespace {

dbmd::Hyperparams make_hp(int rank, double lambda, double alpha0, double rho,
                          double gamma, bool weighted, std::uint64_t seed,
                          double w_tol, int max_w_iters, int agd_min_iters,
                          int max_outer, double outer_tol, double epsilon_h,
                          int restarts) {
  dbmd::Hyperparams hp;
  hp.rank = rank;
  hp.lambda = lambda;
  hp.alpha = dbmd::Hyperparams::shifted_alpha(alpha0, rank);
  hp.rho = rho;
  hp.gamma = gamma;
  hp.weighted = weighted;
  hp.seed = seed;
  hp.w_tol = w_tol;
  hp.max_w_iters = max_w_iters;
  hp.agd_min_iters = agd_min_iters;
  hp.max_outer = max_outer;
  hp.outer_tol = outer_tol;
  hp.epsilon_h = epsilon_h;
  hp.restarts = restarts;
  return hp;
}

py::dict py_fit(const dbmd::Matrix& x, int workers, const std::string& solver,
                int rank, double lambda, double alpha0, double rho,
                double gamma, bool weighted, std::uint64_t seed, double w_tol,
                int max_w_iters, int agd_min_iters, int max_outer,
                double outer_tol, double epsilon_h, int restarts,
                const std::string& partition_scheme) {
  dbmd::RunConfig cfg;
  cfg.strategy = dbmd::strategy_from_string(solver);
  cfg.workers = workers;
  cfg.hp = make_hp(rank, lambda, alpha0, rho, gamma, weighted, seed, w_tol,
                   max_w_iters, agd_min_iters, max_outer, outer_tol,
                   epsilon_h, restarts);
  const auto scheme = partition_scheme == "strided"
                          ? dbmd::PartitionScheme::kStrided
                          : dbmd::PartitionScheme::kContiguous;

  dbmd::ModelState state;
  dbmd::FitReport report;
  {
    py::gil_scoped_release release;
    const auto shards = dbmd::partition(x, workers, scheme);
    auto result = dbmd::fit(shards, cfg);
    state = std::move(result.first);
    report = std::move(result.second);
  }

  std::vector<int> labels;
  py::list h_blocks;
  for (const auto& h : state.h) {
    const auto block = dbmd::assign_clusters(h);
    labels.insert(labels.end(), block.begin(), block.end());
    h_blocks.append(h);
  }
  std::vector<double> objectives{report.initial_objective};
  std::vector<int> w_rounds;
  for (const auto& round : report.rounds) {
    objectives.push_back(round.objective);
    w_rounds.push_back(round.w_rounds);
  }
  py::dict comm;
  comm["broadcast_entries"] = report.comm.broadcast_entries;
  comm["collect_entries"] = report.comm.collect_entries;
  comm["total_entries"] = report.comm.total_entries();

  py::dict out;
  out["w"] = state.w;
  out["h"] = h_blocks;
  out["labels"] = labels;
  out["sigma2"] = state.sigma2;
  out["objective"] = objectives;
  out["w_rounds"] = w_rounds;
  out["converged"] = report.converged;
  out["wall_time_s"] = report.wall_time_s;
  out["comm"] = comm;
  return out;
}

py::dict py_varratio(const std::string& solver, std::vector<double> sigma,
                     int reps, int rank, int cols_per_shard, double p,
                     double rho, double gamma, std::uint64_t seed,
                     double w_tol, int max_w_iters) {
  dbmd::VarianceRatioConfig cfg;
  cfg.strategy = dbmd::strategy_from_string(solver);
  cfg.workers = static_cast<int>(sigma.size());
  cfg.sigma = std::move(sigma);
  cfg.reps = reps;
  cfg.rank = rank;
  cfg.cols_per_shard = cols_per_shard;
  cfg.bernoulli_p = p;
  cfg.rho = rho;
  cfg.gamma = gamma;
  cfg.seed = seed;
  cfg.w_tol = w_tol;
  cfg.max_w_iters = max_w_iters;
  dbmd::VarianceRatioResult res;
  {
    py::gil_scoped_release release;
    res = dbmd::empirical_variance_ratio(cfg);
  }
  py::dict out;
  out["empirical"] = res.empirical;
  out["theoretical"] = res.theoretical;
  out["reps_used"] = res.reps_used;
  out["reps_failed"] = res.reps_failed;
  return out;
}

dbmd::Matrix py_update_h(const dbmd::Matrix& x, const dbmd::Matrix& w,
                         const dbmd::Matrix& h0, double alpha0,
                         double epsilon_h) {
  dbmd::DataShard shard;
  shard.x = x;
  dbmd::Hyperparams hp;
  hp.rank = static_cast<int>(w.cols());
  hp.alpha = dbmd::Hyperparams::shifted_alpha(alpha0, hp.rank);
  hp.epsilon_h = epsilon_h;
  py::gil_scoped_release release;
  return dbmd::update_h(shard, w, h0, hp);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed sparse-basis / simplex-coefficient matrix "
            "decomposition";
  m.attr("__version__") = "0.1.0";

  m.def("soft_threshold", &dbmd::soft_threshold, py::arg("x"), py::arg("t"),
        "Entrywise sign(x) * max(|x| - t, 0)");
  m.def("spectral_norm", &dbmd::spectral_norm, py::arg("a"),
        py::arg("tol") = 1e-8, py::arg("max_iters") = 10000,
        "Largest eigenvalue of a symmetric PSD matrix");
  m.def("gen_basis", &dbmd::gen_basis, py::arg("value"), py::arg("support"),
        py::arg("overlap"), py::arg("rank"),
        "Banded sparse ground-truth basis");
  m.def("gen_h_bernoulli", &dbmd::gen_h_bernoulli, py::arg("rank"),
        py::arg("cols"), py::arg("p"), py::arg("seed"),
        "Normalized Bernoulli indicator coefficients");
  m.def("gen_h_dirichlet", &dbmd::gen_h_dirichlet, py::arg("rank"),
        py::arg("cols"), py::arg("alpha0"), py::arg("seed"),
        "Dirichlet coefficients");
  m.def("variance_ratio_theoretical", &dbmd::variance_ratio_theoretical,
        py::arg("sigma2"),
        "Harmonic over arithmetic mean of the shard variances");
  m.def("empirical_variance_ratio", &py_varratio, py::arg("solver"),
        py::arg("sigma"), py::arg("reps") = 100, py::arg("rank") = 10,
        py::arg("cols_per_shard") = 100, py::arg("p") = 0.1,
        py::arg("rho") = 50.0, py::arg("gamma") = 1.0, py::arg("seed") = 0,
        py::arg("w_tol") = 1e-6, py::arg("max_w_iters") = 4000,
        "Monte-Carlo weighted vs plain aggregation variance ratio");
  m.def(
      "hungarian_accuracy",
      [](const std::vector<int>& pred, const std::vector<int>& truth,
         int k_pred, int k_true) {
        if (k_pred < 0 || k_true < 0) {
          return dbmd::hungarian_accuracy(pred, truth);
        }
        return dbmd::hungarian_accuracy(pred, truth, k_pred, k_true);
      },
      py::arg("pred"), py::arg("truth"), py::arg("k_pred") = -1,
      py::arg("k_true") = -1, "Best one-to-one relabeling accuracy");
  m.def("assign_clusters", &dbmd::assign_clusters, py::arg("h"),
        "argmax coefficient row per column");
  m.def("update_h", &py_update_h, py::arg("x"), py::arg("w"), py::arg("h0"),
        py::arg("alpha0") = 1.0, py::arg("epsilon_h") = 1e-8,
        "One simplex-constrained coefficient pass");
  m.def("fit", &py_fit, py::arg("x"), py::arg("workers"),
        py::arg("solver") = "admm", py::arg("rank") = 2,
        py::arg("lambda_") = 0.0, py::arg("alpha0") = 1.0,
        py::arg("rho") = 50.0, py::arg("gamma") = 0.001,
        py::arg("weighted") = false, py::arg("seed") = 0,
        py::arg("w_tol") = 1e-2, py::arg("max_w_iters") = 1000,
        py::arg("agd_min_iters") = 30, py::arg("max_outer") = 50,
        py::arg("outer_tol") = 1e-4, py::arg("epsilon_h") = 1e-8,
        py::arg("restarts") = 1, py::arg("partition") = "contiguous",
        "Partition a data matrix by columns and fit the decomposition");
}
