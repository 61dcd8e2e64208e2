#include "experiment.hpp"

#include "baselines.hpp"
#include "discrepancy.hpp"
#include "gdm.hpp"
#include "learner.hpp"
#include "linalg.hpp"
#include "qp.hpp"
#include "rng.hpp"
#include "sdp.hpp"
#include "surrogate.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <optional>

namespace gda::experiment {

using njson = nlohmann::ordered_json;

namespace {

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -25; e <= -5; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

struct Config {
  std::uint64_t seed = 0;
  int trials = 10;
  bool synthetic = true;
  Index m = 200, n = 200, s = 10;
  std::string source_path, target_path, target_labeled_path, eval_path;
  bool skip_header = false;
  Index eval_n = 400;
  kernels::KernelSpec kernel;
  bool sigma_search = false;
  std::vector<double> sigma_grid;
  std::vector<double> lambda_grid = default_lambda_grid();
  Index r_grid_size = 10;
  Index boundary_samples = 20;
  int folds = 10;
  int dm_iterations = 2000;
  double lambda_cap = 1.0;
  bool gdm_norm_cap = false;
  std::vector<std::string> methods = {"uniform", "dm", "gdm"};
  bool timings = false;
  bool normalize_by_target = false;
  // profile / export extras
  double lambda_fixed = 1e-3;
  double w_lo = -2.0, w_hi = 1.0;
  Index w_steps = 121;
  double rho = 0.05;       // family radius (loss threshold) for profile
  double sdp_r = 0.2;      // radius parameter of the exported program's loss ball
  std::string sdp_weights = "qmin";
  njson raw;
};

Config parse_config(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  Config cfg;
  cfg.raw = j;
  cfg.seed = j.value("seed", 0ULL);
  cfg.trials = j.value("trials", 10);
  require(cfg.trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    if (d.contains("synthetic")) {
      const auto& s = d["synthetic"];
      cfg.synthetic = true;
      cfg.m = s.value("m", 200);
      cfg.n = s.value("n", 200);
      cfg.s = s.value("s", 10);
    } else if (d.contains("paths")) {
      const auto& p = d["paths"];
      cfg.synthetic = false;
      cfg.source_path = p.value("source", "");
      cfg.target_path = p.value("target", "");
      cfg.target_labeled_path = p.value("target_labeled", "");
      cfg.eval_path = p.value("eval", "");
      cfg.skip_header = p.value("skip_header", false);
      require(!cfg.source_path.empty() && !cfg.target_path.empty(),
              ErrorCode::InvalidArgument, "dataset.paths needs source and target");
    } else {
      fail(ErrorCode::InvalidArgument, "dataset must be synthetic or paths");
    }
  }
  cfg.eval_n = j.value("eval_n", 400);

  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    const std::string kind = k.value("kind", "linear");
    if (kind == "linear") {
      cfg.kernel.kind = kernels::KernelKind::Linear;
    } else if (kind == "gaussian") {
      cfg.kernel.kind = kernels::KernelKind::Gaussian;
      if (k.contains("sigma")) {
        cfg.kernel.sigma = k["sigma"].get<double>();
      } else {
        cfg.sigma_search = true;  // grid filled per dataset dimension
      }
      if (k.contains("sigma_grid"))
        cfg.sigma_grid = k["sigma_grid"].get<std::vector<double>>();
    } else {
      fail(ErrorCode::InvalidArgument, "kernel.kind must be linear or gaussian");
    }
  }
  if (j.contains("lambda_grid"))
    cfg.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
  require(!cfg.lambda_grid.empty(), ErrorCode::InvalidArgument,
          "lambda_grid must be nonempty");
  cfg.r_grid_size = j.value("r_grid_size", 10);
  cfg.boundary_samples = j.value("boundary_samples", 20);
  cfg.folds = j.value("cv_folds", 10);
  cfg.dm_iterations = j.value("dm_iterations", 2000);
  cfg.lambda_cap = j.value("lambda_cap", 1.0);
  cfg.gdm_norm_cap = j.value("gdm_norm_cap", false);
  if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
  cfg.timings = j.value("timings", false);
  cfg.normalize_by_target = j.value("normalize_by_target", false);
  cfg.lambda_fixed = j.value("lambda", 1e-3);
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    cfg.w_lo = p.value("w_lo", -2.0);
    cfg.w_hi = p.value("w_hi", 1.0);
    cfg.w_steps = p.value("w_steps", 121);
    cfg.rho = p.value("r", 0.05);
  }
  if (j.contains("sdp")) {
    const auto& p = j["sdp"];
    cfg.sdp_r = p.value("r", 0.2);
    cfg.sdp_weights = p.value("weights", "qmin");
  }
  return cfg;
}

struct TrialData {
  data::Dataset ds;
  MatrixXd eval_x;
  VectorXd eval_y;
  bool has_oracle = false;
  data::SyntheticOracle oracle;
};

TrialData make_trial_data(const Config& cfg, std::uint64_t trial_seed) {
  TrialData td;
  if (cfg.synthetic) {
    auto [ds, oracle] = data::gen_synthetic(trial_seed, cfg.m, cfg.n, cfg.s);
    td.ds = std::move(ds);
    td.oracle = oracle;
    td.has_oracle = true;
    Rng rng(derive_seed(trial_seed, 0xe7a1));
    td.eval_x.resize(cfg.eval_n, 1);
    td.eval_y.resize(cfg.eval_n);
    for (Index i = 0; i < cfg.eval_n; ++i) {
      const double x = rng.uniform(0.0, 0.25);
      td.eval_x(i, 0) = x;
      td.eval_y[i] = td.oracle.label_mean(x) + rng.gaussian(0.0, td.oracle.noise_std);
    }
  } else {
    std::optional<std::string> tl;
    if (!cfg.target_labeled_path.empty()) tl = cfg.target_labeled_path;
    td.ds = data::load_dataset(cfg.source_path, cfg.target_path, tl, cfg.skip_header);
    require(!cfg.eval_path.empty(), ErrorCode::InvalidArgument,
            "file-mode experiments need dataset.paths.eval for the held-out MSE");
    const data::Dataset ev =
        data::load_dataset(cfg.eval_path, cfg.target_path, {}, cfg.skip_header);
    td.eval_x = ev.source_x;
    td.eval_y = ev.source_y;
  }
  return td;
}

// Weighted training sample of one baseline method (weights recomputed per
// CV fold so fold models never see validation rows).
struct TrainTable {
  MatrixXd x;
  VectorXd y;
  bool fe = false;  // rows already FE-mapped; validation uses the same rows
};

TrainTable training_table(baselines::Method method, const data::Dataset& ds) {
  TrainTable t;
  if (method == baselines::Method::DM) {
    t.x = ds.source_x;
    t.y = ds.source_y;
  } else if (method == baselines::Method::FE) {
    const Index rows = ds.m() + ds.s();
    t.x.resize(rows, 3 * ds.dim());
    t.y.resize(rows);
    t.x.topRows(ds.m()) = baselines::fe_map_rows(ds.source_x, baselines::Domain::Source);
    t.y.head(ds.m()) = ds.source_y;
    if (ds.s() > 0) {
      t.x.bottomRows(ds.s()) =
          baselines::fe_map_rows(ds.target_labeled_x, baselines::Domain::Target);
      t.y.tail(ds.s()) = ds.target_labeled_y;
    }
    t.fe = true;
  } else {
    const data::MergedSample merged = data::merge_augmented(ds);
    t.x = merged.x;
    t.y = merged.y;
  }
  return t;
}

VectorXd method_weights(baselines::Method method, const MatrixXd& x, const VectorXd& y,
                        const data::Dataset& ds, const kernels::KernelSpec& kernel,
                        const Config& cfg, std::uint64_t seed) {
  const Index rows = x.rows();
  switch (method) {
    case baselines::Method::Uniform:
    case baselines::Method::FE:
      return VectorXd::Constant(rows, 1.0 / static_cast<double>(rows));
    case baselines::Method::KMM: {
      data::Dataset sub;
      sub.source_x = x;
      sub.source_y = y;
      sub.target_x = ds.target_x;
      sub.target_labeled_x.resize(0, ds.dim());
      sub.target_labeled_y.resize(0);
      baselines::KmmConfig kc;
      kc.kernel = kernel;
      kc.epsilon = baselines::kmm_default_epsilon(rows);
      return kmm_weights(sub, kc) / static_cast<double>(rows);
    }
    case baselines::Method::DM: {
      data::Dataset sub;
      sub.source_x = x;
      sub.source_y = y;
      sub.target_x = ds.target_x;
      sub.target_labeled_x.resize(0, ds.dim());
      sub.target_labeled_y.resize(0);
      disc::HypothesisClassSpec hclass{kernel, cfg.lambda_cap};
      return disc::dm_minimize(sub, hclass, cfg.dm_iterations, seed).q_min.weights;
    }
  }
  fail(ErrorCode::Internal, "unhandled method");
}

struct CvChoice {
  double lambda = 0.0;
  double sigma = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

// 10-fold CV over (sigma, lambda) for one baseline; weights recomputed per
// fold and per sigma, ridge solves shared across the lambda grid.
CvChoice cv_select(baselines::Method method, const data::Dataset& ds,
                   const Config& cfg, std::uint64_t trial_seed,
                   const std::vector<double>& sigmas) {
  const TrainTable full = training_table(method, ds);
  const Index rows = full.x.rows();
  const int folds = std::min<int>(cfg.folds, static_cast<int>(rows));
  const std::vector<int> assign = cv_folds(derive_seed(trial_seed, 0xf01d), rows, folds);

  CvChoice best;
  for (double sigma : sigmas) {
    kernels::KernelSpec kernel = cfg.kernel;
    kernel.sigma = sigma;
    std::vector<double> score(cfg.lambda_grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
      std::vector<Index> tr, va;
      for (Index i = 0; i < rows; ++i)
        (assign[static_cast<size_t>(i)] == f ? va : tr).push_back(i);
      if (tr.empty() || va.empty()) continue;
      MatrixXd xtr(static_cast<Index>(tr.size()), full.x.cols());
      VectorXd ytr(static_cast<Index>(tr.size()));
      for (size_t i = 0; i < tr.size(); ++i) {
        xtr.row(static_cast<Index>(i)) = full.x.row(tr[i]);
        ytr[static_cast<Index>(i)] = full.y[tr[i]];
      }
      MatrixXd xva(static_cast<Index>(va.size()), full.x.cols());
      VectorXd yva(static_cast<Index>(va.size()));
      for (size_t i = 0; i < va.size(); ++i) {
        xva.row(static_cast<Index>(i)) = full.x.row(va[i]);
        yva[static_cast<Index>(i)] = full.y[va[i]];
      }
      const VectorXd w = method_weights(method, xtr, ytr, ds, kernel, cfg,
                                        derive_seed(trial_seed, 0xdf0 + f));
      for (size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        try {
          const learner::Hypothesis h =
              learner::krr_fit(kernel, xtr, ytr, w, cfg.lambda_grid[li]);
          score[li] += (learner::predict(h, xva) - yva).squaredNorm() /
                       static_cast<double>(yva.size());
        } catch (const Error&) {
          score[li] = std::numeric_limits<double>::infinity();
        }
      }
    }
    for (size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
      if (score[li] < best.score) {
        best.score = score[li];
        best.lambda = cfg.lambda_grid[li];
        best.sigma = sigma;
      }
    }
  }
  require(std::isfinite(best.score), ErrorCode::Solve, "cross-validation failed");
  return best;
}

struct MethodOutcome {
  bool ok = false;
  double mse = 0.0;
  double slope = 0.0;
  bool has_slope = false;
  double lambda = 0.0;
  double sigma = 0.0;
  double r = 0.0;
  bool has_r = false;
  double seconds = 0.0;
  std::string error;
};

double slope_of(const learner::Hypothesis& h) {
  MatrixXd one(1, 1);
  one(0, 0) = 1.0;
  return learner::predict(h, one)[0];
}

std::optional<baselines::Method> parse_method(const std::string& name) {
  if (name == "uniform") return baselines::Method::Uniform;
  if (name == "dm") return baselines::Method::DM;
  if (name == "kmm") return baselines::Method::KMM;
  if (name == "fe") return baselines::Method::FE;
  return std::nullopt;
}

MethodOutcome run_baseline(const std::string& name, const TrialData& td,
                           const Config& cfg, std::uint64_t trial_seed,
                           const std::vector<double>& sigmas) {
  MethodOutcome out;
  const auto method = parse_method(name);
  const CvChoice choice = cv_select(*method, td.ds, cfg, trial_seed, sigmas);
  kernels::KernelSpec kernel = cfg.kernel;
  kernel.sigma = choice.sigma;
  baselines::BaselineOptions bopts;
  bopts.dm_iterations = cfg.dm_iterations;
  bopts.dm_lambda_cap = cfg.lambda_cap;
  bopts.seed = derive_seed(trial_seed, 0xba5e);
  const baselines::BaselineFit fit =
      baselines::fit_baseline(*method, td.ds, kernel, choice.lambda, bopts);
  out.mse = baselines::baseline_mse(fit, td.eval_x, td.eval_y);
  out.lambda = choice.lambda;
  out.sigma = choice.sigma;
  if (td.ds.dim() == 1 && cfg.kernel.kind == kernels::KernelKind::Linear) {
    MatrixXd one(1, 1);
    one(0, 0) = 1.0;
    out.slope = baselines::baseline_predict(fit, one)[0];
    out.has_slope = true;
  }
  out.ok = true;
  return out;
}

MethodOutcome run_gdm(const TrialData& td, const Config& cfg,
                      std::uint64_t trial_seed, const std::vector<double>& sigmas) {
  MethodOutcome out;
  require(td.ds.s() > 0, ErrorCode::EmptyValidation,
          "gdm needs labeled target points to validate (lambda, r)");
  const std::vector<double> grid = surrogate::r_grid(td.ds, cfg.r_grid_size);
  require(!grid.empty(), ErrorCode::InvalidArgument, "degenerate radius grid");

  double best_val = std::numeric_limits<double>::infinity();
  bool have = false;
  gdm::GdmFitResult best_fit;

  for (double sigma : sigmas) {
    kernels::KernelSpec kernel = cfg.kernel;
    kernel.sigma = sigma;
    disc::HypothesisClassSpec hclass{kernel, cfg.lambda_cap};
    const disc::DmResult dm = disc::dm_minimize(
        td.ds, hclass, cfg.dm_iterations, derive_seed(trial_seed, 0xd3));
    for (size_t gi = 0; gi < grid.size(); ++gi) {
      surrogate::SurrogateSpec spec =
          gdm::default_family(td.ds, kernel, grid[gi], dm.q_min);
      if (cfg.gdm_norm_cap) spec.max_norm = cfg.lambda_cap;
      for (size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        try {
          gdm::GdmFitResult fit = gdm::gdm_fit(
              td.ds, kernel, cfg.lambda_grid[li], spec, cfg.boundary_samples,
              derive_seed(trial_seed, 0x9d30000 + gi));
          const double val = learner::mse(fit.hypothesis, td.ds.target_labeled_x,
                                          td.ds.target_labeled_y);
          if (val < best_val) {
            best_val = val;
            best_fit = std::move(fit);
            out.lambda = cfg.lambda_grid[li];
            out.sigma = sigma;
            out.r = grid[gi];
            have = true;
          }
        } catch (const Error&) {
          // infeasible radius for this family; skip the grid point
        }
      }
    }
  }
  require(have, ErrorCode::Solve, "gdm: every (lambda, r) grid point failed");
  out.has_r = true;
  out.mse = learner::mse(best_fit.hypothesis, td.eval_x, td.eval_y);
  if (td.ds.dim() == 1 && cfg.kernel.kind == kernels::KernelKind::Linear) {
    out.slope = slope_of(best_fit.hypothesis);
    out.has_slope = true;
  }
  out.ok = true;
  return out;
}

MethodOutcome run_target_reference(const TrialData& td, const Config& cfg,
                                   std::uint64_t trial_seed,
                                   const std::vector<double>& sigmas) {
  // Ideal-hypothesis reference: ridge regression on the target sample with
  // oracle labels (synthetic mode only).
  MethodOutcome out;
  Rng rng(derive_seed(trial_seed, 0x7a26));
  VectorXd labels(td.ds.n());
  for (Index i = 0; i < td.ds.n(); ++i)
    labels[i] = td.oracle.label_mean(td.ds.target_x(i, 0)) +
                rng.gaussian(0.0, td.oracle.noise_std);

  const Index rows = td.ds.n();
  const int folds = std::min<int>(cfg.folds, static_cast<int>(rows));
  const std::vector<int> assign = cv_folds(derive_seed(trial_seed, 0xf01d), rows, folds);
  CvChoice best;
  for (double sigma : sigmas) {
    kernels::KernelSpec kernel = cfg.kernel;
    kernel.sigma = sigma;
    for (size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
      double score = 0.0;
      for (int f = 0; f < folds; ++f) {
        std::vector<Index> tr, va;
        for (Index i = 0; i < rows; ++i)
          (assign[static_cast<size_t>(i)] == f ? va : tr).push_back(i);
        if (tr.empty() || va.empty()) continue;
        MatrixXd xtr(static_cast<Index>(tr.size()), td.ds.dim());
        VectorXd ytr(static_cast<Index>(tr.size()));
        for (size_t i = 0; i < tr.size(); ++i) {
          xtr.row(static_cast<Index>(i)) = td.ds.target_x.row(tr[i]);
          ytr[static_cast<Index>(i)] = labels[tr[i]];
        }
        const VectorXd w =
            VectorXd::Constant(xtr.rows(), 1.0 / static_cast<double>(xtr.rows()));
        const learner::Hypothesis h =
            learner::krr_fit(kernel, xtr, ytr, w, cfg.lambda_grid[li]);
        double fold_score = 0.0;
        Index cnt = 0;
        for (Index i = 0; i < rows; ++i) {
          if (assign[static_cast<size_t>(i)] != f) continue;
          MatrixXd xi = td.ds.target_x.row(i);
          fold_score += std::pow(learner::predict(h, xi)[0] - labels[i], 2.0);
          ++cnt;
        }
        score += fold_score / static_cast<double>(cnt);
      }
      if (score < best.score) {
        best.score = score;
        best.lambda = cfg.lambda_grid[li];
        best.sigma = sigma;
      }
    }
  }
  kernels::KernelSpec kernel = cfg.kernel;
  kernel.sigma = best.sigma;
  const VectorXd w = VectorXd::Constant(rows, 1.0 / static_cast<double>(rows));
  const learner::Hypothesis h =
      learner::krr_fit(kernel, td.ds.target_x, labels, w, best.lambda);
  out.mse = learner::mse(h, td.eval_x, td.eval_y);
  out.lambda = best.lambda;
  out.sigma = best.sigma;
  if (td.ds.dim() == 1 && cfg.kernel.kind == kernels::KernelKind::Linear) {
    out.slope = slope_of(h);
    out.has_slope = true;
  }
  out.ok = true;
  return out;
}

njson outcome_json(const MethodOutcome& o, bool timings) {
  njson j;
  j["ok"] = o.ok;
  if (!o.ok) {
    j["error"] = o.error;
    return j;
  }
  j["mse"] = o.mse;
  j["lambda"] = o.lambda;
  if (o.sigma > 0.0) j["sigma"] = o.sigma;
  if (o.has_r) j["r"] = o.r;
  if (o.has_slope) j["slope"] = o.slope;
  if (timings) j["seconds"] = o.seconds;
  return j;
}

}  // namespace

std::vector<int> cv_folds(std::uint64_t seed, Index rows, int folds) {
  require(folds >= 2, ErrorCode::InvalidArgument, "need at least 2 folds");
  std::vector<Index> perm(static_cast<size_t>(rows));
  for (Index i = 0; i < rows; ++i) perm[static_cast<size_t>(i)] = i;
  Rng rng(seed);
  for (Index i = rows - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  std::vector<int> assign(static_cast<size_t>(rows));
  for (Index pos = 0; pos < rows; ++pos)
    assign[static_cast<size_t>(perm[static_cast<size_t>(pos)])] =
        static_cast<int>(pos % folds);
  return assign;
}

double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), ErrorCode::InvalidArgument, "quantile of empty set");
  std::sort(xs.begin(), xs.end());
  const double h = q * (static_cast<double>(xs.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - std::floor(h)) * (xs[hi] - xs[lo]);
}

std::string run_experiment_json(const std::string& config_json) {
  const Config cfg = parse_config(config_json);

  std::vector<std::string> methods = cfg.methods;
  njson report;
  report["config"] = cfg.raw;
  report["trials"] = njson::array();

  std::vector<std::string> all_methods = methods;
  bool with_target = cfg.synthetic;
  if (with_target) all_methods.push_back("target");
  std::map<std::string, std::vector<double>> mses;
  std::map<std::string, int> failures;

  // One self-contained job per trial; trials run concurrently and the report
  // is assembled by trial index, so scheduling cannot affect the output.
  const auto run_trial = [&](int t) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<uint64_t>(t));
    const TrialData td = make_trial_data(cfg, trial_seed);
    std::vector<double> sigmas = {cfg.kernel.sigma};
    if (cfg.kernel.kind == kernels::KernelKind::Gaussian && cfg.sigma_search) {
      sigmas = cfg.sigma_grid.empty() ? kernels::sigma_grid(td.ds.dim())
                                      : cfg.sigma_grid;
    }
    std::vector<MethodOutcome> outcomes;
    for (const std::string& name : all_methods) {
      MethodOutcome out;
      const auto started = std::chrono::steady_clock::now();
      try {
        if (name == "gdm") {
          out = run_gdm(td, cfg, trial_seed, sigmas);
        } else if (name == "target") {
          out = run_target_reference(td, cfg, trial_seed, sigmas);
        } else if (parse_method(name)) {
          out = run_baseline(name, td, cfg, trial_seed, sigmas);
        } else {
          fail(ErrorCode::InvalidArgument, "unknown method: " + name);
        }
      } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  started)
                        .count();
      outcomes.push_back(std::move(out));
    }
    return outcomes;
  };

  std::vector<std::future<std::vector<MethodOutcome>>> futures;
  futures.reserve(static_cast<size_t>(cfg.trials));
  for (int t = 0; t < cfg.trials; ++t)
    futures.push_back(std::async(std::launch::async, run_trial, t));

  for (int t = 0; t < cfg.trials; ++t) {
    const std::vector<MethodOutcome> outcomes = futures[static_cast<size_t>(t)].get();
    njson trial;
    trial["trial"] = t;
    trial["seed"] = derive_seed(cfg.seed, static_cast<uint64_t>(t));
    njson per_method;
    for (size_t mi = 0; mi < all_methods.size(); ++mi) {
      const std::string& name = all_methods[mi];
      const MethodOutcome& out = outcomes[mi];
      per_method[name] = outcome_json(out, cfg.timings);
      if (out.ok)
        mses[name].push_back(out.mse);
      else
        failures[name] += 1;
    }
    trial["methods"] = per_method;
    report["trials"].push_back(trial);
  }

  njson summary;
  for (const std::string& name : all_methods) {
    njson s;
    const auto it = mses.find(name);
    if (it == mses.end() || it->second.empty()) {
      s["failures"] = failures[name];
      summary[name] = s;
      continue;
    }
    const auto& xs = it->second;
    s["median"] = quantile(xs, 0.5);
    s["q25"] = quantile(xs, 0.25);
    s["q75"] = quantile(xs, 0.75);
    const double mean =
        std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= std::max<double>(1.0, static_cast<double>(xs.size()) - 1.0);
    s["mean"] = mean;
    s["std"] = std::sqrt(var);
    s["failures"] = failures[name];
    summary[name] = s;
  }
  if (cfg.normalize_by_target && summary.contains("target") &&
      summary["target"].contains("median")) {
    const double ref = summary["target"]["median"].get<double>();
    njson norm;
    for (const std::string& name : all_methods)
      if (summary[name].contains("median"))
        norm[name] = summary[name]["median"].get<double>() / ref;
    report["normalized_median"] = norm;
  }
  report["summary"] = summary;
  return report.dump(2) + "\n";
}

std::string profile_csv_json(const std::string& config_json) {
  const Config cfg = parse_config(config_json);
  const std::uint64_t seed = derive_seed(cfg.seed, 0);
  TrialData td = make_trial_data(cfg, seed);
  require(td.ds.dim() == 1, ErrorCode::InvalidArgument,
          "objective profile is defined for 1-D linear hypotheses");
  require(cfg.kernel.kind == kernels::KernelKind::Linear, ErrorCode::InvalidArgument,
          "objective profile is defined for the linear kernel");
  require(td.has_oracle, ErrorCode::InvalidArgument,
          "objective profile needs oracle target labels (synthetic mode)");
  const double lambda = cfg.lambda_fixed;

  Rng rng(derive_seed(seed, 0x7a26));
  VectorXd target_labels(td.ds.n());
  for (Index i = 0; i < td.ds.n(); ++i)
    target_labels[i] = td.oracle.label_mean(td.ds.target_x(i, 0)) +
                       rng.gaussian(0.0, td.oracle.noise_std);

  disc::HypothesisClassSpec hclass{cfg.kernel, cfg.lambda_cap};
  const disc::DmResult dm =
      disc::dm_minimize(td.ds, hclass, cfg.dm_iterations, derive_seed(seed, 0xd3));
  surrogate::SurrogateSpec spec =
      gdm::default_family(td.ds, cfg.kernel, cfg.rho, dm.q_min);
  if (cfg.gdm_norm_cap) spec.max_norm = cfg.lambda_cap;

  std::vector<learner::Hypothesis> samples;
  for (size_t b = 0; b < spec.balls.size(); ++b) {
    try {
      const learner::Hypothesis center =
          surrogate::center_hypothesis(spec.balls[b], 1e-6);
      auto ball_samples = surrogate::sample_boundary_group(
          {spec.balls[b]}, spec.max_norm, center, cfg.boundary_samples,
          derive_seed(seed, 0xb0 + b));
      for (auto& h : ball_samples) samples.push_back(std::move(h));
    } catch (const Error&) {
      // empty disjunct at this radius
    }
  }
  require(!samples.empty(), ErrorCode::InfeasibleCenter,
          "surrogate family is empty at the requested radius");

  const VectorXd xs = td.ds.source_x.col(0);
  const VectorXd xt = td.ds.target_x.col(0);
  const VectorXd& q = dm.q_min.weights;
  std::string out = "w,source_objective,target_objective,dm_objective,gdm_objective\n";
  char line[256];
  for (Index i = 0; i < cfg.w_steps; ++i) {
    const double w = cfg.w_lo + (cfg.w_hi - cfg.w_lo) * static_cast<double>(i) /
                                    static_cast<double>(cfg.w_steps - 1);
    const double src =
        lambda * w * w +
        (w * xs - td.ds.source_y).squaredNorm() / static_cast<double>(td.ds.m());
    const double tgt =
        lambda * w * w +
        (w * xt - target_labels).squaredNorm() / static_cast<double>(td.ds.n());
    const double dmv =
        lambda * w * w + (w * xs - td.ds.source_y).cwiseAbs2().dot(q);
    learner::Hypothesis hw;
    hw.kernel = cfg.kernel;
    hw.anchors = MatrixXd::Ones(1, 1);
    hw.coeffs = VectorXd::Constant(1, w);
    const double gdmv = lambda * w * w + gdm::surrogate_loss(hw, samples, td.ds);
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g,%.12g\n", w, src, tgt,
                  dmv, gdmv);
    out += line;
  }
  return out;
}

std::string validate_r_json(const std::string& config_json) {
  const Config cfg = parse_config(config_json);
  const std::uint64_t seed = derive_seed(cfg.seed, 0);
  const TrialData td = make_trial_data(cfg, seed);
  const std::vector<double> grid = surrogate::r_grid(td.ds, cfg.r_grid_size);
  require(!grid.empty(), ErrorCode::InvalidArgument,
          "degenerate radius grid (all labels zero)");
  gdm::GdmOptions opts;
  opts.dm_iterations = cfg.dm_iterations;
  opts.lambda_cap = cfg.lambda_cap;
  opts.cap_with_hypothesis_norm = cfg.gdm_norm_cap;
  const gdm::ValidateResult res =
      gdm::validate_r(td.ds, cfg.kernel, cfg.lambda_fixed, grid, cfg.boundary_samples,
                      seed, opts);
  njson j;
  j["r_best"] = res.r_best;
  j["lambda"] = cfg.lambda_fixed;
  j["table"] = njson::array();
  for (const auto& e : res.table) {
    njson row;
    row["r"] = e.r;
    if (e.failed)
      row["failed"] = true;
    else
      row["mse_on_validation"] = e.mse_on_validation;
    j["table"].push_back(row);
  }
  return j.dump(2) + "\n";
}

void export_sdp_json(const std::string& config_json, const std::string& out_path) {
  require(!out_path.empty(), ErrorCode::InvalidArgument,
          "export-sdp needs an output path");
  const Config cfg = parse_config(config_json);
  const std::uint64_t seed = derive_seed(cfg.seed, 0);
  const TrialData td = make_trial_data(cfg, seed);
  data::WeightVector q;
  if (cfg.sdp_weights == "uniform") {
    q = data::uniform_weights(td.ds.m());
  } else if (cfg.sdp_weights == "qmin") {
    disc::HypothesisClassSpec hclass{cfg.kernel, cfg.lambda_cap};
    q = disc::dm_minimize(td.ds, hclass, cfg.dm_iterations, derive_seed(seed, 0xd3))
            .q_min;
  } else {
    fail(ErrorCode::InvalidArgument, "sdp.weights must be qmin or uniform");
  }
  const kernels::GramBundle bundle = kernels::normalized_bundle(cfg.kernel, td.ds, q);
  const sdp::SDPProblem prob = sdp::build_sdp(bundle, cfg.lambda_fixed, cfg.sdp_r);
  sdp::export_sdpa(sdp::to_sdpa(prob), out_path);
}

void synth_to_csv(std::uint64_t seed, Index m, Index n, Index s,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto [ds, oracle] = data::gen_synthetic(seed, m, n, s);
  (void)oracle;
  const std::string src = (fs::path(out_dir) / "source.csv").string();
  const std::string tgt = (fs::path(out_dir) / "target.csv").string();
  if (s > 0) {
    const std::string tl = (fs::path(out_dir) / "target_labeled.csv").string();
    data::save_dataset(ds, src, tgt, tl);
  } else {
    data::save_dataset(ds, src, tgt);
  }
}

}  // namespace gda::experiment
