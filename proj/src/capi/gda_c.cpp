#include "gda/gda.h"

#include "baselines.hpp"
#include "dataset.hpp"
#include "experiment.hpp"
#include "gdm.hpp"
#include "kernels.hpp"
#include "learner.hpp"
#include "surrogate.hpp"
#include "types.hpp"

#include <cstring>
#include <string>

struct gda_dataset {
  gda::data::Dataset ds;
};

struct gda_model {
  gda::baselines::BaselineFit fit;
};

namespace {

thread_local std::string g_last_error;

gda_status code_of(const gda::Error& e) {
  switch (e.code()) {
    case gda::ErrorCode::InvalidArgument: return GDA_ERR_INVALID_ARG;
    case gda::ErrorCode::Io: return GDA_ERR_IO;
    case gda::ErrorCode::Parse: return GDA_ERR_PARSE;
    case gda::ErrorCode::Dimension: return GDA_ERR_DIMENSION;
    case gda::ErrorCode::Solve: return GDA_ERR_SOLVE;
    case gda::ErrorCode::InfeasibleCenter: return GDA_ERR_INFEASIBLE_CENTER;
    case gda::ErrorCode::UnboundedDirection: return GDA_ERR_UNBOUNDED_DIRECTION;
    case gda::ErrorCode::EmptyValidation: return GDA_ERR_EMPTY_VALIDATION;
    case gda::ErrorCode::Internal: return GDA_ERR_INTERNAL;
  }
  return GDA_ERR_INTERNAL;
}

template <typename Fn>
gda_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GDA_OK;
  } catch (const gda::Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GDA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GDA_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gda::kernels::KernelSpec kernel_of(gda_kernel_kind kind, double sigma) {
  gda::kernels::KernelSpec k;
  k.kind = kind == GDA_KERNEL_GAUSSIAN ? gda::kernels::KernelKind::Gaussian
                                       : gda::kernels::KernelKind::Linear;
  if (kind == GDA_KERNEL_GAUSSIAN) k.sigma = sigma;
  return k;
}

}  // namespace

extern "C" {

const char* gda_version(void) { return "0.1.0"; }

const char* gda_last_error(void) { return g_last_error.c_str(); }

void gda_string_free(char* s) { std::free(s); }

gda_status gda_dataset_load(const char* source_csv, const char* target_csv,
                            const char* target_labeled_csv, int skip_header,
                            gda_dataset** out) {
  return guarded([&] {
    gda::require(source_csv && target_csv && out, gda::ErrorCode::InvalidArgument,
                 "null argument");
    std::optional<std::string> tl;
    if (target_labeled_csv && *target_labeled_csv) tl = target_labeled_csv;
    auto* handle = new gda_dataset{
        gda::data::load_dataset(source_csv, target_csv, tl, skip_header != 0)};
    *out = handle;
  });
}

gda_status gda_dataset_synth(uint64_t seed, int m, int n, int s, gda_dataset** out) {
  return guarded([&] {
    gda::require(out != nullptr, gda::ErrorCode::InvalidArgument, "null output");
    auto [ds, oracle] = gda::data::gen_synthetic(seed, m, n, s);
    (void)oracle;
    *out = new gda_dataset{std::move(ds)};
  });
}

gda_status gda_dataset_save(const gda_dataset* ds, const char* source_csv,
                            const char* target_csv, const char* target_labeled_csv) {
  return guarded([&] {
    gda::require(ds && source_csv && target_csv, gda::ErrorCode::InvalidArgument,
                 "null argument");
    std::optional<std::string> tl;
    if (target_labeled_csv && *target_labeled_csv) tl = target_labeled_csv;
    gda::data::save_dataset(ds->ds, source_csv, target_csv, tl);
  });
}

gda_status gda_dataset_dims(const gda_dataset* ds, int* m, int* n, int* s, int* d) {
  return guarded([&] {
    gda::require(ds != nullptr, gda::ErrorCode::InvalidArgument, "null dataset");
    if (m) *m = static_cast<int>(ds->ds.m());
    if (n) *n = static_cast<int>(ds->ds.n());
    if (s) *s = static_cast<int>(ds->ds.s());
    if (d) *d = static_cast<int>(ds->ds.dim());
  });
}

void gda_dataset_free(gda_dataset* ds) { delete ds; }

gda_status gda_fit(const gda_dataset* ds, gda_method method, gda_kernel_kind kernel,
                   double sigma, double lambda, double r, int boundary_samples,
                   uint64_t seed, gda_model** out) {
  return guarded([&] {
    gda::require(ds && out, gda::ErrorCode::InvalidArgument, "null argument");
    const gda::kernels::KernelSpec k = kernel_of(kernel, sigma);
    auto* handle = new gda_model{};
    try {
      if (method == GDA_METHOD_GDM) {
        gda::gdm::GdmOptions opts;
        if (boundary_samples > 0) opts.boundary_samples = boundary_samples;
        if (r > 0.0) {
          handle->fit.hypothesis =
              gda::gdm::gdm_fit_auto(ds->ds, k, lambda, r, seed, opts).hypothesis;
        } else {
          const auto grid = gda::surrogate::r_grid(ds->ds, 10);
          gda::require(!grid.empty(), gda::ErrorCode::InvalidArgument,
                       "cannot build a radius grid (all labels zero)");
          handle->fit.hypothesis =
              gda::gdm::validate_r(ds->ds, k, lambda, grid, opts.boundary_samples,
                                   seed, opts)
                  .h_best;
        }
      } else {
        gda::baselines::Method bm = gda::baselines::Method::Uniform;
        if (method == GDA_METHOD_DM) bm = gda::baselines::Method::DM;
        if (method == GDA_METHOD_KMM) bm = gda::baselines::Method::KMM;
        if (method == GDA_METHOD_FE) bm = gda::baselines::Method::FE;
        gda::baselines::BaselineOptions opts;
        opts.seed = seed;
        handle->fit = gda::baselines::fit_baseline(bm, ds->ds, k, lambda, opts);
      }
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

gda_status gda_model_predict(const gda_model* model, const double* x, int rows,
                             int dim, double* out) {
  return guarded([&] {
    gda::require(model && x && out && rows > 0 && dim > 0,
                 gda::ErrorCode::InvalidArgument, "bad predict arguments");
    gda::MatrixXd xm(rows, dim);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < dim; ++j) xm(i, j) = x[i * dim + j];
    const gda::VectorXd pred = gda::baselines::baseline_predict(model->fit, xm);
    for (int i = 0; i < rows; ++i) out[i] = pred[i];
  });
}

gda_status gda_model_mse(const gda_model* model, const double* x, const double* y,
                         int rows, int dim, double* out_mse) {
  return guarded([&] {
    gda::require(model && x && y && out_mse && rows > 0 && dim > 0,
                 gda::ErrorCode::InvalidArgument, "bad mse arguments");
    gda::MatrixXd xm(rows, dim);
    gda::VectorXd yv(rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < dim; ++j) xm(i, j) = x[i * dim + j];
      yv[i] = y[i];
    }
    *out_mse = gda::baselines::baseline_mse(model->fit, xm, yv);
  });
}

void gda_model_free(gda_model* model) { delete model; }

gda_status gda_run_experiment(const char* config_json, char** report_json) {
  return guarded([&] {
    gda::require(config_json && report_json, gda::ErrorCode::InvalidArgument,
                 "null argument");
    *report_json = dup_string(gda::experiment::run_experiment_json(config_json));
    gda::require(*report_json != nullptr, gda::ErrorCode::Internal, "out of memory");
  });
}

gda_status gda_profile(const char* config_json, char** csv_out) {
  return guarded([&] {
    gda::require(config_json && csv_out, gda::ErrorCode::InvalidArgument,
                 "null argument");
    *csv_out = dup_string(gda::experiment::profile_csv_json(config_json));
    gda::require(*csv_out != nullptr, gda::ErrorCode::Internal, "out of memory");
  });
}

gda_status gda_validate_r(const char* config_json, char** table_json) {
  return guarded([&] {
    gda::require(config_json && table_json, gda::ErrorCode::InvalidArgument,
                 "null argument");
    *table_json = dup_string(gda::experiment::validate_r_json(config_json));
    gda::require(*table_json != nullptr, gda::ErrorCode::Internal, "out of memory");
  });
}

gda_status gda_export_sdp(const char* config_json, const char* out_path) {
  return guarded([&] {
    gda::require(config_json && out_path, gda::ErrorCode::InvalidArgument,
                 "null argument");
    gda::experiment::export_sdp_json(config_json, out_path);
  });
}

gda_status gda_synth_csv(uint64_t seed, int m, int n, int s, const char* out_dir) {
  return guarded([&] {
    gda::require(out_dir != nullptr, gda::ErrorCode::InvalidArgument, "null out_dir");
    gda::experiment::synth_to_csv(seed, m, n, s, out_dir);
  });
}

}  // extern "C"
