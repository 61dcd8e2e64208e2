#pragma once

#include "dataset.hpp"
#include "kernels.hpp"
#include "types.hpp"

#include <string>
#include <vector>

namespace gda::experiment {

/// Runs the benchmark described by a JSON config and returns the JSON report
/// (deterministic given the config; timings only when requested). See
/// README for the schema.
std::string run_experiment_json(const std::string& config_json);

/// Objective profile over slopes for 1-D linear tasks: CSV rows
/// (w, source_objective, target_objective, dm_objective, gdm_objective).
std::string profile_csv_json(const std::string& config_json);

/// validate_r driven by a JSON config; returns the selection table as JSON.
std::string validate_r_json(const std::string& config_json);

/// Builds the exact-path semidefinite program from a JSON config and
/// writes the SDPA file.
void export_sdp_json(const std::string& config_json, const std::string& out_path);

/// Synthetic sample generation to CSV files (synth subcommand).
void synth_to_csv(std::uint64_t seed, Index m, Index n, Index s,
                  const std::string& out_dir);

/// Deterministic k-fold assignment: fold of each row is a pure function of
/// (seed, row count).
std::vector<int> cv_folds(std::uint64_t seed, Index rows, int folds);

/// Linear-interpolation quantile (the common R-7 rule) of a copy of xs.
double quantile(std::vector<double> xs, double q);

}  // namespace gda::experiment
