#pragma once

#include "types.hpp"

#include <optional>
#include <string>
#include <utility>

namespace gda::data {

/// Labeled source sample S, unlabeled target sample T, and an optional small
/// labeled target sample T'. All feature rows share one dimension d.
struct Dataset {
  MatrixXd source_x;          // m x d
  VectorXd source_y;          // m
  MatrixXd target_x;          // n x d
  MatrixXd target_labeled_x;  // s x d (s may be 0)
  VectorXd target_labeled_y;  // s

  Index m() const { return source_x.rows(); }
  Index n() const { return target_x.rows(); }
  Index s() const { return target_labeled_x.rows(); }
  Index dim() const { return source_x.cols(); }
};

/// Checks the Dataset invariants (m >= 1, n >= 1, consistent d, finite
/// labels); throws on violation so no malformed Dataset circulates.
void validate(const Dataset& ds);

/// Weights over a sample. With simplex_flag the vector is a distribution
/// (entries >= 0, sum 1 within 1e-12); otherwise entries are free reals.
struct WeightVector {
  VectorXd weights;
  bool simplex_flag = true;
};

void validate(const WeightVector& w, Index expected_size);

WeightVector uniform_weights(Index size);

/// Labeling process of the synthetic benchmark: y = -x + x^3 + noise.
struct SyntheticOracle {
  double noise_std = 0.1;
  double label_mean(double x) const { return -x + x * x * x; }
};

/// Loads a Dataset from CSV files (comma-separated, no header unless
/// skip_header). Source and labeled-target files carry d feature columns
/// plus a trailing label column; the target file carries d columns.
Dataset load_dataset(const std::string& source_path, const std::string& target_path,
                     const std::optional<std::string>& target_labeled_path = {},
                     bool skip_header = false);

/// Writes the dataset back out in the load_dataset schema, full precision.
void save_dataset(const Dataset& ds, const std::string& source_path,
                  const std::string& target_path,
                  const std::optional<std::string>& target_labeled_path = {});

/// Synthetic benchmark sampler: source x ~ U[0.2, 1], target x ~ U[0, 0.25],
/// labels y = -x + x^3 + Normal(0, 0.1) with independent noise per point.
/// Deterministic in the seed.
std::pair<Dataset, SyntheticOracle> gen_synthetic(std::uint64_t seed, Index m,
                                                  Index n, Index s);

struct MergedSample {
  MatrixXd x;  // (m+s) x d
  VectorXd y;  // m+s
  WeightVector weights;
};

/// Combines S and T' into one training sample carrying the empirical
/// distribution (m/(m+s)) Qhat + (s/(m+s)) P'hat, i.e. weight 1/(m+s) per row.
MergedSample merge_augmented(const Dataset& ds);

}  // namespace gda::data
