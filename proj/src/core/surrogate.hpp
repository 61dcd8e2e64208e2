#pragma once

#include "dataset.hpp"
#include "kernels.hpp"
#include "learner.hpp"
#include "types.hpp"

#include <cstdint>
#include <vector>

namespace gda::surrogate {

/// One convex membership constraint over source points:
///   g(h) = sum_i weights_i |h(x_i) - y_i|^p - r^p <= 0,
/// i.e. the weighted L_p loss ball of radius parameter r around the labels.
struct SurrogateBall {
  data::WeightVector weights;
  double r = 0.0;
  double p = 2.0;
  kernels::KernelSpec kernel;
  MatrixXd points;  // source sample the weights index
  VectorXd labels;

  double g(const VectorXd& predictions_at_points) const;
  double g(const learner::Hypothesis& h) const;
};

void validate(const SurrogateBall& ball);

/// The surrogate family: a list of balls sharing kernel and source sample.
/// Each ball is its own constraint group (a union of balls); boundary samples
/// from every group are pooled into one hull. An optional norm cap adds
/// ||h||_K <= max_norm to every group.
struct SurrogateSpec {
  std::vector<SurrogateBall> balls;
  double max_norm = std::numeric_limits<double>::infinity();
};

void validate(const SurrogateSpec& spec);

/// Interior point of a ball: a ridge fit on the ball's own weights. Fails with
/// InfeasibleCenter when the fit's weighted loss already reaches r^p.
learner::Hypothesis center_hypothesis(const SurrogateBall& ball, double lambda_center);

/// Ray sampling from the boundary of one constraint group: pick an isotropic
/// direction over source-anchor coefficients, walk to the smallest positive
/// root of any g_i(h0 + t d) = 0, return h0 + t* d. Every returned hypothesis
/// satisfies all group constraints within 1e-8 and lies on at least one
/// boundary within 1e-8. Degenerate directions (no finite root anywhere) are
/// resampled up to 100 times, then UnboundedDirection.
std::vector<learner::Hypothesis> sample_boundary_group(
    const std::vector<SurrogateBall>& group, double max_norm,
    const learner::Hypothesis& center, Index k, std::uint64_t seed);

/// k boundary samples per ball of the spec (balls sampled as separate groups,
/// results pooled in ball order).
std::vector<learner::Hypothesis> sample_boundary(
    const SurrogateSpec& spec, const std::vector<learner::Hypothesis>& centers,
    Index k, std::uint64_t seed);

/// Radius grid of count evenly spaced values spanning (0, mean(y_i^2)],
/// excluding 0. Returns an empty grid when all source labels vanish.
std::vector<double> r_grid(const data::Dataset& ds, Index count);

}  // namespace gda::surrogate
