#include "surrogate.hpp"

#include "rng.hpp"

#include <cmath>
#include <functional>

namespace gda::surrogate {

namespace {

// Smallest positive root of the convex section t -> g(t) with g(0) < 0.
// Returns +inf when g stays nonpositive along the ray.
double positive_root(const std::function<double(double)>& g) {
  double hi = 1.0;
  double ghi = g(hi);
  int doublings = 0;
  while (ghi <= 0.0 && doublings < 200) {
    hi *= 2.0;
    ghi = g(hi);
    ++doublings;
  }
  if (ghi <= 0.0) return std::numeric_limits<double>::infinity();
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return hi;
}

}  // namespace

double SurrogateBall::g(const VectorXd& predictions_at_points) const {
  const VectorXd resid = predictions_at_points - labels;
  double loss = 0.0;
  if (p == 2.0) {
    loss = resid.cwiseAbs2().dot(weights.weights);
  } else {
    for (Index i = 0; i < resid.size(); ++i)
      loss += weights.weights[i] * std::pow(std::abs(resid[i]), p);
  }
  return loss - std::pow(r, p);
}

double SurrogateBall::g(const learner::Hypothesis& h) const {
  return g(learner::predict(h, points));
}

void validate(const SurrogateBall& ball) {
  require(ball.r >= 0.0, ErrorCode::InvalidArgument, "ball radius must be >= 0");
  require(ball.p >= 1.0, ErrorCode::InvalidArgument, "ball exponent must be >= 1");
  require(ball.points.rows() == ball.labels.size(), ErrorCode::Dimension,
          "ball points/labels mismatch");
  data::validate(ball.weights, ball.points.rows());
}

void validate(const SurrogateSpec& spec) {
  require(!spec.balls.empty(), ErrorCode::InvalidArgument,
          "surrogate spec needs at least one ball");
  for (const auto& b : spec.balls) validate(b);
  for (const auto& b : spec.balls) {
    require(b.kernel.kind == spec.balls.front().kernel.kind &&
                b.points.rows() == spec.balls.front().points.rows(),
            ErrorCode::InvalidArgument,
            "all balls must share kernel and source sample");
  }
}

learner::Hypothesis center_hypothesis(const SurrogateBall& ball, double lambda_center) {
  validate(ball);
  require(ball.r > 0.0, ErrorCode::InfeasibleCenter,
          "ball with r = 0 has no interior point");
  learner::Hypothesis h0 =
      learner::krr_fit(ball.kernel, ball.points, ball.labels, ball.weights.weights,
                       lambda_center);
  if (ball.g(h0) >= 0.0)
    fail(ErrorCode::InfeasibleCenter,
         "ridge center has weighted loss >= r^p; radius too small for this center");
  return h0;
}

std::vector<learner::Hypothesis> sample_boundary_group(
    const std::vector<SurrogateBall>& group, double max_norm,
    const learner::Hypothesis& center, Index k, std::uint64_t seed) {
  require(!group.empty(), ErrorCode::InvalidArgument, "empty constraint group");
  const MatrixXd& pts = group.front().points;
  const Index a = pts.rows();
  require(center.anchors.rows() == a && center.anchor_scale.size() == 0,
          ErrorCode::InvalidArgument,
          "group center must be a plain expansion over the source anchors");

  MatrixXd g_pts = kernels::gram(group.front().kernel, pts, pts);
  const VectorXd center_pred = g_pts * center.coeffs;
  for (const auto& ball : group) {
    require(ball.g(center_pred) < 0.0, ErrorCode::InfeasibleCenter,
            "center is not interior to every constraint in the group");
  }
  const bool norm_capped = std::isfinite(max_norm);
  const double center_norm_sq = center.coeffs.dot(g_pts * center.coeffs);
  if (norm_capped)
    require(center_norm_sq < max_norm * max_norm, ErrorCode::InfeasibleCenter,
            "center violates the norm cap");

  Rng rng(seed);
  std::vector<learner::Hypothesis> out;
  out.reserve(static_cast<size_t>(k));
  for (Index s = 0; s < k; ++s) {
    double t_star = std::numeric_limits<double>::infinity();
    VectorXd dir;
    int attempts = 0;
    while (!std::isfinite(t_star)) {
      if (++attempts > 100)
        fail(ErrorCode::UnboundedDirection,
             "no finite boundary root after 100 resampled directions");
      dir.resize(a);
      for (Index i = 0; i < a; ++i) dir[i] = rng.gaussian(0.0, 1.0);
      const double norm = dir.norm();
      if (norm < 1e-12) continue;
      dir /= norm;
      const VectorXd dir_pred = g_pts * dir;

      t_star = std::numeric_limits<double>::infinity();
      for (const auto& ball : group) {
        double root;
        if (ball.p == 2.0) {
          // g(t) = A t^2 + B t + C, C = g(h0) < 0: closed-form positive root.
          const VectorXd resid = center_pred - ball.labels;
          const VectorXd& w = ball.weights.weights;
          const double qa = dir_pred.cwiseAbs2().dot(w);
          const double qb = 2.0 * (dir_pred.cwiseProduct(resid)).dot(w);
          const double qc = ball.g(center_pred);
          if (qa <= 1e-300) {
            root = qb > 0.0 ? -qc / qb : std::numeric_limits<double>::infinity();
          } else {
            root = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
          }
        } else {
          const VectorXd cp = center_pred, dp = dir_pred;
          const auto section = [&](double t) { return ball.g(cp + t * dp); };
          root = positive_root(section);
        }
        t_star = std::min(t_star, root);
      }
      if (norm_capped) {
        const double qa = dir.dot(g_pts * dir);
        const double qb = 2.0 * center.coeffs.dot(g_pts * dir);
        const double qc = center_norm_sq - max_norm * max_norm;
        if (qa > 1e-300)
          t_star = std::min(t_star, (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) /
                                        (2.0 * qa));
      }
    }
    learner::Hypothesis h;
    h.kernel = center.kernel;
    h.anchors = pts;
    h.coeffs = center.coeffs + t_star * dir;
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<learner::Hypothesis> sample_boundary(
    const SurrogateSpec& spec, const std::vector<learner::Hypothesis>& centers,
    Index k, std::uint64_t seed) {
  validate(spec);
  require(centers.size() == spec.balls.size(), ErrorCode::InvalidArgument,
          "one center per ball required");
  std::vector<learner::Hypothesis> pooled;
  for (size_t b = 0; b < spec.balls.size(); ++b) {
    auto group_samples =
        sample_boundary_group({spec.balls[b]}, spec.max_norm, centers[b], k,
                              derive_seed(seed, b));
    for (auto& h : group_samples) pooled.push_back(std::move(h));
  }
  return pooled;
}

std::vector<double> r_grid(const data::Dataset& ds, Index count) {
  require(count >= 2, ErrorCode::InvalidArgument, "r_grid needs count >= 2");
  const double upper = ds.source_y.squaredNorm() / static_cast<double>(ds.m());
  if (upper <= 0.0) return {};  // degenerate: all labels zero
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(count));
  for (Index i = 1; i <= count; ++i)
    grid.push_back(upper * static_cast<double>(i) / static_cast<double>(count));
  return grid;
}

}  // namespace gda::surrogate
