#include "hessmh/laplace.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hmh {

namespace {

struct Objective {
  const TargetFamily& target;
  double n;

  double value(const Vec& x) const {
    if (!target.in_support(x)) return std::numeric_limits<double>::infinity();
    const double v = target.potential.value(x) - target.log_prior.value(x) / n;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
  Vec gradient(const Vec& x) const {
    return target.potential.gradient(x) - target.log_prior.gradient(x) / n;
  }
  Mat hessian(const Vec& x) const {
    Mat h = target.potential.hessian(x) - target.log_prior.hessian(x) / n;
    return 0.5 * (h + h.transpose());
  }
};

// Newton direction -H^{-1} g, shifting H by lambda*I until it factorizes.
Vec newton_direction(const Mat& h, const Vec& g, bool& shifted) {
  Eigen::LLT<Mat> llt(h);
  shifted = false;
  if (llt.info() == Eigen::Success) return -llt.solve(g);
  shifted = true;
  const double norm = std::max(h.norm(), std::numeric_limits<double>::min());
  double lambda = 1e-10 * norm;
  const Mat id = Mat::Identity(h.rows(), h.cols());
  for (int k = 0; k < 2000; ++k) {
    llt.compute(h + lambda * id);
    if (llt.info() == Eigen::Success) return -llt.solve(g);
    lambda *= 2.0;
  }
  return -g;
}

}  // namespace

MapResult map_estimate(const TargetFamily& target, double n, const Vec& x0, const MapOptions& opts) {
  if (!(n > 0.0)) throw ConfigurationError("concentration n must be positive");
  if (x0.size() != target.dim) throw ConfigurationError("start point has wrong dimension");
  if (!target.in_support(x0)) throw OutsideSupport();

  const Objective obj{target, n};
  Vec x = x0;
  double fx = obj.value(x);
  OptimizerTrace trace;
  const double eps = std::numeric_limits<double>::epsilon();

  for (;;) {
    const Vec g = obj.gradient(x);
    trace.grad_norm = g.norm();
    if (trace.grad_norm <= opts.grad_tol) break;
    if (trace.iterations >= opts.max_iter) {
      throw NonConvergence("MAP optimizer reached max_iter", x, trace.grad_norm);
    }
    ++trace.iterations;

    bool shifted = false;
    const Vec p = newton_direction(obj.hessian(x), g, shifted);
    if (shifted) ++trace.hessian_shifts;
    const double slope = g.dot(p);

    double t = 1.0;
    Vec xt = x + p;
    double ft = obj.value(xt);
    // Armijo test with a few ulps of slack so that round-off in J near the
    // optimum does not stall the search.
    while (!(ft <= fx + opts.armijo * t * slope + 4.0 * eps * std::abs(fx))) {
      t *= 0.5;
      if (t < opts.step_floor) {
        throw NonConvergence("MAP line search stalled", x, trace.grad_norm);
      }
      xt = x + t * p;
      ft = obj.value(xt);
    }
    x = std::move(xt);
    fx = ft;
  }

  Eigen::LLT<Mat> check(obj.hessian(x));
  if (check.info() != Eigen::Success) {
    throw DegenerateMinimum("Hessian of the MAP objective is not positive definite");
  }
  return {x, trace};
}

LaplaceApproximation laplace_approximation(const TargetFamily& target, double n, const Vec& x0,
                                           const MapOptions& opts) {
  MapResult map = map_estimate(target, n, x0, opts);
  Mat h = target.potential.hessian(map.x) - target.log_prior.hessian(map.x) / n;
  h = 0.5 * (h + h.transpose());
  try {
    SpdMatrix precision(h);
    Mat cov = precision.inverse() / n;
    return LaplaceApproximation{map.x, std::move(precision), SpdMatrix(cov), n, map.trace};
  } catch (const FactorizationFailure&) {
    throw DegenerateMinimum("H_n is not positive definite at the MAP point");
  }
}

LimitHessian limit_hessian(const TargetFamily& target, const Vec& x_star) {
  LimitHessian out;
  Mat h = target.potential.hessian(x_star);
  out.matrix = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(out.matrix);
  out.eigenvalues = eig.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  out.positive_definite = out.eigenvalues.minCoeff() > tol;
  out.positive_semidefinite = out.eigenvalues.minCoeff() >= -tol;
  std::vector<Eigen::Index> null_idx;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (std::abs(out.eigenvalues[i]) <= tol) null_idx.push_back(i);
  }
  out.null_space.resize(out.matrix.rows(), static_cast<Eigen::Index>(null_idx.size()));
  for (std::size_t k = 0; k < null_idx.size(); ++k) {
    out.null_space.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(null_idx[k]);
  }
  return out;
}

}  // namespace hmh
