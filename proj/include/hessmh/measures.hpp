#pragma once

#include <functional>

#include <Eigen/Dense>

#include "hessmh/errors.hpp"
#include "hessmh/random.hpp"

namespace hmh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Symmetric positive definite matrix stored together with its lower
/// Cholesky factor L (M = L L^T). Every density and sample goes through L.
class SpdMatrix {
public:
  /// Throws FactorizationFailure if `m` is not symmetric or not positive definite.
  explicit SpdMatrix(const Mat& m);

  static SpdMatrix identity(int d);
  static SpdMatrix diagonal(const Vec& diag);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }
  const Mat& factor() const { return factor_; }

  /// L^{-1} r
  Vec whiten(const Vec& r) const;
  /// L z
  Vec color(const Vec& z) const;
  /// M^{-1} r
  Vec solve(const Vec& r) const;
  Mat inverse() const;
  double log_det() const;

private:
  Mat matrix_;
  Mat factor_;
};

class GaussianMeasure {
public:
  GaussianMeasure(Vec mean, SpdMatrix cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vec& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }

  /// mean + L z for a given standard-normal vector z.
  Vec transform_noise(const Vec& z) const;
  /// ||L^{-1}(x - mean)||^2
  double squared_mahalanobis(const Vec& x) const;

private:
  Vec mean_;
  SpdMatrix cov_;
};

Vec draw_standard_normal(int d, CounterRng& rng);

Vec gaussian_sample(const GaussianMeasure& g, CounterRng& rng);

/// -1/2 ||L^{-1}(x - mu)||^2 - 1/2 log det(2 pi C)
double gaussian_log_density(const GaussianMeasure& g, const Vec& x);

/// Law of A X + b for X ~ g. Throws FactorizationFailure if A is singular.
GaussianMeasure affine_pushforward_gaussian(const GaussianMeasure& g, const Mat& A,
                                            const Vec& b);

enum class DerivativeMode { analytic, finite_difference };

/// Twice differentiable scalar function on R^d.
class SmoothFunction {
public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  static SmoothFunction analytic(ValueFn value, GradientFn gradient, HessianFn hessian);

  /// Derivatives by central differences, step cbrt(eps) * max(1, |x_i|).
  /// If `gradient` is given the Hessian differentiates it; otherwise the
  /// Hessian uses second differences of the value with step eps^(1/4) * max(1, |x_i|).
  static SmoothFunction finite_difference(ValueFn value, GradientFn gradient = {});

  /// Identically zero function.
  static SmoothFunction zero(int d);

  double value(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  DerivativeMode mode() const { return mode_; }

private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  DerivativeMode mode_ = DerivativeMode::analytic;
};

Vec finite_difference_gradient(const SmoothFunction::ValueFn& f, const Vec& x);

struct DerivativeCheck {
  double gradient_relative_error;
  double hessian_asymmetry;
};

/// Compares the supplied gradient against central differences of the value
/// and measures max |H - H^T|.
DerivativeCheck check_derivatives(const SmoothFunction& f, const Vec& x);

/// Concentrating family pi_n ∝ exp(-n U) pi_0.
struct TargetFamily {
  int dim = 1;
  SmoothFunction potential;  // U >= 0 on the support
  SmoothFunction log_prior;  // log pi_0, up to an additive constant
  std::function<bool(const Vec&)> support;  // empty means all of R^d

  bool in_support(const Vec& x) const { return !support || support(x); }
};

/// -n U(x) + log pi_0(x). Throws OutsideSupport off the support.
double log_unnormalized_density(const TargetFamily& target, double n, const Vec& x);

/// Same as log_unnormalized_density but returns -inf off the support.
double log_density_or_neg_inf(const TargetFamily& target, double n, const Vec& x);

}  // namespace hmh
