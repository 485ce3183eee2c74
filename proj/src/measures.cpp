#include "hessmh/measures.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hmh {

SpdMatrix::SpdMatrix(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw FactorizationFailure("SPD matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw FactorizationFailure("matrix is not symmetric");
  }
  matrix_ = 0.5 * (m + m.transpose());
  Eigen::LLT<Mat> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw FactorizationFailure("matrix is not positive definite");
  }
  factor_ = llt.matrixL();
  for (Eigen::Index i = 0; i < factor_.rows(); ++i) {
    if (!(factor_(i, i) > 0.0) || !std::isfinite(factor_(i, i))) {
      throw FactorizationFailure("Cholesky factor has a non-positive diagonal entry");
    }
  }
}

SpdMatrix SpdMatrix::identity(int d) { return SpdMatrix(Mat::Identity(d, d)); }

SpdMatrix SpdMatrix::diagonal(const Vec& diag) { return SpdMatrix(Mat(diag.asDiagonal())); }

Vec SpdMatrix::whiten(const Vec& r) const {
  return factor_.triangularView<Eigen::Lower>().solve(r);
}

Vec SpdMatrix::color(const Vec& z) const { return factor_.triangularView<Eigen::Lower>() * z; }

Vec SpdMatrix::solve(const Vec& r) const {
  Vec w = whiten(r);
  return factor_.transpose().triangularView<Eigen::Upper>().solve(w);
}

Mat SpdMatrix::inverse() const {
  Mat linv = factor_.triangularView<Eigen::Lower>().solve(Mat::Identity(dim(), dim()));
  Mat inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

double SpdMatrix::log_det() const { return 2.0 * factor_.diagonal().array().log().sum(); }

GaussianMeasure::GaussianMeasure(Vec mean, SpdMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() != cov_.dim()) {
    throw ConfigurationError("Gaussian mean and covariance dimensions differ");
  }
}

Vec GaussianMeasure::transform_noise(const Vec& z) const { return mean_ + cov_.color(z); }

double GaussianMeasure::squared_mahalanobis(const Vec& x) const {
  return cov_.whiten(x - mean_).squaredNorm();
}

Vec draw_standard_normal(int d, CounterRng& rng) {
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  return z;
}

Vec gaussian_sample(const GaussianMeasure& g, CounterRng& rng) {
  return g.transform_noise(draw_standard_normal(g.dim(), rng));
}

double gaussian_log_density(const GaussianMeasure& g, const Vec& x) {
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  return -0.5 * g.squared_mahalanobis(x) - 0.5 * (g.dim() * log_two_pi + g.cov().log_det());
}

GaussianMeasure affine_pushforward_gaussian(const GaussianMeasure& g, const Mat& A, const Vec& b) {
  if (A.rows() != g.dim() || A.cols() != g.dim() || b.size() != g.dim()) {
    throw ConfigurationError("affine map dimensions do not match the Gaussian");
  }
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) throw FactorizationFailure("affine map is singular");
  Mat al = A * g.cov().factor();
  return GaussianMeasure(A * g.mean() + b, SpdMatrix(al * al.transpose()));
}

// --- SmoothFunction -------------------------------------------------------

namespace {

double fd_step(double xi) {
  static const double h = std::cbrt(std::numeric_limits<double>::epsilon());
  return h * std::max(1.0, std::abs(xi));
}

double fd2_step(double xi) {
  static const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return h * std::max(1.0, std::abs(xi));
}

Mat hessian_from_gradient(const SmoothFunction::GradientFn& grad, const Vec& x) {
  const auto d = x.size();
  Mat h(d, d);
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double step = fd_step(x[i]);
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    h.col(i) = (grad(xp) - grad(xm)) / (xp[i] - xm[i]);
    xp[i] = xm[i] = x[i];
  }
  return 0.5 * (h + h.transpose());
}

Mat hessian_from_values(const SmoothFunction::ValueFn& f, const Vec& x) {
  const auto d = x.size();
  Mat h(d, d);
  const double f0 = f(x);
  Vec y = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double hi = fd2_step(x[i]);
    y[i] = x[i] + hi;
    const double fp = f(y);
    y[i] = x[i] - hi;
    const double fm = f(y);
    y[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = fd2_step(x[j]);
      auto eval = [&](double si, double sj) {
        y[i] = x[i] + si * hi;
        y[j] = x[j] + sj * hj;
        const double v = f(y);
        y[i] = x[i];
        y[j] = x[j];
        return v;
      };
      const double v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hi * hj);
      h(i, j) = h(j, i) = v;
    }
  }
  return h;
}

}  // namespace

Vec finite_difference_gradient(const SmoothFunction::ValueFn& f, const Vec& x) {
  Vec g(x.size());
  Vec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = fd_step(x[i]);
    y[i] = x[i] + step;
    const double fp = f(y);
    const double up = y[i];
    y[i] = x[i] - step;
    const double fm = f(y);
    g[i] = (fp - fm) / (up - y[i]);
    y[i] = x[i];
  }
  return g;
}

SmoothFunction SmoothFunction::analytic(ValueFn value, GradientFn gradient, HessianFn hessian) {
  SmoothFunction f;
  f.value_ = std::move(value);
  f.gradient_ = std::move(gradient);
  f.hessian_ = std::move(hessian);
  f.mode_ = DerivativeMode::analytic;
  return f;
}

SmoothFunction SmoothFunction::finite_difference(ValueFn value, GradientFn gradient) {
  SmoothFunction f;
  f.value_ = std::move(value);
  f.gradient_ = std::move(gradient);
  f.mode_ = DerivativeMode::finite_difference;
  return f;
}

SmoothFunction SmoothFunction::zero(int d) {
  return analytic([](const Vec&) { return 0.0; }, [d](const Vec&) { return Vec::Zero(d); },
                  [d](const Vec&) { return Mat::Zero(d, d); });
}

Vec SmoothFunction::gradient(const Vec& x) const {
  if (gradient_) return gradient_(x);
  return finite_difference_gradient(value_, x);
}

Mat SmoothFunction::hessian(const Vec& x) const {
  if (hessian_) return hessian_(x);
  if (gradient_) return hessian_from_gradient(gradient_, x);
  return hessian_from_values(value_, x);
}

DerivativeCheck check_derivatives(const SmoothFunction& f, const Vec& x) {
  const Vec fd = finite_difference_gradient([&f](const Vec& y) { return f.value(y); }, x);
  const Vec g = f.gradient(x);
  const double denom = std::max({1.0, g.norm(), fd.norm()});
  const Mat h = f.hessian(x);
  return {(g - fd).norm() / denom, (h - h.transpose()).cwiseAbs().maxCoeff()};
}

double log_unnormalized_density(const TargetFamily& target, double n, const Vec& x) {
  if (!target.in_support(x)) throw OutsideSupport();
  return -n * target.potential.value(x) + target.log_prior.value(x);
}

double log_density_or_neg_inf(const TargetFamily& target, double n, const Vec& x) {
  if (!target.in_support(x)) return -std::numeric_limits<double>::infinity();
  return -n * target.potential.value(x) + target.log_prior.value(x);
}

}  // namespace hmh
