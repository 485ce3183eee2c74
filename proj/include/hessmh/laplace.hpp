#pragma once

#include "hessmh/measures.hpp"

namespace hmh {

struct MapOptions {
  double grad_tol = 1e-10;
  int max_iter = 200;
  double step_floor = 1e-14;
  double armijo = 1e-4;
};

struct OptimizerTrace {
  int iterations = 0;
  double grad_norm = 0.0;
  int hessian_shifts = 0;  // iterations that needed a lambda*I shift
};

struct MapResult {
  Vec x;
  OptimizerTrace trace;
};

/// Minimizes J(x) = U(x) - n^{-1} log pi_0(x) by damped Newton with Armijo
/// backtracking. An indefinite Newton matrix is shifted by lambda*I
/// (lambda = 1e-10 ||H||, doubled until the Cholesky factorization succeeds).
///
/// Throws NonConvergence (carrying the best iterate) when the gradient
/// tolerance is not met, and DegenerateMinimum when the Hessian of J at the
/// returned point is not positive definite.
MapResult map_estimate(const TargetFamily& target, double n, const Vec& x0,
                       const MapOptions& opts = {});

/// Gaussian N(x_n, C_n) with C_n = (n H_n)^{-1} and
/// H_n = Hess U(x_n) - n^{-1} Hess log pi_0(x_n).
struct LaplaceApproximation {
  Vec map_point;
  SpdMatrix precision_core;  // H_n
  SpdMatrix covariance;      // C_n
  double n = 1.0;
  OptimizerTrace trace;

  int dim() const { return static_cast<int>(map_point.size()); }
  GaussianMeasure as_gaussian() const { return GaussianMeasure(map_point, covariance); }
};

LaplaceApproximation laplace_approximation(const TargetFamily& target, double n, const Vec& x0,
                                           const MapOptions& opts = {});

/// Hess U at a stationary point of U, with a definiteness report. A
/// semi-definite result is not an error: it is the signature of a posterior
/// that concentrates along an affine subspace.
struct LimitHessian {
  Mat matrix;
  Vec eigenvalues;  // ascending
  bool positive_definite = false;
  bool positive_semidefinite = false;
  Mat null_space;  // orthonormal columns; empty when positive definite
};

LimitHessian limit_hessian(const TargetFamily& target, const Vec& x_star);

}  // namespace hmh
