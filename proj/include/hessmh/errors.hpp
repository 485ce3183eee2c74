#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hmh {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A density was evaluated at a point where the reference density vanishes.
class OutsideSupport : public Error {
public:
  OutsideSupport() : Error("point lies outside the support of the reference density") {}
};

/// Cholesky (or invertibility) check failed.
class FactorizationFailure : public Error {
public:
  using Error::Error;
};

/// The optimizer stopped before reaching the gradient tolerance.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, Eigen::VectorXd best, double grad_norm)
      : Error(what), best_iterate(std::move(best)), best_grad_norm(grad_norm) {}
  Eigen::VectorXd best_iterate;
  double best_grad_norm;
};

/// The Hessian at a stationary point is not positive definite.
class DegenerateMinimum : public Error {
public:
  using Error::Error;
};

/// The current chain state is invalid (e.g. outside the support).
class InvalidState : public Error {
public:
  using Error::Error;
};

/// User-supplied configuration is inconsistent. Maps to CLI exit code 2.
class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// A fiber of a state map carries zero stationary mass.
class DegenerateFiber : public Error {
public:
  using Error::Error;
};

/// Operation requires a reversible chain.
class NonReversible : public Error {
public:
  using Error::Error;
};

/// Quadrature refinement did not settle within its node budget.
class QuadratureFailure : public Error {
public:
  QuadratureFailure(const std::string& what, double previous, double last)
      : Error(what), previous_estimate(previous), last_estimate(last) {}
  double previous_estimate;
  double last_estimate;
};

}  // namespace hmh
