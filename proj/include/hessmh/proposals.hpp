#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "hessmh/laplace.hpp"
#include "hessmh/measures.hpp"

namespace hmh {

enum class ProposalVariant { random_walk, pcn, hessian_rw, modified_pcn };

std::string to_string(ProposalVariant v);

/// Gaussian proposal kernel y = m + a (x - m) + s L z with z ~ N(0, I).
///
///   random_walk   a = 1                     covariance s^2 C
///   pcn           a = sqrt(1 - s^2), m = 0  covariance s^2 C, reversible w.r.t. N(0, C)
///   hessian_rw    a = 1                     covariance s^2 C_n
///   modified_pcn  a = sqrt(1 - s^2), m = x_n covariance s^2 C_n, reversible w.r.t. N(x_n, C_n)
class ProposalKernel {
public:
  static ProposalKernel random_walk(SpdMatrix cov, double s);
  static ProposalKernel pcn(SpdMatrix cov, double s);
  static ProposalKernel hessian_rw(const LaplaceApproximation& la, double s);
  static ProposalKernel modified_pcn(const LaplaceApproximation& la, double s);

  ProposalVariant variant() const { return variant_; }
  double step() const { return step_; }
  int dim() const { return base_.dim(); }
  /// C for the plain variants, C_n for the Hessian ones.
  const SpdMatrix& base_covariance() const { return base_; }
  Mat effective_covariance() const { return step_ * step_ * base_.matrix(); }
  /// Mean of the invariant Gaussian of the autoregressive variants.
  const Vec& center() const { return center_; }
  double contraction() const { return contraction_; }
  bool autoregressive() const {
    return variant_ == ProposalVariant::pcn || variant_ == ProposalVariant::modified_pcn;
  }
  const std::optional<LaplaceApproximation>& laplace() const { return laplace_; }

  std::string descriptor() const;

  Vec propose_with_noise(const Vec& x, const Vec& z) const;
  Vec propose(const Vec& x, CounterRng& rng) const;

  /// log phi(x) - log phi(y) for the invariant Gaussian phi; 0 for random walks.
  double log_reference_ratio(const Vec& x, const Vec& y) const;

private:
  ProposalKernel(ProposalVariant v, SpdMatrix base, double s, Vec center,
                 std::optional<LaplaceApproximation> la);

  ProposalVariant variant_;
  SpdMatrix base_;
  double step_;
  double contraction_;
  Vec center_;
  std::optional<LaplaceApproximation> laplace_;
};

/// log r with alpha = min{1, exp(log r)}:
///   n [U(x) - U(y)] + log pi_0(y) - log pi_0(x) (+ log phi(x) - log phi(y) for pCN variants).
/// Returns -inf when y is off the support; throws InvalidState when x is.
double log_acceptance_ratio(const TargetFamily& target, double n, const ProposalKernel& kernel,
                            const Vec& x, const Vec& y);

inline double acceptance_probability(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

}  // namespace hmh
