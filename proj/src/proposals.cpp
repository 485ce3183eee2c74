#include "hessmh/proposals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hmh {

std::string to_string(ProposalVariant v) {
  switch (v) {
    case ProposalVariant::random_walk: return "rw";
    case ProposalVariant::pcn: return "pcn";
    case ProposalVariant::hessian_rw: return "hessian-rw";
    case ProposalVariant::modified_pcn: return "modified-pcn";
  }
  return "unknown";
}

ProposalKernel::ProposalKernel(ProposalVariant v, SpdMatrix base, double s, Vec center,
                               std::optional<LaplaceApproximation> la)
    : variant_(v), base_(std::move(base)), step_(s), center_(std::move(center)),
      laplace_(std::move(la)) {
  contraction_ = autoregressive() ? std::sqrt(1.0 - s * s) : 1.0;
}

namespace {

void require_positive_step(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigurationError("step size must be positive");
}

void require_unit_step(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw ConfigurationError("pCN step size must lie in (0, 1]");
}

}  // namespace

ProposalKernel ProposalKernel::random_walk(SpdMatrix cov, double s) {
  require_positive_step(s);
  const int d = cov.dim();
  return ProposalKernel(ProposalVariant::random_walk, std::move(cov), s, Vec::Zero(d), std::nullopt);
}

ProposalKernel ProposalKernel::pcn(SpdMatrix cov, double s) {
  require_unit_step(s);
  const int d = cov.dim();
  return ProposalKernel(ProposalVariant::pcn, std::move(cov), s, Vec::Zero(d), std::nullopt);
}

ProposalKernel ProposalKernel::hessian_rw(const LaplaceApproximation& la, double s) {
  require_positive_step(s);
  return ProposalKernel(ProposalVariant::hessian_rw, la.covariance, s, la.map_point, la);
}

ProposalKernel ProposalKernel::modified_pcn(const LaplaceApproximation& la, double s) {
  require_unit_step(s);
  return ProposalKernel(ProposalVariant::modified_pcn, la.covariance, s, la.map_point, la);
}

std::string ProposalKernel::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(variant_) << "(s=" << step_;
  if (laplace_) os << ",n=" << laplace_->n;
  os << ")";
  return os.str();
}

Vec ProposalKernel::propose_with_noise(const Vec& x, const Vec& z) const {
  Vec y = base_.color(z);
  y *= step_;
  if (autoregressive()) {
    y += center_ + contraction_ * (x - center_);
  } else {
    y += x;
  }
  return y;
}

Vec ProposalKernel::propose(const Vec& x, CounterRng& rng) const {
  return propose_with_noise(x, draw_standard_normal(dim(), rng));
}

double ProposalKernel::log_reference_ratio(const Vec& x, const Vec& y) const {
  if (!autoregressive()) return 0.0;
  return 0.5 * (base_.whiten(y - center_).squaredNorm() - base_.whiten(x - center_).squaredNorm());
}

double log_acceptance_ratio(const TargetFamily& target, double n, const ProposalKernel& kernel,
                            const Vec& x, const Vec& y) {
  if (!target.in_support(x)) throw InvalidState("current state lies outside the support");
  if (!target.in_support(y)) return -std::numeric_limits<double>::infinity();
  double lr = n * (target.potential.value(x) - target.potential.value(y)) +
              (target.log_prior.value(y) - target.log_prior.value(x));
  lr += kernel.log_reference_ratio(x, y);
  if (std::isnan(lr)) return -std::numeric_limits<double>::infinity();
  return lr;
}

}  // namespace hmh
