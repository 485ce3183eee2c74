#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hessmh/distances.hpp"
#include "hessmh/mh.hpp"

namespace hmh {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Mean with batch-means standard error, ⌊√N⌋ batches.
Estimate batch_mean(const std::vector<double>& series);

/// Rao-Blackwellized acceptance rate: mean of the realized α values.
Estimate average_acceptance(const ChainRecord& record);
/// Fraction of accepted proposals.
Estimate acceptance_frequency(const ChainRecord& record);

/// Mean of (v^T (x_{k+1} − x_k))².
Estimate directional_esjd(const ChainRecord& record, const Vec& v);

/// directional_esjd / variance. Throws ConfigurationError if variance <= 0.
Estimate normalized_esjd(const ChainRecord& record, const Vec& v, double variance);

struct IactResult {
  double tau = 1.0;
  int window = 0;  // last lag included
};

/// 1 + 2 Σ autocorrelations, truncated by Geyer's initial positive sequence.
/// Throws ConfigurationError for a constant series.
IactResult iact(const std::vector<double>& series);
IactResult iact(const ChainRecord& record, const std::function<double(const Vec&)>& f);

/// Combines per-replica estimates: mean value, se = √(Σ se²) / R.
Estimate pool(const std::vector<Estimate>& parts);

/// Reference quantities for the Hessian random walk on a Gaussian target in
/// standardized coordinates, X, ξ ~ N(0, I_d):
///   alpha = E[1 ∧ exp(−½‖X + sξ‖² + ½‖X‖²)]
///   esjd  = E[s² ξ₁² (1 ∧ exp(−½‖X + sξ‖² + ½‖X‖²))]
/// d = 1 uses nested adaptive quadrature (se = 0); d >= 2 plain Monte Carlo.
struct GaussianReference {
  Estimate alpha;
  Estimate esjd;
};
GaussianReference gaussian_reference(int d, double s, std::uint64_t budget,
                                     std::uint64_t seed = 0x5eed);
Estimate gaussian_reference_alpha(int d, double s, std::uint64_t budget,
                                  std::uint64_t seed = 0x5eed);
Estimate gaussian_reference_esjd(int d, double s, std::uint64_t budget,
                                 std::uint64_t seed = 0x5eed);

/// Normalized jump distance of the modified pCN kernel on its own invariant
/// Gaussian: 2 − 2√(1 − s²).
double modified_pcn_reference_esjd(double s);

enum class VarianceProvenance { exact, quadrature, sample };
std::string to_string(VarianceProvenance p);

struct VarianceEstimate {
  double value = 0.0;
  VarianceProvenance provenance = VarianceProvenance::exact;
  std::string warning;
};

/// Var_{π_n}(v^T x). Exact (v^T C_n v) when the target is Gaussian, else
/// quadrature for d <= 3. When quadrature fails or d > 3 the pooled sample
/// variance of `fallback` is used and a warning is recorded; without
/// fallback records the quadrature error propagates.
VarianceEstimate target_variance(const TargetFamily& target, double n, const Vec& v,
                                 const LaplaceApproximation& la, bool gaussian_exact,
                                 const std::vector<ChainRecord>* fallback = nullptr,
                                 const QuadratureOptions& opts = {});

/// Pooled sample variance of v^T x over the states of several records.
double sample_variance(const std::vector<ChainRecord>& records, const Vec& v);

struct DirectionReport {
  Vec v;
  Estimate rho;
  Estimate rhobar;
  IactResult tau;  // for f_v(x) = v^T x, averaged over replicas
  VarianceEstimate variance;
};

struct EfficiencyReport {
  Estimate abar;
  Estimate acceptance_frequency;
  std::vector<DirectionReport> directions;
};

/// Pools metrics over replicas. `variances[j]` normalizes direction j.
EfficiencyReport efficiency_report(const std::vector<ChainRecord>& records,
                                   const std::vector<Vec>& directions,
                                   const std::vector<VarianceEstimate>& variances);

}  // namespace hmh
