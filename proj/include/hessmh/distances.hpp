#pragma once

#include <functional>
#include <vector>

#include "hessmh/laplace.hpp"
#include "hessmh/measures.hpp"

namespace hmh {

using LogDensityFn = std::function<double(const Vec&)>;

/// Gauss-Hermite rule for the standard normal weight:
/// ∫ f(t) φ(t) dt ≈ Σ exp(log_weights[i]) f(nodes[i]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

/// Cached m-point rule, 1 <= m <= 512. Thread-safe.
const GaussHermiteRule& gauss_hermite_rule(int m);

/// Tensor Gauss-Hermite grid in coordinates standardized by a reference
/// Gaussian: node x = center + L z for z on the tensor rule.
class QuadratureGrid {
public:
  QuadratureGrid(const GaussianMeasure& reference, int nodes_per_axis);

  int dim() const { return static_cast<int>(center_.size()); }
  int nodes_per_axis() const { return m_; }
  std::size_t size() const;
  const Vec& center() const { return center_; }
  const Mat& scale() const { return scale_; }

  /// Visits each node with a log weight such that ∫ h(x) dx ≈ Σ exp(lw) h(x).
  void for_each(const std::function<void(const Vec& x, double log_weight)>& visit) const;

private:
  Vec center_;
  Mat scale_;
  double log_det_scale_;
  int m_;
  const GaussHermiteRule* rule_;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int min_nodes = 16;
  int max_nodes = 0;  // 0 picks a per-dimension cap
};

inline constexpr int kMaxQuadratureDim = 3;

/// Per-axis node cap used when QuadratureOptions::max_nodes is 0.
int default_max_nodes(int dim);

struct QuadratureResult {
  double value = 0.0;
  double previous = 0.0;  // estimate at half the nodes
  int nodes_per_axis = 0;
};

/// log ∫ exp(log_h(x)) dx. Nodes are doubled until successive log values
/// differ by less than rel_tol. Throws QuadratureFailure otherwise and
/// ConfigurationError for dimension above 3.
QuadratureResult integrate_log(const GaussianMeasure& reference, const LogDensityFn& log_h,
                               const QuadratureOptions& opts = {});

struct ExpectationResult {
  Vec values;
  double log_normalizer = 0.0;
  int nodes_per_axis = 0;
};

/// ∫ f exp(log_h) / ∫ exp(log_h) for a vector of functionals. Convergence is
/// judged per component against E|f_j|.
ExpectationResult normalized_expectations(const GaussianMeasure& reference,
                                          const LogDensityFn& log_h,
                                          const std::function<Vec(const Vec&)>& f,
                                          const QuadratureOptions& opts = {});

/// log Z_n, Z_n = ∫ exp(-n U) π_0 dx, on the grid standardized by `la`.
QuadratureResult log_normalizing_constant(const TargetFamily& target, double n,
                                          const LaplaceApproximation& la,
                                          const QuadratureOptions& opts = {});
double normalizing_constant(const TargetFamily& target, double n, const LaplaceApproximation& la,
                            const QuadratureOptions& opts = {});

/// π_n(f) for a scalar functional.
double posterior_moment(const TargetFamily& target, double n, const LaplaceApproximation& la,
                        const std::function<double(const Vec&)>& f,
                        const QuadratureOptions& opts = {});

struct PosteriorMoments {
  Vec mean;
  Mat covariance;
  int nodes_per_axis = 0;
};

/// Mean and covariance of π_n. Second moments are taken about x_n.
PosteriorMoments posterior_moments(const TargetFamily& target, double n,
                                   const LaplaceApproximation& la,
                                   const QuadratureOptions& opts = {});

/// Var_{π_n}(v^T x) by quadrature.
double posterior_variance(const TargetFamily& target, double n, const LaplaceApproximation& la,
                          const Vec& v, const QuadratureOptions& opts = {});

/// Normalized density given by an unnormalized log-density, its log
/// normalizer, and a Gaussian envelope that places the quadrature nodes.
struct DensitySpec {
  LogDensityFn log_unnormalized;
  double log_normalizer;
  GaussianMeasure envelope;

  double log_density(const Vec& x) const { return log_unnormalized(x) - log_normalizer; }
  int dim() const { return envelope.dim(); }
};

DensitySpec gaussian_density(const GaussianMeasure& g);
/// π_n with log Z_n from quadrature and Λ_n as envelope.
DensitySpec posterior_density(const TargetFamily& target, double n,
                              const LaplaceApproximation& la,
                              const QuadratureOptions& opts = {});

/// (∫ (√p − √q)²)^{1/2}, in [0, √2]. In one dimension a refinement that runs
/// out of Hermite nodes is redone by adaptive Gauss-Kronrod (nodes_per_axis = 0).
QuadratureResult hellinger_quadrature(const DensitySpec& p, const DensitySpec& q,
                                      const QuadratureOptions& opts = {});
double hellinger_distance(const DensitySpec& p, const DensitySpec& q,
                          const QuadratureOptions& opts = {});

/// ½ ∫ |p − q|, by nested adaptive Gauss-Kronrod on a ±10σ box of the pair's
/// reference Gaussian. The tolerance is absolute.
double tv_distance(const DensitySpec& p, const DensitySpec& q, double tol = 1e-10);

/// Adaptive Gauss-Kronrod on [a, b]; a or b may be infinite.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-12);

/// One-dimensional Gaussian proposal q(x, ·) = N(center + contraction (x − center), variance).
struct GaussianProposal1d {
  double contraction = 1.0;
  double center = 0.0;
  double variance = 1.0;
};

struct MhMetrics1d {
  double abar;            // ∫∫ α q π
  double jump2;           // ∫∫ (y − x)² α q π
  double proposal_jump4;  // ∫∫ (y − x)⁴ q π
  double mean;
  double variance;
};

/// Stationary MH quantities for a normalized 1-d target and Gaussian
/// proposal, by nested quadrature. `loc` and `scale` locate the target mass.
MhMetrics1d mh_metrics_1d(const std::function<double(double)>& log_target, double loc,
                          double scale, const GaussianProposal1d& proposal,
                          double rel_tol = 1e-11);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct RateRow {
  double n;
  double hellinger;
  double tv;  // NaN when not computed
  int nodes_per_axis;
};

struct RateStudy {
  std::vector<RateRow> rows;
  double hellinger_slope;
  double tv_slope;  // NaN when not computed
};

/// d_H(π_n, Λ_n) (and optionally d_TV) over n_grid.
RateStudy hellinger_rate_study(const TargetFamily& target, const std::vector<double>& n_grid,
                               const Vec& x0, bool with_tv = true,
                               const QuadratureOptions& opts = {});

struct SubspaceRow {
  double n;
  int direction;
  double scaled_variance;  // n v^T C_n v
};

struct SubspaceCheck {
  std::vector<SubspaceRow> rows;
  std::vector<double> slopes;    // per direction
  std::vector<bool> bounded;     // slope < 0.5
};

/// n v^T C_n v over n_grid: bounded for informed directions, ∝ n otherwise.
SubspaceCheck informed_subspace_check(const TargetFamily& target,
                                      const std::vector<double>& n_grid,
                                      const std::vector<Vec>& directions, const Vec& x0);

}  // namespace hmh
