#include "hessmh/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace hmh {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Golub-Welsch eigenvalues seed a Newton polish on the orthonormal Hermite
// recurrence for the weight exp(-t^2); weights come from the recurrence.
GaussHermiteRule build_rule(int m) {
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  Vec diag = Vec::Zero(m), sub(std::max(m - 1, 0));
  for (int j = 1; j < m; ++j) sub[j - 1] = std::sqrt(0.5 * j);
  Eigen::SelfAdjointEigenSolver<Mat> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Vec& t0 = eig.eigenvalues();

  auto hermite = [&](double z, double& pm, double& dpm) {
    double p1 = pim4, p2 = 0.0;
    for (int j = 0; j < m; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
    }
    pm = p1;
    dpm = std::sqrt(2.0 * m) * p2;
  };

  GaussHermiteRule rule;
  rule.nodes.resize(m);
  rule.log_weights.resize(m);
  const double log_sqrt_pi = 0.5 * std::log(M_PI);
  for (int i = 0; i < m; ++i) {
    double z = t0[i], p = 0.0, dp = 0.0;
    for (int it = 0; it < 4; ++it) {
      hermite(z, p, dp);
      const double step = p / dp;
      z -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    hermite(z, p, dp);
    rule.nodes[i] = std::sqrt(2.0) * z;
    rule.log_weights[i] = std::log(2.0) - 2.0 * std::log(std::abs(dp)) - log_sqrt_pi;
  }
  // exact symmetry
  for (int i = 0; i < m / 2; ++i) {
    const double x = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.log_weights[i] + rule.log_weights[m - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.log_weights[i] = rule.log_weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double a : v) mx = std::max(mx, a);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double a : v) s += std::exp(a - mx);
  return mx + std::log(s);
}

void require_quadrature_dim(int d) {
  if (d < 1 || d > kMaxQuadratureDim) {
    throw ConfigurationError("tensor quadrature supports dimension 1 to 3 only");
  }
}

int node_cap(const QuadratureOptions& opts, int d) {
  return opts.max_nodes > 0 ? opts.max_nodes : default_max_nodes(d);
}

GaussianMeasure pair_reference(const GaussianMeasure& p, const GaussianMeasure& q) {
  if (p.dim() != q.dim()) throw ConfigurationError("densities have different dimensions");
  const Vec delta = p.mean() - q.mean();
  const Mat cov = p.cov().matrix() + q.cov().matrix() + delta * delta.transpose();
  return GaussianMeasure(0.5 * (p.mean() + q.mean()), SpdMatrix(cov));
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int m) {
  if (m < 1 || m > 512) throw ConfigurationError("Gauss-Hermite order must lie in [1, 512]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(m));
  return *slot;
}

int default_max_nodes(int dim) {
  switch (dim) {
    case 1: return 512;
    case 2: return 512;
    default: return 128;
  }
}

QuadratureGrid::QuadratureGrid(const GaussianMeasure& reference, int nodes_per_axis)
    : center_(reference.mean()), scale_(reference.cov().factor()),
      log_det_scale_(0.5 * reference.cov().log_det()), m_(nodes_per_axis),
      rule_(&gauss_hermite_rule(nodes_per_axis)) {
  require_quadrature_dim(dim());
}

std::size_t QuadratureGrid::size() const {
  std::size_t s = 1;
  for (int k = 0; k < dim(); ++k) s *= static_cast<std::size_t>(m_);
  return s;
}

void QuadratureGrid::for_each(
    const std::function<void(const Vec& x, double log_weight)>& visit) const {
  const int d = dim();
  std::vector<int> idx(d, 0);
  Vec z(d);
  const double base = log_det_scale_ + 0.5 * d * kLog2Pi;
  for (;;) {
    double lw = base;
    for (int k = 0; k < d; ++k) {
      z[k] = rule_->nodes[idx[k]];
      lw += rule_->log_weights[idx[k]] + 0.5 * z[k] * z[k];
    }
    visit(center_ + scale_ * z, lw);
    int k = 0;
    while (k < d && ++idx[k] == m_) idx[k++] = 0;
    if (k == d) break;
  }
}

QuadratureResult integrate_log(const GaussianMeasure& reference, const LogDensityFn& log_h,
                               const QuadratureOptions& opts) {
  require_quadrature_dim(reference.dim());
  const int cap = node_cap(opts, reference.dim());
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int m = opts.min_nodes; m <= cap; m *= 2) {
    QuadratureGrid grid(reference, m);
    std::vector<double> terms;
    terms.reserve(grid.size());
    grid.for_each([&](const Vec& x, double lw) { terms.push_back(lw + log_h(x)); });
    const double cur = log_sum_exp(terms);
    if (!std::isfinite(cur)) throw QuadratureFailure("integrand vanishes on the grid", prev, cur);
    if (std::isfinite(prev) && std::abs(cur - prev) <= opts.rel_tol + opts.abs_tol) {
      return {cur, prev, m};
    }
    prev = cur;
    if (m * 2 > cap) throw QuadratureFailure("quadrature refinement did not converge", prev, cur);
  }
  throw QuadratureFailure("quadrature refinement did not converge", prev, prev);
}

ExpectationResult normalized_expectations(const GaussianMeasure& reference,
                                          const LogDensityFn& log_h,
                                          const std::function<Vec(const Vec&)>& f,
                                          const QuadratureOptions& opts) {
  require_quadrature_dim(reference.dim());
  const int cap = node_cap(opts, reference.dim());
  ExpectationResult prev;
  bool have_prev = false;
  for (int m = opts.min_nodes; m <= cap; m *= 2) {
    QuadratureGrid grid(reference, m);
    std::vector<double> terms;
    std::vector<Vec> values;
    terms.reserve(grid.size());
    values.reserve(grid.size());
    grid.for_each([&](const Vec& x, double lw) {
      const double t = lw + log_h(x);
      terms.push_back(t);
      values.push_back(std::isfinite(t) ? f(x) : Vec());
    });
    const double lz = log_sum_exp(terms);
    if (!std::isfinite(lz)) throw QuadratureFailure("integrand vanishes on the grid", 0.0, lz);
    Vec sum, abs_sum;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!std::isfinite(terms[i])) continue;
      const double w = std::exp(terms[i] - lz);
      if (sum.size() == 0) {
        sum = Vec::Zero(values[i].size());
        abs_sum = Vec::Zero(values[i].size());
      }
      sum += w * values[i];
      abs_sum += w * values[i].cwiseAbs();
    }
    ExpectationResult cur{sum, lz, m};
    if (have_prev) {
      bool ok = std::abs(cur.log_normalizer - prev.log_normalizer) <= opts.rel_tol + opts.abs_tol;
      for (Eigen::Index j = 0; ok && j < sum.size(); ++j) {
        ok = std::abs(cur.values[j] - prev.values[j]) <= opts.rel_tol * abs_sum[j] + opts.abs_tol;
      }
      if (ok) return cur;
    }
    if (m * 2 > cap) {
      throw QuadratureFailure("moment refinement did not converge",
                              have_prev ? prev.values[0] : 0.0, cur.values[0]);
    }
    prev = std::move(cur);
    have_prev = true;
  }
  throw QuadratureFailure("moment refinement did not converge", 0.0, 0.0);
}

QuadratureResult log_normalizing_constant(const TargetFamily& target, double n,
                                          const LaplaceApproximation& la,
                                          const QuadratureOptions& opts) {
  return integrate_log(
      la.as_gaussian(), [&](const Vec& x) { return log_density_or_neg_inf(target, n, x); }, opts);
}

double normalizing_constant(const TargetFamily& target, double n, const LaplaceApproximation& la,
                            const QuadratureOptions& opts) {
  return std::exp(log_normalizing_constant(target, n, la, opts).value);
}

double posterior_moment(const TargetFamily& target, double n, const LaplaceApproximation& la,
                        const std::function<double(const Vec&)>& f,
                        const QuadratureOptions& opts) {
  auto r = normalized_expectations(
      la.as_gaussian(), [&](const Vec& x) { return log_density_or_neg_inf(target, n, x); },
      [&](const Vec& x) { return Vec::Constant(1, f(x)); }, opts);
  return r.values[0];
}

PosteriorMoments posterior_moments(const TargetFamily& target, double n,
                                   const LaplaceApproximation& la,
                                   const QuadratureOptions& opts) {
  const int d = la.dim();
  const Vec& c = la.map_point;
  auto r = normalized_expectations(
      la.as_gaussian(), [&](const Vec& x) { return log_density_or_neg_inf(target, n, x); },
      [&](const Vec& x) {
        const Vec u = x - c;
        Vec out(d + d * d);
        out.head(d) = u;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) out[d + i * d + j] = u[i] * u[j];
        return out;
      },
      opts);
  PosteriorMoments pm;
  const Vec mu = r.values.head(d);
  pm.mean = c + mu;
  pm.covariance.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) pm.covariance(i, j) = r.values[d + i * d + j] - mu[i] * mu[j];
  pm.nodes_per_axis = r.nodes_per_axis;
  return pm;
}

double posterior_variance(const TargetFamily& target, double n, const LaplaceApproximation& la,
                          const Vec& v, const QuadratureOptions& opts) {
  const Vec& c = la.map_point;
  auto r = normalized_expectations(
      la.as_gaussian(), [&](const Vec& x) { return log_density_or_neg_inf(target, n, x); },
      [&](const Vec& x) {
        const double u = v.dot(x - c);
        return Vec{{u, u * u}};
      },
      opts);
  return r.values[1] - r.values[0] * r.values[0];
}

DensitySpec gaussian_density(const GaussianMeasure& g) {
  return DensitySpec{[g](const Vec& x) { return gaussian_log_density(g, x); }, 0.0, g};
}

DensitySpec posterior_density(const TargetFamily& target, double n,
                              const LaplaceApproximation& la, const QuadratureOptions& opts) {
  QuadratureOptions tight = opts;
  tight.rel_tol = std::min(opts.rel_tol, 1e-12);
  const double lz = log_normalizing_constant(target, n, la, tight).value;
  return DensitySpec{[target, n](const Vec& x) { return log_density_or_neg_inf(target, n, x); },
                     lz, la.as_gaussian()};
}

namespace {

// Bisection on the 31-point Kronrod error estimate with an absolute target.
double adaptive_abs(const std::function<double(double)>& f, double a, double b, double tol,
                    int depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  // The non-adaptive estimate is reported on [-1, 1] and floored at 2ε|v| there.
  err *= 0.5 * (b - a);
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v);
  if (err <= std::max(tol, floor) || depth == 0) return v;
  const double mid = 0.5 * (a + b);
  return adaptive_abs(f, a, mid, 0.5 * tol, depth - 1) +
         adaptive_abs(f, mid, b, 0.5 * tol, depth - 1);
}

// Sorted breakpoints of [a, b] at the sign changes of g seen on a uniform scan.
std::vector<double> sign_change_cuts(const std::function<double(double)>& g, double a, double b,
                                     int scan, std::vector<double> extra = {}) {
  std::vector<double> cuts{a, b};
  for (double e : extra) {
    if (e > a && e < b) cuts.push_back(e);
  }
  double z0 = a, f0 = g(z0);
  for (int i = 1; i <= scan; ++i) {
    const double z1 = a + (b - a) * i / scan, f1 = g(z1);
    if (std::isfinite(f0) && std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0)) {
      std::uintmax_t iters = 64;
      const auto r = boost::math::tools::toms748_solve(
          g, z0, z1, f0, f1, boost::math::tools::eps_tolerance<double>(50), iters);
      cuts.push_back(0.5 * (r.first + r.second));
    }
    z0 = z1;
    f0 = f1;
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// The integrand (√p − √q)² has no kinks, so plain bisection on ±12σ of the
// pair reference suffices. Reports zero nodes.
QuadratureResult hellinger_adaptive_1d(const DensitySpec& p, const DensitySpec& q,
                                       const GaussianMeasure& ref, double tol) {
  const double c = ref.mean()[0];
  const double sd = std::sqrt(ref.cov().matrix()(0, 0));
  const auto f = [&](double t) {
    const Vec x = Vec::Constant(1, c + sd * t);
    const double a = 0.5 * p.log_density(x), b = 0.5 * q.log_density(x);
    if (a == kNegInf && b == kNegInf) return 0.0;
    const double hi = std::max(a, b), e = std::expm1(std::min(a, b) - hi);
    return sd * std::exp(2.0 * hi) * e * e;
  };
  const double s = std::min(std::max(adaptive_abs(f, -12.0, 12.0, tol, 30), 0.0), 2.0);
  return {std::sqrt(s), std::sqrt(s), 0};
}

double piecewise_abs(const std::function<double(double)>& f, const std::vector<double>& cuts,
                     double tol, int depth) {
  const double span = cuts.back() - cuts.front();
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = cuts[i + 1] - cuts[i];
    if (w > 1e-14 * span) v += adaptive_abs(f, cuts[i], cuts[i + 1], tol * w / span, depth);
  }
  return v;
}

}  // namespace

QuadratureResult hellinger_quadrature(const DensitySpec& p, const DensitySpec& q,
                                      const QuadratureOptions& opts) {
  const GaussianMeasure ref = pair_reference(p.envelope, q.envelope);
  require_quadrature_dim(ref.dim());
  const int cap = node_cap(opts, ref.dim());
  const double abs_floor = std::max(opts.abs_tol, 1e-20);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int m = opts.min_nodes; m <= cap; m *= 2) {
    QuadratureGrid grid(ref, m);
    double s = 0.0;
    grid.for_each([&](const Vec& x, double lw) {
      const double a = 0.5 * p.log_density(x);
      const double b = 0.5 * q.log_density(x);
      if (a == kNegInf && b == kNegInf) return;
      const double hi = std::max(a, b), lo = std::min(a, b);
      const double e = std::expm1(lo - hi);
      s += std::exp(lw + 2.0 * hi) * e * e;
    });
    if (std::isfinite(prev) && std::abs(s - prev) <= opts.rel_tol * s + abs_floor) {
      return {std::sqrt(std::min(std::max(s, 0.0), 2.0)),
              std::sqrt(std::min(std::max(prev, 0.0), 2.0)), m};
    }
    if (m * 2 > cap) {
      if (ref.dim() == 1) return hellinger_adaptive_1d(p, q, ref, opts.rel_tol);
      throw QuadratureFailure("Hellinger refinement did not converge", prev, s);
    }
    prev = s;
  }
  throw QuadratureFailure("Hellinger refinement did not converge", prev, prev);
}

double hellinger_distance(const DensitySpec& p, const DensitySpec& q,
                          const QuadratureOptions& opts) {
  return hellinger_quadrature(p, q, opts).value;
}

double tv_distance(const DensitySpec& p, const DensitySpec& q, double tol) {
  const GaussianMeasure ref = pair_reference(p.envelope, q.envelope);
  const int d = ref.dim();
  require_quadrature_dim(d);
  if (!(tol > 0.0)) throw ConfigurationError("tolerance must be positive");
  const Mat& L = ref.cov().factor();
  const double log_jac = 0.5 * ref.cov().log_det();
  constexpr double kBox = 10.0;
  Vec z(d);

  auto leaf = [&]() {
    const Vec x = ref.mean() + L * z;
    const double a = p.log_density(x), b = q.log_density(x);
    if (a == kNegInf && b == kNegInf) return 0.0;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return -std::exp(hi + log_jac) * std::expm1(lo - hi);
  };
  // The innermost axis is split where log p = log q, so each piece is smooth.
  std::function<double(int, double)> level = [&](int k, double t) -> double {
    if (k + 1 == d) {
      auto log_ratio = [&](double zk) {
        z[k] = zk;
        const Vec x = ref.mean() + L * z;
        return p.log_density(x) - q.log_density(x);
      };
      const auto cuts = sign_change_cuts(log_ratio, -kBox, kBox, 64);
      return piecewise_abs(
          [&](double zk) {
            z[k] = zk;
            return leaf();
          },
          cuts, t, 12);
    }
    return adaptive_abs(
        [&, k, t](double zk) {
          z[k] = zk;
          return level(k + 1, t / (2.0 * kBox));
        },
        -kBox, kBox, t, 12);
  };
  return std::clamp(0.5 * level(0, tol), 0.0, 1.0);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0, l1 = 0.0;
  const double v = gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err, &l1);
  if (!std::isfinite(v) || err > std::max(1e-6 * l1, 1e-300)) {
    throw QuadratureFailure("adaptive Gauss-Kronrod did not converge", v - err, v);
  }
  return v;
}

MhMetrics1d mh_metrics_1d(const std::function<double(double)>& log_target, double loc,
                          double scale, const GaussianProposal1d& proposal, double rel_tol) {
  if (!(scale > 0.0) || !(proposal.variance > 0.0)) {
    throw ConfigurationError("scales must be positive");
  }
  const double a = proposal.contraction, c = proposal.center;
  const double sigma = std::sqrt(proposal.variance);
  const double lo = loc - 12.0 * scale, hi = loc + 12.0 * scale;
  auto log_q = [&](double x, double y) {
    const double r = y - c - a * (x - c);
    return -0.5 * r * r / proposal.variance;
  };
  // α = 1 ∧ e^{lr} has a kink wherever lr changes sign, always including y = x.
  auto inner = [&](double x, int power) {
    const double lx = log_target(x);
    if (lx == kNegInf) return 0.0;
    const double mean = c + a * (x - c);
    auto lr_at = [&](double zz) {
      const double y = mean + sigma * zz;
      return log_target(y) + log_q(y, x) - lx - log_q(x, y);
    };
    auto integrand = [&](double zz) {
      const double lr = lr_at(zz);
      double alpha = 0.0;
      if (lr >= 0.0) alpha = 1.0;
      else if (lr > kNegInf) alpha = std::exp(lr);
      const double dx = mean + sigma * zz - x;
      const double w = std::exp(-0.5 * zz * zz) / std::sqrt(2.0 * M_PI);
      return w * alpha * (power == 0 ? 1.0 : dx * dx);
    };
    constexpr double kEdge = 12.0;
    const auto cuts = sign_change_cuts(lr_at, -kEdge, kEdge, 96, {(x - mean) / sigma});
    // Absolute target below the outer one; the inner integral is at most 1 or E|y − x|².
    const double mu = (a - 1.0) * (x - c);
    const double tol = 1e-3 * rel_tol * (power == 0 ? 1.0 : proposal.variance + mu * mu);
    const double iv = piecewise_abs(integrand, cuts, tol, 20);
    return std::exp(lx) * iv;
  };
  MhMetrics1d out{};
  out.abar = integrate_1d([&](double x) { return inner(x, 0); }, lo, hi, rel_tol);
  out.jump2 = integrate_1d([&](double x) { return inner(x, 2); }, lo, hi, rel_tol);
  out.mean = integrate_1d([&](double x) { return x * std::exp(log_target(x)); }, lo, hi, rel_tol);
  out.variance = integrate_1d(
      [&](double x) { return (x - out.mean) * (x - out.mean) * std::exp(log_target(x)); }, lo, hi,
      rel_tol);
  out.proposal_jump4 = integrate_1d(
      [&](double x) {
        const double mu = (a - 1.0) * (x - c);
        const double s2 = proposal.variance;
        return std::exp(log_target(x)) * (mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2);
      },
      lo, hi, rel_tol);
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigurationError("slope fit needs at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigurationError("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

RateStudy hellinger_rate_study(const TargetFamily& target, const std::vector<double>& n_grid,
                               const Vec& x0, bool with_tv, const QuadratureOptions& opts) {
  if (n_grid.empty()) throw ConfigurationError("rate study needs a nonempty n grid");
  RateStudy study;
  std::vector<double> ns, hs, ts;
  for (double n : n_grid) {
    const LaplaceApproximation la = laplace_approximation(target, n, x0);
    const DensitySpec p = posterior_density(target, n, la, opts);
    const DensitySpec q = gaussian_density(la.as_gaussian());
    const QuadratureResult h = hellinger_quadrature(p, q, opts);
    RateRow row{n, h.value, std::numeric_limits<double>::quiet_NaN(), h.nodes_per_axis};
    if (with_tv) row.tv = tv_distance(p, q);
    study.rows.push_back(row);
    ns.push_back(n);
    hs.push_back(row.hellinger);
    ts.push_back(row.tv);
  }
  const auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double t) { return t > 0.0; });
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  study.hellinger_slope = (ns.size() >= 2 && positive(hs)) ? fit_loglog_slope(ns, hs) : nan;
  study.tv_slope = (with_tv && ns.size() >= 2 && positive(ts)) ? fit_loglog_slope(ns, ts) : nan;
  return study;
}

SubspaceCheck informed_subspace_check(const TargetFamily& target,
                                      const std::vector<double>& n_grid,
                                      const std::vector<Vec>& directions, const Vec& x0) {
  if (n_grid.size() < 2) throw ConfigurationError("subspace check needs at least two n values");
  SubspaceCheck out;
  std::vector<std::vector<double>> series(directions.size());
  for (double n : n_grid) {
    const LaplaceApproximation la = laplace_approximation(target, n, x0);
    for (std::size_t j = 0; j < directions.size(); ++j) {
      const Vec& v = directions[j];
      const double sv = n * v.dot(la.covariance.matrix() * v);
      out.rows.push_back({n, static_cast<int>(j), sv});
      series[j].push_back(sv);
    }
  }
  for (const auto& s : series) {
    const double slope = fit_loglog_slope(n_grid, s);
    out.slopes.push_back(slope);
    out.bounded.push_back(slope < 0.5);
  }
  return out;
}

}  // namespace hmh
