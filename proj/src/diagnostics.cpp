#include "hessmh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace hmh {

Estimate batch_mean(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n == 0) throw ConfigurationError("cannot average an empty series");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (batches < 2) return {mean, 0.0};
  const std::size_t size = n / batches;
  std::vector<double> bm(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * size; i < (b + 1) * size; ++i) s += series[i];
    bm[b] = s / static_cast<double>(size);
  }
  const double grand = std::accumulate(bm.begin(), bm.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double v : bm) ss += (v - grand) * (v - grand);
  const double var = ss / static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

Estimate average_acceptance(const ChainRecord& record) {
  return batch_mean(record.alpha_values);
}

Estimate acceptance_frequency(const ChainRecord& record) {
  std::vector<double> a(record.accepted.begin(), record.accepted.end());
  return batch_mean(a);
}

Estimate directional_esjd(const ChainRecord& record, const Vec& v) {
  if (v.size() != record.dim()) throw ConfigurationError("direction has wrong dimension");
  const std::size_t n = record.steps();
  std::vector<double> jumps(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    const double j = v.dot(record.states.col(c + 1) - record.states.col(c));
    jumps[k] = j * j;
  }
  return batch_mean(jumps);
}

Estimate normalized_esjd(const ChainRecord& record, const Vec& v, double variance) {
  if (!(variance > 0.0)) throw ConfigurationError("normalizing variance must be positive");
  const Estimate e = directional_esjd(record, v);
  return {e.value / variance, e.se / variance};
}

IactResult iact(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 4) throw ConfigurationError("series too short for an autocorrelation time");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  // autocovariances by zero-padded FFT
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  std::vector<double> c(len, 0.0);
  for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, c);
  for (auto& z : spec) z = std::norm(z);
  std::vector<double> acf;
  fft.inv(acf, spec);
  auto autocov = [&](std::size_t lag) { return acf[lag] / static_cast<double>(n); };
  const double g0 = autocov(0);
  if (!(g0 > 0.0)) throw ConfigurationError("autocorrelation time of a constant series");
  double sum = 0.0;  // Σ Γ_m over the initial positive sequence
  std::size_t m = 0;
  int window = 0;
  for (; 2 * m + 1 < n / 2; ++m) {
    const double gamma = autocov(2 * m) + autocov(2 * m + 1);
    if (!(gamma > 0.0)) break;
    sum += gamma;
    window = static_cast<int>(2 * m + 1);
  }
  return {std::max((-g0 + 2.0 * sum) / g0, 0.0), window};
}

IactResult iact(const ChainRecord& record, const std::function<double(const Vec&)>& f) {
  std::vector<double> s(static_cast<std::size_t>(record.states.cols()));
  for (Eigen::Index k = 0; k < record.states.cols(); ++k) {
    s[static_cast<std::size_t>(k)] = f(record.states.col(k));
  }
  return iact(s);
}

Estimate pool(const std::vector<Estimate>& parts) {
  if (parts.empty()) throw ConfigurationError("nothing to pool");
  double v = 0.0, s2 = 0.0;
  for (const auto& e : parts) {
    v += e.value;
    s2 += e.se * e.se;
  }
  const double r = static_cast<double>(parts.size());
  return {v / r, std::sqrt(s2) / r};
}

GaussianReference gaussian_reference(int d, double s, std::uint64_t budget, std::uint64_t seed) {
  if (d < 1) throw ConfigurationError("dimension must be at least 1");
  if (!(s >= 0.0)) throw ConfigurationError("step size must be nonnegative");
  if (s == 0.0) return {{1.0, 0.0}, {0.0, 0.0}};

  if (d == 1) {
    auto accept = [s](double x, double xi) {
      const double y = x + s * xi;
      return std::min(1.0, std::exp(-0.5 * y * y + 0.5 * x * x));
    };
    const double inv_sqrt_2pi = 0.3989422804014327;
    auto phi = [&](double t) { return inv_sqrt_2pi * std::exp(-0.5 * t * t); };
    auto outer = [&](int power) {
      return integrate_1d(
          [&, power](double x) {
            return phi(x) * integrate_1d(
                                [&, x, power](double xi) {
                                  const double w = power == 0 ? 1.0 : s * s * xi * xi;
                                  return phi(xi) * w * accept(x, xi);
                                },
                                -14.0, 14.0, 1e-13);
          },
          -14.0, 14.0, 1e-13);
    };
    return {{outer(0), 0.0}, {outer(2), 0.0}};
  }

  if (budget < 2) throw ConfigurationError("Monte Carlo budget must be at least 2");
  RandomStream rs(seed, 0x7265666572656e63ULL);
  // One generator per block keeps the result independent of block scheduling.
  const std::uint64_t block = 1u << 16;
  double sa = 0, saa = 0, sj = 0, sjj = 0;
  Vec x(d), xi(d);
  for (std::uint64_t start = 0, b = 0; start < budget; start += block, ++b) {
    CounterRng rng = rs.at_step(b);
    const std::uint64_t stop = std::min(budget, start + block);
    for (std::uint64_t i = start; i < stop; ++i) {
      for (int k = 0; k < d; ++k) x[k] = rng.normal();
      for (int k = 0; k < d; ++k) xi[k] = rng.normal();
      const double lr = -0.5 * (x + s * xi).squaredNorm() + 0.5 * x.squaredNorm();
      const double a = lr >= 0.0 ? 1.0 : std::exp(lr);
      const double j = s * s * xi[0] * xi[0] * a;
      sa += a;
      saa += a * a;
      sj += j;
      sjj += j * j;
    }
  }
  const double m = static_cast<double>(budget);
  auto est = [m](double s1, double s2) {
    const double mean = s1 / m;
    const double var = std::max(s2 / m - mean * mean, 0.0) * m / (m - 1.0);
    return Estimate{mean, std::sqrt(var / m)};
  };
  return {est(sa, saa), est(sj, sjj)};
}

Estimate gaussian_reference_alpha(int d, double s, std::uint64_t budget, std::uint64_t seed) {
  return gaussian_reference(d, s, budget, seed).alpha;
}

Estimate gaussian_reference_esjd(int d, double s, std::uint64_t budget, std::uint64_t seed) {
  return gaussian_reference(d, s, budget, seed).esjd;
}

double modified_pcn_reference_esjd(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw ConfigurationError("pCN step size must lie in (0, 1]");
  return 2.0 - 2.0 * std::sqrt(1.0 - s * s);
}

std::string to_string(VarianceProvenance p) {
  switch (p) {
    case VarianceProvenance::exact: return "exact";
    case VarianceProvenance::quadrature: return "quadrature";
    case VarianceProvenance::sample: return "sample";
  }
  return "unknown";
}

double sample_variance(const std::vector<ChainRecord>& records, const Vec& v) {
  double s = 0.0, s2 = 0.0;
  double count = 0.0;
  for (const auto& r : records) {
    const Eigen::VectorXd f = r.states.transpose() * v;
    s += f.sum();
    s2 += f.squaredNorm();
    count += static_cast<double>(f.size());
  }
  if (count < 2) throw ConfigurationError("not enough states for a sample variance");
  const double mean = s / count;
  return std::max(s2 / count - mean * mean, 0.0) * count / (count - 1.0);
}

VarianceEstimate target_variance(const TargetFamily& target, double n, const Vec& v,
                                 const LaplaceApproximation& la, bool gaussian_exact,
                                 const std::vector<ChainRecord>* fallback,
                                 const QuadratureOptions& opts) {
  if (v.size() != target.dim || v.isZero(0.0)) {
    throw ConfigurationError("direction must be a nonzero vector of the target dimension");
  }
  if (gaussian_exact) {
    return {v.dot(la.covariance.matrix() * v), VarianceProvenance::exact, {}};
  }
  std::string why;
  if (target.dim <= kMaxQuadratureDim) {
    try {
      return {posterior_variance(target, n, la, v, opts), VarianceProvenance::quadrature, {}};
    } catch (const QuadratureFailure& e) {
      if (!fallback) throw;
      why = e.what();
    }
  } else {
    why = "dimension above quadrature limit";
  }
  if (!fallback) throw ConfigurationError("no variance available: " + why);
  return {sample_variance(*fallback, v), VarianceProvenance::sample,
          "sample variance used (" + why + ")"};
}

EfficiencyReport efficiency_report(const std::vector<ChainRecord>& records,
                                   const std::vector<Vec>& directions,
                                   const std::vector<VarianceEstimate>& variances) {
  if (records.empty()) throw ConfigurationError("no chain records to summarize");
  if (variances.size() != directions.size()) {
    throw ConfigurationError("one variance per direction required");
  }
  EfficiencyReport rep;
  std::vector<Estimate> a, f;
  for (const auto& r : records) {
    a.push_back(average_acceptance(r));
    f.push_back(acceptance_frequency(r));
  }
  rep.abar = pool(a);
  rep.acceptance_frequency = pool(f);
  for (std::size_t j = 0; j < directions.size(); ++j) {
    DirectionReport dr;
    dr.v = directions[j];
    dr.variance = variances[j];
    std::vector<Estimate> rho, rhobar;
    double tau = 0.0;
    int window = 0;
    for (const auto& r : records) {
      rho.push_back(directional_esjd(r, dr.v));
      rhobar.push_back(normalized_esjd(r, dr.v, dr.variance.value));
      try {
        const IactResult t = iact(r, [&](const Vec& x) { return dr.v.dot(x); });
        tau += t.tau;
        window = std::max(window, t.window);
      } catch (const ConfigurationError&) {
        tau = std::numeric_limits<double>::infinity();
      }
    }
    dr.rho = pool(rho);
    dr.rhobar = pool(rhobar);
    dr.tau = {tau / static_cast<double>(records.size()), window};
    rep.directions.push_back(std::move(dr));
  }
  return rep;
}

}  // namespace hmh
