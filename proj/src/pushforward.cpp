#include "hessmh/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hmh {

FiniteChain make_finite_chain(Mat K, Vec pi) {
  const auto m = K.rows();
  if (m < 1 || K.cols() != m || pi.size() != m) {
    throw ConfigurationError("transition matrix and stationary law sizes disagree");
  }
  if ((pi.array() <= 0.0).any()) throw ConfigurationError("stationary law must be positive");
  if (std::abs(pi.sum() - 1.0) > kFiniteTolerance) {
    throw ConfigurationError("stationary law must sum to one");
  }
  if ((K.array() < 0.0).any()) throw ConfigurationError("transition matrix has negative entries");
  if (((K.rowwise().sum().array() - 1.0).abs() > kFiniteTolerance).any()) {
    throw ConfigurationError("transition matrix rows must sum to one");
  }
  FiniteChain c{std::move(K), std::move(pi)};
  if (stationarity_residual(c) > kFiniteTolerance) {
    throw ConfigurationError("stationary law is not invariant under the kernel");
  }
  return c;
}

double reversibility_residual(const FiniteChain& chain) {
  const Mat flow = chain.pi.asDiagonal() * chain.K;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

double stationarity_residual(const FiniteChain& chain) {
  return (chain.K.transpose() * chain.pi - chain.pi).cwiseAbs().maxCoeff();
}

StateMap make_state_map(std::vector<int> image, int codomain) {
  if (codomain < 1 || image.empty()) throw ConfigurationError("state map must be nonempty");
  std::vector<bool> hit(static_cast<std::size_t>(codomain), false);
  for (int y : image) {
    if (y < 0 || y >= codomain) throw ConfigurationError("state map value out of range");
    hit[static_cast<std::size_t>(y)] = true;
  }
  if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
    throw ConfigurationError("state map is not surjective");
  }
  return StateMap{std::move(image), codomain};
}

Vec pushforward_measure(const Vec& pi, const StateMap& T) {
  if (pi.size() != T.domain()) throw ConfigurationError("state map domain mismatch");
  Vec out = Vec::Zero(T.codomain);
  for (int x = 0; x < T.domain(); ++x) out[T.image[x]] += pi[x];
  return out;
}

Vec pushforward_measure(const FiniteChain& chain, const StateMap& T) {
  return pushforward_measure(chain.pi, T);
}

Mat pushforward_matrix(const Mat& K, const Vec& pi, const StateMap& T) {
  const Vec pbar = pushforward_measure(pi, T);
  Mat out = Mat::Zero(T.codomain, T.codomain);
  for (int x = 0; x < T.domain(); ++x) {
    for (int x2 = 0; x2 < T.domain(); ++x2) {
      out(T.image[x], T.image[x2]) += pi[x] * K(x, x2);
    }
  }
  for (int y = 0; y < T.codomain; ++y) {
    if (!(pbar[y] > 0.0)) throw DegenerateFiber("fiber over a codomain state has zero mass");
    out.row(y) /= pbar[y];
  }
  return out;
}

FiniteChain pushforward_kernel(const FiniteChain& chain, const StateMap& T) {
  return FiniteChain{pushforward_matrix(chain.K, chain.pi, T), pushforward_measure(chain, T)};
}

double exact_spectral_gap(const FiniteChain& chain) {
  if (reversibility_residual(chain) > 1e-10) {
    throw NonReversible("spectral gap requires a reversible chain");
  }
  const int m = chain.size();
  if (m == 1) return 1.0;
  const Vec r = chain.pi.cwiseSqrt();
  Mat s = r.asDiagonal() * chain.K * r.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose());
  s -= r * r.transpose();  // removes the constant eigenfunction
  Eigen::SelfAdjointEigenSolver<Mat> eig(s, Eigen::EigenvaluesOnly);
  return 1.0 - eig.eigenvalues().cwiseAbs().maxCoeff();
}

GapReport verify_gap_monotonicity(const FiniteChain& chain, const StateMap& T) {
  const FiniteChain push = pushforward_kernel(chain, T);
  GapReport rep{};
  rep.gap_original = exact_spectral_gap(chain);
  rep.gap_pushforward = exact_spectral_gap(push);
  rep.bijective = T.bijective();
  rep.violation = rep.gap_original - rep.gap_pushforward;
  rep.equality_residual = rep.bijective ? std::abs(rep.violation) : 0.0;
  rep.reversibility_residual = reversibility_residual(push);
  return rep;
}

double off_diagonal_flow(const FiniteChain& chain) {
  double f = 0.0;
  for (int x = 0; x < chain.size(); ++x) f += chain.pi[x] * (1.0 - chain.K(x, x));
  return f;
}

namespace {

Mat mh_alpha(const Mat& P, const Vec& pi) {
  const auto m = P.rows();
  Mat a = Mat::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = 0; y < m; ++y) {
      if (!(P(x, y) > 0.0)) continue;
      if (x == y) {
        a(x, y) = 1.0;
        continue;
      }
      const double num = pi[y] * P(y, x), den = pi[x] * P(x, y);
      a(x, y) = std::min(1.0, num / den);
    }
  }
  return a;
}

Mat mh_kernel(const Mat& P, const Mat& alpha) {
  Mat K = P.cwiseProduct(alpha);
  for (Eigen::Index x = 0; x < K.rows(); ++x) {
    K(x, x) = 0.0;
    K(x, x) = 1.0 - K.row(x).sum();
  }
  return K;
}

double lag_one_correlation(const Mat& K, const Vec& pi, const Vec& g) {
  const double mean = pi.dot(g);
  const Vec c = g.array() - mean;
  const double var = pi.dot(c.cwiseProduct(c));
  if (!(var > 0.0)) return 1.0;
  return (pi.asDiagonal() * K * c).dot(c) / var;
}

}  // namespace

FiniteMhChain finite_mh_chain(const Mat& proposal, const Vec& pi) {
  if (proposal.rows() != proposal.cols() || proposal.rows() != pi.size()) {
    throw ConfigurationError("proposal and target sizes disagree");
  }
  if (((proposal.rowwise().sum().array() - 1.0).abs() > kFiniteTolerance).any()) {
    throw ConfigurationError("proposal rows must sum to one");
  }
  FiniteMhChain mh;
  mh.proposal = proposal;
  mh.alpha = mh_alpha(proposal, pi);
  mh.chain = make_finite_chain(mh_kernel(proposal, mh.alpha), pi);
  return mh;
}

double finite_average_acceptance(const FiniteMhChain& mh) {
  return (mh.chain.pi.asDiagonal() * mh.proposal.cwiseProduct(mh.alpha)).sum();
}

CoincidenceReport verify_acceptance_coincidence(const FiniteMhChain& mh, const StateMap& T,
                                                const Vec& f) {
  if (f.size() != T.codomain) throw ConfigurationError("functional lives on the codomain");
  const Vec& pi = mh.chain.pi;
  const Vec pbar = pushforward_measure(pi, T);
  const Mat pushed_p = pushforward_matrix(mh.proposal, pi, T);
  const Mat alpha_bar = mh_alpha(pushed_p, pbar);
  const Mat mh_bar = mh_kernel(pushed_p, alpha_bar);
  const Mat pushed_k = pushforward_matrix(mh.chain.K, pi, T);

  CoincidenceReport rep{};
  rep.abar_original = finite_average_acceptance(mh);
  rep.abar_pushforward = (pbar.asDiagonal() * pushed_p.cwiseProduct(alpha_bar)).sum();
  rep.coincidence_residual = std::abs(rep.abar_original - rep.abar_pushforward);
  rep.kernel_residual = (pushed_k - mh_bar).cwiseAbs().maxCoeff();

  rep.alpha_factors = true;
  const int m = T.domain();
  Mat seen = Mat::Constant(T.codomain, T.codomain, -1.0);
  for (int x = 0; x < m && rep.alpha_factors; ++x) {
    for (int y = 0; y < m; ++y) {
      if (!(mh.proposal(x, y) > 0.0)) continue;
      double& s = seen(T.image[x], T.image[y]);
      if (s < 0.0) {
        s = mh.alpha(x, y);
      } else if (std::abs(s - mh.alpha(x, y)) > kFiniteTolerance) {
        rep.alpha_factors = false;
        break;
      }
    }
  }

  Mat joint = Mat::Zero(T.codomain, T.codomain);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) joint(T.image[x], T.image[y]) += pi[x] * mh.chain.K(x, y);
  rep.marginal_residual = (joint - pbar.asDiagonal() * pushed_k).cwiseAbs().maxCoeff();

  Vec g(m);
  for (int x = 0; x < m; ++x) g[x] = f[T.image[x]];
  rep.correlation_residual = std::abs(lag_one_correlation(mh.chain.K, pi, g) -
                                      lag_one_correlation(pushed_k, pbar, f));
  return rep;
}

StateMap random_surjection(int m, int codomain, CounterRng& rng) {
  if (codomain < 1 || codomain > m) throw ConfigurationError("codomain must lie in [1, m]");
  std::vector<int> image(static_cast<std::size_t>(m));
  for (int x = 0; x < m; ++x) {
    image[x] = x < codomain ? x : static_cast<int>(rng() % static_cast<std::uint64_t>(codomain));
  }
  std::shuffle(image.begin(), image.end(), rng);
  return make_state_map(std::move(image), codomain);
}

StateMap random_bijection(int m, CounterRng& rng) { return random_surjection(m, m, rng); }

FiniteChain random_reversible_chain(int m, CounterRng& rng) {
  Mat W(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      // occasional zeros exercise sparse kernels
      const double u = rng.uniform();
      W(i, j) = W(j, i) = u < 0.15 && i != j ? 0.0 : 0.05 + u;
    }
  }
  const Vec row = W.rowwise().sum();
  Mat K = row.cwiseInverse().asDiagonal() * W;
  for (int i = 0; i < m; ++i) K(i, i) = 1.0 - (K.row(i).sum() - K(i, i));
  Vec pi = row / row.sum();
  return FiniteChain{std::move(K), std::move(pi)};
}

Vec random_distribution(int m, double cap, CounterRng& rng) {
  if (cap * m < 1.0) throw ConfigurationError("cap too small for this state count");
  for (;;) {
    Vec w(m);
    for (int i = 0; i < m; ++i) w[i] = 0.05 + rng.uniform();
    w /= w.sum();
    if (w.maxCoeff() <= cap) return w;
    if (cap * m <= 1.0 + 1e-12) return Vec::Constant(m, 1.0 / m);
  }
}

namespace {

Mat random_stochastic(int m, CounterRng& rng) {
  Mat P(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) P(i, j) = 0.05 + rng.uniform();
  const Vec row = P.rowwise().sum();
  P = row.cwiseInverse().asDiagonal() * P;
  for (int i = 0; i < m; ++i) P(i, i) = 1.0 - (P.row(i).sum() - P(i, i));
  return P;
}

}  // namespace

FiniteMhChain random_mh_chain(int m, double cap, CounterRng& rng) {
  const Vec pi = random_distribution(m, cap, rng);
  return finite_mh_chain(random_stochastic(m, rng), pi);
}

FiniteMhChain random_lifted_mh_chain(const StateMap& T, double cap, CounterRng& rng) {
  const int m = T.domain(), k = T.codomain;
  for (;;) {
    // a cap of 1/m leaves only the uniform law
    const bool uniform = cap * m <= 1.0 + 1e-12;
    Vec pbar = random_distribution(k, 1.0, rng);
    const Mat pb = random_stochastic(k, rng);
    Vec w(m), fiber = Vec::Zero(k);
    for (int x = 0; x < m; ++x) {
      w[x] = uniform ? 1.0 : 0.05 + rng.uniform();
      fiber[T.image[x]] += w[x];
    }
    if (uniform) pbar = fiber / m;
    for (int x = 0; x < m; ++x) w[x] /= fiber[T.image[x]];
    Vec pi(m);
    for (int x = 0; x < m; ++x) pi[x] = pbar[T.image[x]] * w[x];
    pi /= pi.sum();
    if (pi.maxCoeff() > cap + 1e-15) continue;
    Mat P(m, m);
    for (int x = 0; x < m; ++x)
      for (int x2 = 0; x2 < m; ++x2) P(x, x2) = pb(T.image[x], T.image[x2]) * w[x2];
    for (int x = 0; x < m; ++x) P(x, x) = 1.0 - (P.row(x).sum() - P(x, x));
    return finite_mh_chain(P, pi);
  }
}

FuzzSummary run_pushforward_fuzz(int cases, std::uint64_t seed) {
  if (cases < 1) throw ConfigurationError("fuzz needs at least one case");
  FuzzSummary sum;
  sum.cases = cases;
  sum.seed = seed;
  const RandomStream rs(seed, 0x7075736866776400ULL);
  for (int c = 0; c < cases; ++c) {
    CounterRng rng = rs.at_step(static_cast<std::uint64_t>(c));
    const int m = 2 + static_cast<int>(rng() % 7);  // 2..8 states
    const bool bij = c % 4 == 0;
    const int k = bij ? m : 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    const StateMap T = random_surjection(m, k, rng);

    FuzzCase fc{};
    fc.index = c;
    fc.states = m;
    fc.codomain = k;
    fc.bijective = T.bijective();

    const FiniteChain chain = random_reversible_chain(m, rng);
    const GapReport gap = verify_gap_monotonicity(chain, T);
    fc.reversibility_residual = gap.reversibility_residual;
    fc.gap_violation = gap.violation;
    fc.gap_equality_residual = gap.equality_residual;

    // Acceptance rates only coincide when α factors through T, which holds
    // for bijections and for lifted chains.
    const double cap = m >= 2 ? 0.5 : 1.0;
    const FiniteMhChain mh =
        fc.bijective ? random_mh_chain(m, cap, rng) : random_lifted_mh_chain(T, cap, rng);
    Vec f(k);
    for (int y = 0; y < k; ++y) f[y] = rng.normal();
    const CoincidenceReport co = verify_acceptance_coincidence(mh, T, f);
    fc.coincidence_residual = co.coincidence_residual;
    const double mh_gap = exact_spectral_gap(mh.chain);
    fc.cheeger_slack = mh_gap - 2.0 * off_diagonal_flow(mh.chain);
    fc.acceptance_slack = mh_gap - 2.0 * finite_average_acceptance(mh);

    sum.max_reversibility_residual = std::max(sum.max_reversibility_residual,
                                              fc.reversibility_residual);
    sum.max_gap_violation = std::max(sum.max_gap_violation, fc.gap_violation);
    sum.max_gap_equality_residual = std::max(sum.max_gap_equality_residual,
                                             fc.gap_equality_residual);
    sum.max_coincidence_residual = std::max(sum.max_coincidence_residual,
                                            fc.coincidence_residual);
    sum.max_cheeger_slack = std::max(sum.max_cheeger_slack, fc.cheeger_slack);
    sum.max_acceptance_slack = std::max(sum.max_acceptance_slack, fc.acceptance_slack);
    if (fc.bijective) ++sum.bijective_cases;

    const bool ok = fc.reversibility_residual <= kFiniteTolerance &&
                    fc.gap_violation <= kFiniteTolerance &&
                    fc.gap_equality_residual <= kFiniteTolerance &&
                    fc.coincidence_residual <= kFiniteTolerance &&
                    fc.cheeger_slack <= kFiniteTolerance && fc.acceptance_slack <= 0.0;
    if (!ok) sum.failures.push_back(fc);
  }
  return sum;
}

TargetFamily standard_gaussian_target(int d) {
  TargetFamily t;
  t.dim = d;
  t.potential = SmoothFunction::analytic(
      [](const Vec& x) { return 0.5 * x.squaredNorm(); }, [](const Vec& x) { return x; },
      [d](const Vec&) { return Mat::Identity(d, d); });
  t.log_prior = SmoothFunction::zero(d);
  return t;
}

CouplingReport coupled_affine_chain(const TargetFamily& target, double n,
                                    const ProposalKernel& standard_kernel,
                                    const ProposalKernel& hessian_kernel, std::size_t steps,
                                    std::uint64_t seed) {
  const bool rw_pair = standard_kernel.variant() == ProposalVariant::random_walk &&
                       hessian_kernel.variant() == ProposalVariant::hessian_rw;
  const bool pcn_pair = standard_kernel.variant() == ProposalVariant::pcn &&
                        hessian_kernel.variant() == ProposalVariant::modified_pcn;
  if (!rw_pair && !pcn_pair) {
    throw ConfigurationError("coupling pairs rw with hessian-rw and pcn with modified-pcn");
  }
  if (standard_kernel.step() != hessian_kernel.step()) {
    throw ConfigurationError("coupled kernels must share the step size");
  }
  const int d = hessian_kernel.dim();
  if (standard_kernel.dim() != d || target.dim != d) {
    throw ConfigurationError("coupled kernels and target must share the dimension");
  }
  if ((standard_kernel.base_covariance().matrix() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() !=
      0.0) {
    throw ConfigurationError("standard kernel must use the identity covariance");
  }
  const auto& la = hessian_kernel.laplace();
  const Vec& xn = la->map_point;
  const SpdMatrix& C = la->covariance;

  const NoiseSource noise = seeded_noise(seed);
  CouplingReport rep{};
  rep.standard =
      run_chain(standard_gaussian_target(d), 1.0, standard_kernel, Vec::Zero(d), steps, 0, noise);
  rep.hessian = run_chain(target, n, hessian_kernel, xn, steps, 0, noise);
  rep.standard.seed = rep.hessian.seed = seed;

  for (Eigen::Index k = 0; k < rep.hessian.states.cols(); ++k) {
    const Vec mapped = xn + C.color(rep.standard.states.col(k));
    const Vec diff = rep.hessian.states.col(k) - mapped;
    rep.max_deviation = std::max(rep.max_deviation, diff.norm());
    rep.max_standardized_deviation =
        std::max(rep.max_standardized_deviation, C.whiten(diff).norm());
  }
  for (std::size_t k = 0; k < steps; ++k) {
    if (rep.standard.accepted[k] != rep.hessian.accepted[k]) ++rep.decision_mismatches;
  }
  return rep;
}

}  // namespace hmh
