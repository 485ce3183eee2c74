#pragma once

#include <cstdint>
#include <vector>

#include "hessmh/mh.hpp"

namespace hmh {

/// Row-stochastic transition matrix with a positive stationary distribution.
struct FiniteChain {
  Mat K;
  Vec pi;
  int size() const { return static_cast<int>(pi.size()); }
};

/// Validates rows summing to 1 and πK = π (both to 1e-12) and π > 0.
/// Throws ConfigurationError otherwise.
FiniteChain make_finite_chain(Mat K, Vec pi);

/// max |π_i K_ij − π_j K_ji|.
double reversibility_residual(const FiniteChain& chain);
/// max |(πK)_j − π_j|.
double stationarity_residual(const FiniteChain& chain);

/// Surjective map {0..m-1} → {0..m'-1}.
struct StateMap {
  std::vector<int> image;
  int codomain = 0;

  int domain() const { return static_cast<int>(image.size()); }
  bool bijective() const { return domain() == codomain; }
};

/// Throws ConfigurationError unless the image covers {0..codomain-1}.
StateMap make_state_map(std::vector<int> image, int codomain);

/// (T_*π)_y = Σ_{T(x)=y} π_x.
Vec pushforward_measure(const FiniteChain& chain, const StateMap& T);
Vec pushforward_measure(const Vec& pi, const StateMap& T);

/// (T_*K)_{y,y'} = Σ_{T(x)=y} (π_x / (T_*π)_y) Σ_{T(x')=y'} K_{x,x'}.
/// Throws DegenerateFiber when a fiber carries no mass.
FiniteChain pushforward_kernel(const FiniteChain& chain, const StateMap& T);
/// Fiber-weighted pushforward of an arbitrary row-stochastic matrix.
Mat pushforward_matrix(const Mat& K, const Vec& pi, const StateMap& T);

/// 1 − max |λ| over the spectrum of D^½ K D^-½ on mean-zero functions.
/// Throws NonReversible when π_i K_ij ≠ π_j K_ji beyond 1e-10.
double exact_spectral_gap(const FiniteChain& chain);

struct GapReport {
  double gap_original;
  double gap_pushforward;
  bool bijective;
  double violation;          // gap_original − gap_pushforward (≤ 0 when monotone)
  double equality_residual;  // |difference| when bijective, else 0
  double reversibility_residual;  // of T_*K
};

GapReport verify_gap_monotonicity(const FiniteChain& chain, const StateMap& T);

/// Σ_{x≠y} π_x K_xy.
double off_diagonal_flow(const FiniteChain& chain);

/// Metropolis-Hastings chain on a finite space from a proposal matrix P
/// and target π: K_xy = P_xy α_xy for x ≠ y, α = 1 ∧ π_y P_yx / (π_x P_xy).
struct FiniteMhChain {
  Mat proposal;
  Mat alpha;  // α_xy where P_xy > 0, else 0
  FiniteChain chain;
};

FiniteMhChain finite_mh_chain(const Mat& proposal, const Vec& pi);

/// Σ_{x,y} π_x P_xy α_xy (the diagonal counts with α = 1).
double finite_average_acceptance(const FiniteMhChain& mh);

struct CoincidenceReport {
  double abar_original;
  double abar_pushforward;    // of MH(T_*P) targeting T_*π
  double coincidence_residual;
  double kernel_residual;     // max |T_*K − MH(T_*P)|
  bool alpha_factors;         // α_xy depends on (Tx, Ty) only
  double marginal_residual;   // pushed stationary transition measure vs π̄ T_*K
  double correlation_residual;  // lag-one correlations of f∘T and f
};

/// `f` is a function on the codomain used for the lag-one correlation identity.
CoincidenceReport verify_acceptance_coincidence(const FiniteMhChain& mh, const StateMap& T,
                                                const Vec& f);

/// Random instances for the fuzz suite. All draws come from `rng`.
StateMap random_surjection(int m, int codomain, CounterRng& rng);
StateMap random_bijection(int m, CounterRng& rng);
/// K_xy = W_xy / Σ_y W_xy for a random symmetric positive W.
FiniteChain random_reversible_chain(int m, CounterRng& rng);
/// Random stationary law with max π_x <= cap.
Vec random_distribution(int m, double cap, CounterRng& rng);
/// Random MH chain with proposal P (dense, positive) and target π.
FiniteMhChain random_mh_chain(int m, double cap, CounterRng& rng);
/// MH chain whose target and proposal factor through T:
/// π_x = π̄_{Tx} w_x, P_xx' = P̄_{Tx,Tx'} w_x' with fiber weights w.
FiniteMhChain random_lifted_mh_chain(const StateMap& T, double cap, CounterRng& rng);

struct FuzzCase {
  int index;
  int states;
  int codomain;
  bool bijective;
  double reversibility_residual;
  double gap_violation;
  double gap_equality_residual;
  double coincidence_residual;
  double cheeger_slack;  // gap − 2 Σ_{x≠y} π_x K_xy of the MH chain (≤ 0 when the bound holds)
  double acceptance_slack;  // gap − 2 ᾱ of the MH chain
};

struct FuzzSummary {
  int cases = 0;
  std::uint64_t seed = 0;
  double max_reversibility_residual = 0.0;
  double max_gap_violation = -1.0;
  double max_gap_equality_residual = 0.0;
  double max_coincidence_residual = 0.0;
  double max_cheeger_slack = -2.0;
  double max_acceptance_slack = -2.0;
  int bijective_cases = 0;
  std::vector<FuzzCase> failures;  // cases breaching the 1e-12 tolerances
  bool passed() const { return failures.empty(); }
};

inline constexpr double kFiniteTolerance = 1e-12;

FuzzSummary run_pushforward_fuzz(int cases, std::uint64_t seed);

/// Target N(0, I_d) as a TargetFamily at n = 1.
TargetFamily standard_gaussian_target(int d);

struct CouplingReport {
  double max_deviation;               // max_k ‖x_k^(n) − T(x_k^std)‖
  double max_standardized_deviation;  // max_k ‖L⁻¹(x_k^(n) − T(x_k^std))‖
  std::size_t decision_mismatches;    // steps with different accept flags
  ChainRecord standard;
  ChainRecord hessian;
};

/// Runs the standard chain (RW or pCN with covariance I on N(0, I_d)) and
/// the matching Hessian chain on π_n with identical noise, and compares the
/// latter with T(x) = x_n + L x, L the Cholesky factor of C_n. Throws
/// ConfigurationError for mismatched variants or step sizes.
CouplingReport coupled_affine_chain(const TargetFamily& target, double n,
                                    const ProposalKernel& standard_kernel,
                                    const ProposalKernel& hessian_kernel, std::size_t steps,
                                    std::uint64_t seed);

}  // namespace hmh
