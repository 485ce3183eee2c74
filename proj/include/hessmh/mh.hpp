#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hessmh/proposals.hpp"

namespace hmh {

/// Randomness consumed by one Metropolis-Hastings transition.
struct StepNoise {
  Vec z;     // standard-normal proposal noise
  double u;  // uniform on [0, 1)
};

/// Produces the noise for a given global step index and dimension.
using NoiseSource = std::function<StepNoise(std::uint64_t step, int dim)>;

/// Noise source backed by the counter-based stream (seed, stream): the draws
/// of step k are a pure function of (seed, stream, k).
NoiseSource seeded_noise(std::uint64_t seed, std::uint64_t stream = 0);

struct StepResult {
  Vec next;
  bool accepted = false;
  Vec proposal;
  double alpha = 0.0;
};

/// One transition: y = propose(x, z); accept iff u < alpha(x, y).
StepResult mh_step_with_noise(const TargetFamily& target, double n, const ProposalKernel& kernel,
                              const Vec& x, const StepNoise& noise);

StepResult mh_step(const TargetFamily& target, double n, const ProposalKernel& kernel,
                   const Vec& x, CounterRng& rng);

/// Output of a chain run after burn-in. Column k of `states` is x_k; column k
/// of `proposals` is the proposal drawn from x_k.
struct ChainRecord {
  Mat states;     // d x (N + 1)
  Mat proposals;  // d x N
  std::vector<std::uint8_t> accepted;
  std::vector<double> alpha_values;
  std::uint64_t seed = 0;
  double n = 1.0;
  std::string kernel;
  std::size_t burn_in = 0;

  std::size_t steps() const { return alpha_values.size(); }
  int dim() const { return static_cast<int>(states.rows()); }
};

inline constexpr std::size_t kDefaultBurnIn = 1000;

/// Runs burn_in + steps transitions from x0 and records the last `steps`.
/// Bit-reproducible for a fixed noise source.
ChainRecord run_chain(const TargetFamily& target, double n, const ProposalKernel& kernel,
                      const Vec& x0, std::size_t steps, std::size_t burn_in,
                      const NoiseSource& noise);

ChainRecord run_chain(const TargetFamily& target, double n, const ProposalKernel& kernel,
                      const Vec& x0, std::size_t steps, std::size_t burn_in, std::uint64_t seed);

/// One chain per seed, run in parallel. Each record equals the corresponding
/// sequential run_chain call. Throws ConfigurationError on duplicate seeds.
std::vector<ChainRecord> run_replicas(const TargetFamily& target, double n,
                                      const ProposalKernel& kernel, const Vec& x0,
                                      std::size_t steps, std::size_t burn_in,
                                      const std::vector<std::uint64_t>& seeds,
                                      unsigned threads = 0);

/// Runs `count` independent jobs on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job,
                  unsigned threads = 0);

}  // namespace hmh
