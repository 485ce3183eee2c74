#include "hessmh/mh.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace hmh {

NoiseSource seeded_noise(std::uint64_t seed, std::uint64_t stream) {
  const RandomStream rs(seed, stream);
  return [rs](std::uint64_t step, int dim) {
    CounterRng rng = rs.at_step(step);
    StepNoise noise;
    noise.z = draw_standard_normal(dim, rng);
    noise.u = rng.uniform();
    return noise;
  };
}

StepResult mh_step_with_noise(const TargetFamily& target, double n, const ProposalKernel& kernel,
                              const Vec& x, const StepNoise& noise) {
  StepResult r;
  r.proposal = kernel.propose_with_noise(x, noise.z);
  r.alpha = acceptance_probability(log_acceptance_ratio(target, n, kernel, x, r.proposal));
  r.accepted = noise.u < r.alpha;
  r.next = r.accepted ? r.proposal : x;
  return r;
}

StepResult mh_step(const TargetFamily& target, double n, const ProposalKernel& kernel,
                   const Vec& x, CounterRng& rng) {
  StepNoise noise;
  noise.z = draw_standard_normal(kernel.dim(), rng);
  noise.u = rng.uniform();
  return mh_step_with_noise(target, n, kernel, x, noise);
}

ChainRecord run_chain(const TargetFamily& target, double n, const ProposalKernel& kernel,
                      const Vec& x0, std::size_t steps, std::size_t burn_in,
                      const NoiseSource& noise) {
  if (steps < 1) throw ConfigurationError("chain length must be at least 1");
  if (x0.size() != kernel.dim()) throw ConfigurationError("start point has wrong dimension");
  if (!target.in_support(x0)) throw InvalidState("start point lies outside the support");

  const int d = kernel.dim();
  Vec x = x0;
  std::uint64_t k = 0;
  for (; k < burn_in; ++k) {
    x = mh_step_with_noise(target, n, kernel, x, noise(k, d)).next;
  }

  ChainRecord rec;
  rec.states.resize(d, static_cast<Eigen::Index>(steps + 1));
  rec.proposals.resize(d, static_cast<Eigen::Index>(steps));
  rec.accepted.resize(steps);
  rec.alpha_values.resize(steps);
  rec.n = n;
  rec.kernel = kernel.descriptor();
  rec.burn_in = burn_in;
  rec.states.col(0) = x;
  for (std::size_t i = 0; i < steps; ++i, ++k) {
    StepResult r = mh_step_with_noise(target, n, kernel, x, noise(k, d));
    const auto col = static_cast<Eigen::Index>(i);
    rec.proposals.col(col) = r.proposal;
    rec.accepted[i] = r.accepted ? 1 : 0;
    rec.alpha_values[i] = r.alpha;
    if (r.accepted) x = std::move(r.proposal);
    rec.states.col(col + 1) = x;
  }
  return rec;
}

ChainRecord run_chain(const TargetFamily& target, double n, const ProposalKernel& kernel,
                      const Vec& x0, std::size_t steps, std::size_t burn_in, std::uint64_t seed) {
  ChainRecord rec = run_chain(target, n, kernel, x0, steps, burn_in, seeded_noise(seed));
  rec.seed = seed;
  return rec;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ChainRecord> run_replicas(const TargetFamily& target, double n,
                                      const ProposalKernel& kernel, const Vec& x0,
                                      std::size_t steps, std::size_t burn_in,
                                      const std::vector<std::uint64_t>& seeds, unsigned threads) {
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigurationError("replica seeds must be distinct");
  }
  std::vector<ChainRecord> out(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) { out[i] = run_chain(target, n, kernel, x0, steps, burn_in, seeds[i]); },
      threads);
  return out;
}

}  // namespace hmh
