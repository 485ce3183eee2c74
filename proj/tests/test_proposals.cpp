#include <doctest.h>

#include <cmath>

#include "hessmh/catalog.hpp"
#include "hessmh/distances.hpp"
#include "hessmh/proposals.hpp"
#include "oracles.hpp"

using namespace hmh;

TEST_SUITE("proposals") {

TEST_CASE("zero noise and full refresh") {
  const auto& m = find_model("gauss_ridge");
  const Vec x{{0.4, -0.2}};
  const auto rw = ProposalKernel::random_walk(SpdMatrix::identity(2), 0.7);
  CHECK((rw.propose_with_noise(x, Vec::Zero(2)) - x).norm() == 0.0);

  const LaplaceApproximation la = laplace_approximation(m.target, 100.0, m.map_start);
  const auto mp = ProposalKernel::modified_pcn(la, 1.0);
  const Vec z{{0.3, 1.1}};
  const Vec expect = la.map_point + la.covariance.factor() * z;
  CHECK((mp.propose_with_noise(x, z) - expect).norm() <= 1e-15);
  CHECK((mp.propose_with_noise(Vec{{9.0, 9.0}}, z) - expect).norm() <= 1e-15);
}

TEST_CASE("hessian random walk on the ridge at n = 100") {
  const auto& m = find_model("gauss_ridge");
  const LaplaceApproximation la = laplace_approximation(m.target, 100.0, m.map_start);
  const auto k = ProposalKernel::hessian_rw(la, 1.0);
  const Vec x{{0.5, 0.01}};
  const Vec z{{-0.7, 1.3}};
  const Vec expect = x + Vec{{1.0, 1.0 / std::sqrt(101.0)}}.cwiseProduct(z);
  CHECK((k.propose_with_noise(x, z) - expect).norm() <= 1e-15);
}

TEST_CASE("acceptance ratio by hand") {
  const auto& m = find_model("gauss_1d");
  const LaplaceApproximation la = laplace_approximation(m.target, 1.0, m.map_start);
  const auto k = ProposalKernel::hessian_rw(la, 1.0);
  const double lr = log_acceptance_ratio(m.target, 1.0, k, Vec::Zero(1), Vec::Constant(1, 1.0));
  CHECK(check::rel(lr, -1.0, 1e-15));
  CHECK(check::rel(acceptance_probability(lr), 0.36787944117144233, 1e-15));
}

TEST_CASE("y = x is always accepted") {
  const auto& m = find_model("bayes_nonlin_2d");
  const LaplaceApproximation la = laplace_approximation(m.target, 50.0, m.map_start);
  const Vec x{{0.1, 0.2}};
  for (const auto& k : {ProposalKernel::random_walk(SpdMatrix::identity(2), 0.5),
                        ProposalKernel::pcn(SpdMatrix::identity(2), 0.5),
                        ProposalKernel::hessian_rw(la, 0.5), ProposalKernel::modified_pcn(la, 0.5)}) {
    CHECK(log_acceptance_ratio(m.target, 50.0, k, x, x) == 0.0);
  }
}

TEST_CASE("modified pCN on an exact Gaussian target has unit ratio") {
  const auto& m = find_model("gauss_ridge");
  CounterRng rng(stream_key(5, 0, 0));
  for (double n : {1.0, 100.0, 1e4}) {
    const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
    const auto k = ProposalKernel::modified_pcn(la, 0.6);
    for (int i = 0; i < 100; ++i) {
      const Vec x = gaussian_sample(la.as_gaussian(), rng) * 3.0;
      const Vec y = k.propose(x, rng);
      CHECK(std::abs(log_acceptance_ratio(m.target, n, k, x, y)) <= 1e-9);
    }
  }
}

TEST_CASE("log ratio is antisymmetric") {
  const auto& m = find_model("cubic_1d");
  const double n = 30.0;
  const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
  CounterRng rng(stream_key(8, 0, 0));
  for (const auto& k : {ProposalKernel::random_walk(SpdMatrix::identity(1), 0.3),
                        ProposalKernel::pcn(SpdMatrix::identity(1), 0.3),
                        ProposalKernel::hessian_rw(la, 1.2), ProposalKernel::modified_pcn(la, 0.8)}) {
    for (int i = 0; i < 50; ++i) {
      const Vec x = Vec::Constant(1, 0.4 * rng.normal());
      const Vec y = k.propose(x, rng);
      const double a = log_acceptance_ratio(m.target, n, k, x, y);
      const double b = log_acceptance_ratio(m.target, n, k, y, x);
      CHECK(std::abs(a + b) <= 1e-10 * (1.0 + std::abs(a)));
    }
  }
}

TEST_CASE("hessian random walk at n = 1 equals the plain random walk") {
  const auto& m = find_model("bayes_nonlin_2d");
  const LaplaceApproximation la = laplace_approximation(m.target, 1.0, m.map_start);
  const auto h = ProposalKernel::hessian_rw(la, 0.9);
  const auto r = ProposalKernel::random_walk(la.covariance, 0.9);
  CounterRng rng(stream_key(3, 0, 0));
  for (int i = 0; i < 20; ++i) {
    const Vec x = draw_standard_normal(2, rng);
    const Vec z = draw_standard_normal(2, rng);
    CHECK((h.propose_with_noise(x, z) - r.propose_with_noise(x, z)).norm() == 0.0);
  }
}

TEST_CASE("proposals off the support are rejected") {
  TargetFamily t;
  t.dim = 1;
  t.potential = SmoothFunction::analytic([](const Vec& x) { return 0.5 * x[0] * x[0]; },
                                         [](const Vec& x) { return Vec(x); },
                                         [](const Vec&) { return Mat::Identity(1, 1); });
  t.log_prior = SmoothFunction::zero(1);
  t.support = [](const Vec& x) { return x[0] > -1.0; };
  const auto k = ProposalKernel::random_walk(SpdMatrix::identity(1), 1.0);
  const double lr = log_acceptance_ratio(t, 1.0, k, Vec::Zero(1), Vec::Constant(1, -2.0));
  CHECK(acceptance_probability(lr) == 0.0);
  CHECK_THROWS_AS(log_acceptance_ratio(t, 1.0, k, Vec::Constant(1, -2.0), Vec::Zero(1)),
                  InvalidState);
}

TEST_CASE("step size ranges") {
  CHECK_THROWS_AS(ProposalKernel::random_walk(SpdMatrix::identity(1), 0.0), ConfigurationError);
  CHECK_THROWS_AS(ProposalKernel::pcn(SpdMatrix::identity(1), 1.5), ConfigurationError);
  const auto& m = find_model("gauss_1d");
  const LaplaceApproximation la = laplace_approximation(m.target, 1.0, m.map_start);
  CHECK_THROWS_AS(ProposalKernel::modified_pcn(la, -0.1), ConfigurationError);
  CHECK_NOTHROW(ProposalKernel::modified_pcn(la, 1.0));
}

// ∫∫ g(x) h(y) K(x, dy) π(x) dx restricted to moves, for each variant.
TEST_CASE("detailed balance by quadrature in one dimension") {
  const auto& m = find_model("cubic_1d");
  const double n = 5.0;
  const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
  const double logz = log_normalizing_constant(m.target, n, la).value;
  const auto log_pi = [&](double x) {
    return log_density_or_neg_inf(m.target, n, Vec::Constant(1, x)) - logz;
  };
  const auto g = [](double x) { return std::exp(-x * x) * (1.0 + x); };
  const auto h = [](double x) { return std::cos(3.0 * x); };
  for (const auto& k : {ProposalKernel::random_walk(SpdMatrix::identity(1), 0.4),
                        ProposalKernel::pcn(SpdMatrix::identity(1), 0.4),
                        ProposalKernel::hessian_rw(la, 1.0), ProposalKernel::modified_pcn(la, 0.7)}) {
    const double a = k.contraction(), c = k.center()[0];
    const double var = k.effective_covariance()(0, 0);
    const auto flow = [&](double x, double y) {
      const double q = oracle::normal_log_pdf(y, c + a * (x - c), var);
      const double lr = log_acceptance_ratio(m.target, n, k, Vec::Constant(1, x), Vec::Constant(1, y));
      return std::exp(log_pi(x) + q) * acceptance_probability(lr);
    };
    const double L = 3.0;
    const double lhs = oracle::simpson2([&](double x, double y) { return g(x) * h(y) * flow(x, y); },
                                        -L, L, 500);
    const double rhs = oracle::simpson2([&](double x, double y) { return h(x) * g(y) * flow(x, y); },
                                        -L, L, 500);
    CHECK(std::abs(lhs - rhs) <= 1e-6);
  }
}

}  // TEST_SUITE
