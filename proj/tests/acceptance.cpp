// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hessmh/catalog.hpp"
#include "hessmh/diagnostics.hpp"
#include "hessmh/distances.hpp"
#include "hessmh/experiments.hpp"
#include "hessmh/pushforward.hpp"

using namespace hmh;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[violated] ";
    }
    detail += what + "; ";
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5, 6, 7, 8};

struct Runs {
  LaplaceApproximation la;
  std::vector<ChainRecord> records;
};

Runs run(const char* model, double n, const ProposalSpec& spec, std::size_t steps,
         const std::vector<std::uint64_t>& seeds) {
  const auto& m = find_model(model);
  LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
  const ProposalKernel k = make_kernel(spec, la, n);
  auto recs = run_replicas(m.target, n, k, la.map_point, steps, kDefaultBurnIn, seeds);
  return {std::move(la), std::move(recs)};
}

Estimate pooled(const std::vector<ChainRecord>& recs,
                const std::function<Estimate(const ChainRecord&)>& f) {
  std::vector<Estimate> parts;
  for (const auto& r : recs) parts.push_back(f(r));
  return pool(parts);
}

Estimate rhobar(const std::vector<ChainRecord>& recs, const Vec& v, double var) {
  return pooled(recs, [&](const ChainRecord& c) { return normalized_esjd(c, v, var); });
}

double max_pairwise(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = find_model("gauss_ridge");
  const double target = modified_pcn_reference_esjd(0.6);
  for (double n : {1.0, 1e2, 1e4}) {
    const Runs r = run("gauss_ridge", n, {"modified-pcn", 0.6}, 100000, {1, 2, 3, 4});
    std::size_t rejected = 0;
    for (const auto& rec : r.records)
      for (auto a : rec.accepted) rejected += a ? 0 : 1;
    const Estimate abar = pooled(r.records, average_acceptance);
    o.require(rejected == 0, fmt("n=%g rejections=%g", n, double(rejected)));
    o.require(abar.value == 1.0, fmt("n=%g |abar-1|=%.2e", n, std::abs(abar.value - 1.0)));
    for (int i = 0; i < 2; ++i) {
      const Vec v = Vec::Unit(2, i);
      const double var = target_variance(m.target, n, v, r.la, true).value;
      const Estimate e = rhobar(r.records, v, var);
      o.require(std::abs(e.value - target) <= 3.0 * e.se,
                fmt("n=%g rhobar=%.5f se=%.5f", n, e.value, e.se));
    }
  }
  const double dt = seconds_since(t0);
  o.require(dt < 30.0, fmt("runtime %.1fs < 30s", dt));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = find_model("gauss_ridge");
  const GaussianReference ref = gaussian_reference(2, 1.0, 10000000);
  std::vector<double> abars;
  std::vector<std::vector<double>> rbs(2);
  for (double n : {1.0, 1e2, 1e4}) {
    const Runs r = run("gauss_ridge", n, {"hessian-rw", 1.0}, 100000, kSeeds);
    const Estimate abar = pooled(r.records, average_acceptance);
    abars.push_back(abar.value);
    o.require(std::abs(abar.value - ref.alpha.value) <= 3.0 * std::hypot(abar.se, ref.alpha.se),
              fmt("n=%g abar=%.5f ref=%.5f", n, abar.value, ref.alpha.value));
    for (int i = 0; i < 2; ++i) {
      const Vec v = Vec::Unit(2, i);
      const double var = target_variance(m.target, n, v, r.la, true).value;
      const Estimate e = rhobar(r.records, v, var);
      rbs[i].push_back(e.value);
      o.require(std::abs(e.value - ref.esjd.value) <= 3.0 * std::hypot(e.se, ref.esjd.se),
                fmt("n=%g rhobar_e%g=%.5f", n, i + 1.0, e.value) + fmt(" ref=%.5f", ref.esjd.value));
    }
  }
  o.require(max_pairwise(abars) <= 0.02, fmt("abar spread %.4f", max_pairwise(abars)));
  for (int i = 0; i < 2; ++i)
    o.require(max_pairwise(rbs[i]) <= 0.02, fmt("rhobar_e%g spread %.4f", i + 1.0, max_pairwise(rbs[i])));
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, fmt("runtime %.1fs < 60s", dt));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = find_model("gauss_ridge");
  const Vec e1 = Vec::Unit(2, 0);
  std::vector<double> rb;
  for (double n : {1.0, 10.0, 100.0}) {
    const Runs r = run("gauss_ridge", n, {"isotropic-rw-scaled", 1.0}, 50000, {1, 2, 3, 4});
    const Estimate abar = pooled(r.records, average_acceptance);
    const double var = target_variance(m.target, n, e1, r.la, true).value;
    rb.push_back(rhobar(r.records, e1, var).value);
    o.require(abar.value >= 0.1, fmt("n=%g abar=%.4f", n, abar.value));
  }
  const double ratio = rb.back() / rb.front();
  o.require(ratio <= 0.05, fmt("rhobar ratio %.2e", ratio));
  const double dt = seconds_since(t0);
  o.require(dt < 30.0, fmt("runtime %.1fs < 30s", dt));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = find_model("cubic_1d");
  const double n = 1e4;
  const Vec v = Vec::Ones(1);
  for (const ProposalSpec& spec : {ProposalSpec{"hessian-rw", 1.0}, ProposalSpec{"modified-pcn", 0.6}}) {
    const Runs r = run("cubic_1d", n, spec, 100000, kSeeds);
    double ref_a = 1.0, ref_r = modified_pcn_reference_esjd(spec.step);
    if (spec.variant == "hessian-rw") {
      const GaussianReference g = gaussian_reference(1, spec.step, 0);
      ref_a = g.alpha.value;
      ref_r = g.esjd.value;
    }
    const Estimate abar = pooled(r.records, average_acceptance);
    const double var = target_variance(m.target, n, v, r.la, false).value;
    const Estimate e = rhobar(r.records, v, var);
    o.require(std::abs(abar.value - ref_a) <= std::max(0.02, 3.0 * abar.se),
              spec.variant + fmt(" abar=%.5f ref=%.5f", abar.value, ref_a));
    o.require(std::abs(e.value - ref_r) <= std::max(0.02, 3.0 * e.se),
              spec.variant + fmt(" rhobar=%.5f ref=%.5f", e.value, ref_r));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, fmt("runtime %.1fs < 60s", dt));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> grid{10.0, 100.0, 1000.0, 10000.0};
  for (const char* name : {"cubic_1d", "cor410_2d"}) {
    const auto& m = find_model(name);
    const RateStudy s = hellinger_rate_study(m.target, grid, m.map_start, false);
    o.require(std::abs(s.hellinger_slope + 0.5) <= 0.1,
              std::string(name) + fmt(" slope=%.4f", s.hellinger_slope));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, fmt("runtime %.1fs < 60s", dt));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto& m = find_model("cubic_1d");
  const double n = 1e4;
  const Vec v = Vec::Ones(1);
  const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
  const double var = posterior_variance(m.target, n, la, v);
  const LimitHessian h = limit_hessian(m.target, m.flags.x_star);
  const double limit = v.dot(h.matrix.ldlt().solve(v));
  const double scaled = n * var / limit;
  o.require(std::abs(scaled - 1.0) <= 0.02, fmt("n Var / vH^-1v = %.5f", scaled));
  const double ratio = var / v.dot(la.covariance.matrix() * v);
  o.require(ratio >= 0.98 && ratio <= 1.02, fmt("Var pi / Var Laplace = %.5f", ratio));
  return o;
}

// Perturbed pairs: cubic posteriors against their Laplace approximations, and
// tilted standard normals against N(0, 1).
Outcome criterion7() {
  Outcome o;
  struct Pair {
    DensitySpec p, q;
    double loc, scale;
    GaussianProposal1d prop;
  };
  std::vector<Pair> pairs;
  const auto& m = find_model("cubic_1d");
  for (double n : {1.0, 3.0, 10.0, 30.0, 100.0}) {
    const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
    const double C = la.covariance.matrix()(0, 0);
    for (double s : {0.5, 1.5})
      pairs.push_back({posterior_density(m.target, n, la), gaussian_density(la.as_gaussian()), 0.0,
                       std::sqrt(C), GaussianProposal1d{1.0, 0.0, s * s * C}});
  }
  CounterRng rng(stream_key(7, 0, 0));
  const GaussianMeasure std_normal(Vec::Zero(1), SpdMatrix::identity(1));
  while (pairs.size() < 20) {
    const double eps = 0.05 + 0.45 * rng.uniform();
    const double omega = 0.5 + 2.5 * rng.uniform();
    const double phase = 6.0 * rng.uniform();
    const double tilt = 0.6 * rng.uniform() - 0.3;
    const double s = 0.3 + 1.2 * rng.uniform();
    const bool pcn = rng.uniform() < 0.5;
    const auto log_tilted = [=](const Vec& x) {
      return -0.5 * x[0] * x[0] + eps * std::sin(omega * x[0] + phase) + tilt * x[0];
    };
    const double logz = std::log(integrate_1d(
        [&](double x) { return std::exp(log_tilted(Vec::Constant(1, x))); }, -HUGE_VAL, HUGE_VAL));
    const DensitySpec q{log_tilted, logz, std_normal};
    const GaussianProposal1d prop =
        pcn ? GaussianProposal1d{std::sqrt(1.0 - s * s * 0.25), 0.0, s * s * 0.25}
            : GaussianProposal1d{1.0, 0.0, s * s};
    pairs.push_back({gaussian_density(std_normal), q, 0.0, 1.0, prop});
  }
  double worst = -HUGE_VAL;
  for (const auto& pr : pairs) {
    const double tv = tv_distance(pr.p, pr.q);
    const auto lp = [&](double x) { return pr.p.log_density(Vec::Constant(1, x)); };
    const auto lq = [&](double x) { return pr.q.log_density(Vec::Constant(1, x)); };
    const double a = mh_metrics_1d(lp, pr.loc, pr.scale, pr.prop).abar;
    const double b = mh_metrics_1d(lq, pr.loc, pr.scale, pr.prop).abar;
    worst = std::max(worst, std::abs(a - b) - 2.0 * tv);
  }
  o.require(pairs.size() == 20, fmt("%g pairs", double(pairs.size())));
  o.require(worst <= 1e-8, fmt("max |dabar| - 2 TV = %.3e", worst));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const FuzzSummary s = run_pushforward_fuzz(200, 20240611);
  o.require(s.cases == 200, fmt("cases=%g bijective=%g", s.cases, s.bijective_cases));
  o.require(s.max_reversibility_residual <= 1e-12,
            fmt("reversibility %.2e", s.max_reversibility_residual));
  o.require(s.max_gap_violation <= 1e-12, fmt("gap violation %.2e", s.max_gap_violation));
  o.require(s.max_gap_equality_residual <= 1e-12,
            fmt("bijective gap residual %.2e", s.max_gap_equality_residual));
  o.require(s.max_coincidence_residual <= 1e-12,
            fmt("acceptance residual %.2e", s.max_coincidence_residual));
  o.require(s.max_acceptance_slack <= 0.0, fmt("gap - 2 abar slack %.3e", s.max_acceptance_slack));
  const double dt = seconds_since(t0);
  o.require(dt < 10.0, fmt("runtime %.2fs < 10s", dt));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto& m = find_model("gauss_ridge");
  const double n = 1e4;
  const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
  const std::vector<std::pair<ProposalKernel, ProposalKernel>> pairs{
      {ProposalKernel::random_walk(SpdMatrix::identity(2), 1.0), ProposalKernel::hessian_rw(la, 1.0)},
      {ProposalKernel::pcn(SpdMatrix::identity(2), 0.6), ProposalKernel::modified_pcn(la, 0.6)}};
  for (const auto& [std_k, hes_k] : pairs) {
    const CouplingReport r = coupled_affine_chain(m.target, n, std_k, hes_k, 10000, 9);
    o.require(r.max_standardized_deviation <= 1e-10,
              to_string(hes_k.variant()) + fmt(" deviation=%.2e", r.max_standardized_deviation));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::function<Outcome()>> checks{criterion1, criterion2, criterion3,
                                                     criterion4, criterion5, criterion6,
                                                     criterion7, criterion8, criterion9};
  bool all = true;
  for (int k : selected) {
    Outcome o;
    try {
      o = checks[k - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
