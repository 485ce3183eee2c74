#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hessmh/experiments.hpp"
#include "oracles.hpp"

using namespace hmh;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run cli(const std::string& args) {
  const std::string cmd = std::string(HESSMH_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

ExperimentConfig small_config(const std::string& model, const std::string& proposal, double s) {
  ExperimentConfig c;
  c.model = model;
  c.n_grid = {1.0, 100.0};
  c.proposal_variants = {proposal};
  c.proposal_steps = {s};
  c.steps = 20000;
  c.seeds = {1, 2, 3, 4};
  c.reference_budget = 100000;
  return c;
}

double cell(const CsvTable& t, std::size_t row, const std::string& col) {
  return parse_double(t.rows[row][t.column(col)]);
}

}  // namespace

TEST_SUITE("cli_experiments") {

TEST_CASE("config file parsing and flag override") {
  std::istringstream in(
      "# comment line\n"
      "model = cubic_1d\n"
      "n-grid = 1, 10,100   # trailing comment\n"
      "proposal = hessian-rw,modified-pcn\n"
      "step = 1,0.6\n"
      "seeds = 3-5\n"
      "directions = 1;2\n"
      "format = json\n");
  ExperimentConfig c = load_config(in);
  CHECK(c.model == "cubic_1d");
  CHECK(c.n_grid == std::vector<double>{1.0, 10.0, 100.0});
  REQUIRE(c.proposals().size() == 2);
  CHECK(c.proposals()[1].variant == "modified-pcn");
  CHECK(c.proposals()[1].step == 0.6);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(c.directions.size() == 2);
  CHECK(c.format == "json");
  CHECK_NOTHROW(validate(c));

  apply_setting(c, "n-grid", "10,1000");
  apply_setting(c, "seeds", "9");
  CHECK(c.n_grid == std::vector<double>{10.0, 1000.0});
  CHECK(c.seeds == std::vector<std::uint64_t>{9});
  CHECK(c.model == "cubic_1d");
}

TEST_CASE("malformed settings are configuration errors") {
  ExperimentConfig c;
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigurationError);
  CHECK_THROWS_AS(apply_setting(c, "steps", "ten"), ConfigurationError);
  CHECK_THROWS_AS(apply_setting(c, "n-grid", "1,x"), ConfigurationError);
  std::istringstream bad("model cubic_1d\n");
  CHECK_THROWS_AS(load_config(bad), ConfigurationError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/cfg.txt"), ConfigurationError);
}

TEST_CASE("validation") {
  const auto invalid = [](const std::function<void(ExperimentConfig&)>& edit) {
    ExperimentConfig c;
    edit(c);
    CHECK_THROWS_AS(validate(c), ConfigurationError);
  };
  CHECK_NOTHROW(validate(ExperimentConfig{}));
  invalid([](auto& c) { c.n_grid.clear(); });
  invalid([](auto& c) { c.n_grid = {10.0, 1.0}; });
  invalid([](auto& c) { c.n_grid = {0.0, 1.0}; });
  invalid([](auto& c) { c.model = "nope"; });
  invalid([](auto& c) { c.proposal_variants = {"pcn"}, c.proposal_steps = {1.5}; });
  invalid([](auto& c) { c.proposal_variants = {"rw"}, c.proposal_steps = {0.0}; });
  invalid([](auto& c) { c.proposal_variants = {"gibbs"}; });
  invalid([](auto& c) { c.seeds = {1, 1}; });
  invalid([](auto& c) { c.seeds.clear(); });
  invalid([](auto& c) { c.steps = 0; });
  invalid([](auto& c) { c.format = "xml"; });
  invalid([](auto& c) { c.directions = {Vec::Zero(2)}; });
}

TEST_CASE("describe records the resolved config") {
  ExperimentConfig c;
  c.seeds = {4, 8, 15};
  const auto lines = describe(c);
  CHECK(std::find(lines.begin(), lines.end(), "seeds = 4,8,15") != lines.end());
  CHECK(std::find(lines.begin(), lines.end(), "model = gauss_ridge") != lines.end());
  CHECK(std::find(lines.begin(), lines.end(), "n-grid = 1,10,100,1000,10000") != lines.end());
}

TEST_CASE("numbers and tables round-trip through CSV") {
  CounterRng rng(stream_key(6, 0, 0));
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double(format_double(-HUGE_VAL)) == -HUGE_VAL);
  CHECK_THROWS_AS(parse_double("1.5abc"), ConfigurationError);

  CsvTable t;
  t.comments = {"model = x"};
  t.header = {"a", "b", "c"};
  t.rows = {{"1", "has,comma", "has \"quote\""}, {"0.1", "", "line\nbreak"}};
  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  CHECK(back.comments == t.comments);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK_THROWS_AS(back.column("d"), ConfigurationError);
}

TEST_CASE("sweep with modified pCN on the ridge") {
  ExperimentConfig c = small_config("gauss_ridge", "modified-pcn", 0.6);
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(std::abs(r.abar.value - 1.0) <= 1e-12);
    CHECK(std::abs(r.rhobar.value - 0.4) <= 3.0 * r.rhobar.se);
    CHECK(r.variance.provenance == VarianceProvenance::exact);
    CHECK(check::rel(r.ref_rhobar.value, 0.4, 1e-15));
  }
  const CsvTable t = sweep_table(c, rows);
  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(cell(back, i, "rhobar") == rows[i].rhobar.value);
  }
  CHECK(std::find(t.comments.begin(), t.comments.end(), "seeds = 1,2,3,4") != t.comments.end());
}

TEST_CASE("sweep with the isotropic random walk at step s/n") {
  ExperimentConfig c = small_config("gauss_ridge", "isotropic-rw-scaled", 1.0);
  c.n_grid = {1.0, 10.0, 100.0};
  c.directions = {Vec::Unit(2, 0)};
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].rhobar.value < rows[0].rhobar.value);
  CHECK(rows[2].rhobar.value < rows[1].rhobar.value);
  CHECK(rows[2].rhobar.value / rows[0].rhobar.value <= 0.05);
  for (const auto& r : rows) CHECK(r.abar.value >= 0.1);
}

TEST_CASE("sweep on a non-Gaussian model notes the burn-in bias") {
  ExperimentConfig c = small_config("cubic_1d", "hessian-rw", 1.0);
  c.n_grid = {100.0};
  c.steps = 5000;
  const CsvTable t = sweep_table(c, run_sweep(c));
  bool noted = false;
  for (const auto& line : t.comments) noted = noted || line.find("bias") != std::string::npos;
  CHECK(noted);
  CHECK(t.rows.size() == 1);
}

TEST_CASE("rate study tables") {
  ExperimentConfig c;
  c.model = "gauss_1d";
  const RateStudy s = run_rate_study(c);
  for (const auto& r : s.rows) {
    CHECK(r.hellinger <= 1e-8);
    CHECK(r.tv <= 1e-8);
  }
  const CsvTable t = rate_table(c, s);
  CHECK(t.header == std::vector<std::string>{"model", "n", "hellinger", "tv", "nodes_per_axis"});
  CHECK(t.rows.size() == c.n_grid.size() + 1);
  CHECK(t.rows.back()[1] == "slope");

  c.model = "bimodal_1d";
  CHECK_THROWS_AS(run_rate_study(c), ConfigurationError);
}

TEST_CASE("map table") {
  ExperimentConfig c;
  c.model = "gauss_ridge";
  c.n_grid = {1.0, 100.0};
  const CsvTable t = map_table(c);
  REQUIRE(t.rows.size() == 2);
  CHECK(cell(t, 1, "iterations") >= 0.0);
  std::vector<double> cov;
  std::stringstream ss(t.rows[1][t.column("C_n")]);
  for (std::string tok; std::getline(ss, tok, ';');) cov.push_back(std::stod(tok));
  REQUIRE(cov.size() == 4);
  CHECK(check::rel(cov[0], 1.0, 1e-12));
  CHECK(cov[1] == 0.0);
  CHECK(cov[2] == 0.0);
  CHECK(check::rel(cov[3], 1.0 / 101.0, 1e-12));
}

TEST_CASE("pushforward report is deterministic") {
  ExperimentConfig c;
  const std::string a = pushforward_report(c, run_pushforward_fuzz(c.fuzz_cases, c.fuzz_seed));
  const std::string b = pushforward_report(c, run_pushforward_fuzz(c.fuzz_cases, c.fuzz_seed));
  CHECK(a == b);
  CHECK(a.find("\"passed\": true") != std::string::npos);
  CHECK(a.find("\"cases\": 200") != std::string::npos);
}

TEST_CASE("catalog flags agree with the models") {
  for (const auto& m : model_catalog()) {
    CAPTURE(m.name);
    const double n = 1e4;
    const LaplaceApproximation la = laplace_approximation(m.target, n, m.map_start);
    CHECK((la.map_point - m.flags.x_star).norm() <= 1e-3);
    const LimitHessian lh = limit_hessian(m.target, m.flags.x_star);
    CHECK(lh.positive_semidefinite);
    // A singular limit Hessian is exactly the informed-subspace case.
    CHECK(lh.positive_definite == !m.flags.informed_subspace);
    CHECK(static_cast<int>(m.flags.informed_directions.size()) == m.dim - lh.null_space.cols());
    if (m.flags.gaussian_exact) {
      const PosteriorMoments pm = posterior_moments(m.target, 10.0, laplace_approximation(m.target, 10.0, m.map_start));
      const LaplaceApproximation l10 = laplace_approximation(m.target, 10.0, m.map_start);
      CHECK((pm.covariance - l10.covariance.matrix()).norm() <= 1e-10);
    }
  }
  CHECK_THROWS_AS(find_model("missing"), ConfigurationError);
}

TEST_CASE("command line exit codes") {
  CHECK(cli("").code == 2);
  CHECK(cli("sweep --n-grid ''").code == 2);
  CHECK(cli("sweep --model nope").code == 2);
  CHECK(cli("sweep --format xml").code == 2);
  CHECK(cli("rate-study --model bimodal_1d").code == 2);

  const Run map = cli("map --model gauss_1d --n-grid 1,4");
  CHECK(map.code == 0);
  std::istringstream is(map.out);
  const CsvTable t = read_csv(is);
  REQUIRE(t.rows.size() == 2);
  CHECK(check::rel(parse_double(t.rows[1][t.column("C_n")]), 0.2, 1e-14));

  const Run a = cli("pushforward-check --fuzz-cases 50");
  const Run b = cli("pushforward-check --fuzz-cases 50");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"cases\": 50") != std::string::npos);
}

TEST_CASE("flags override the config file") {
  const std::string path = "cli_test_config.txt";
  {
    std::ofstream f(path);
    f << "model = gauss_ridge\nn-grid = 1,10\n";
  }
  const Run r = cli("map --config " + path + " --n-grid 3");
  CHECK(r.code == 0);
  std::istringstream is(r.out);
  const CsvTable t = read_csv(is);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.column("n")] == "3");
  std::remove(path.c_str());
}

}  // TEST_SUITE
