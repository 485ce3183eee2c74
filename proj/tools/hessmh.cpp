#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hessmh/experiments.hpp"

namespace {

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw hmh::ConfigurationError("cannot open output file '" + path + "'");
    os = &file;
  }
};

void emit_table(const hmh::ExperimentConfig& cfg, const hmh::CsvTable& t) {
  Output out(cfg.out);
  if (cfg.format == "json") *out.os << hmh::table_to_json(cfg, t);
  else hmh::write_csv(*out.os, t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hessian-preconditioned Metropolis-Hastings experiments"};
  app.require_subcommand(1);

  std::string config_path;
  // Raw flag values, applied on top of the config file.
  std::map<std::string, std::string> flags;
  const std::vector<std::pair<std::string, std::string>> flag_specs = {
      {"model", "catalog model name"},
      {"n-grid", "comma-separated concentration values, strictly increasing"},
      {"proposal", "comma list of rw, pcn, hessian-rw, modified-pcn, isotropic-rw-scaled"},
      {"step", "step size, one shared or one per proposal"},
      {"steps", "chain length after burn-in"},
      {"burn-in", "discarded initial steps"},
      {"seeds", "replica seeds, e.g. 1,2,3 or 1-8"},
      {"directions", "directions as 'a,b;c,d' (default: unit basis)"},
      {"out", "output path (default: stdout)"},
      {"format", "csv or json"},
      {"reference-budget", "Monte Carlo budget for the Gaussian reference"},
      {"fuzz-cases", "number of random finite chains"},
      {"fuzz-seed", "seed of the finite-chain fuzz"},
      {"threads", "worker threads (0: hardware concurrency)"},
      {"tv", "also compute total variation (true/false)"},
  };

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    for (const auto& [name, help] : flag_specs) {
      auto* opt = sub->add_option("--" + name, flags[name], help);
      if (name == "format") opt->check(CLI::IsMember({"csv", "json"}));
    }
  };

  auto* sweep = app.add_subcommand("sweep", "acceptance, jump distance and IACT across n");
  auto* rate = app.add_subcommand("rate-study", "Hellinger and TV distance to the Laplace approximation");
  auto* fuzz = app.add_subcommand("pushforward-check", "finite-chain pushforward fuzz");
  auto* map = app.add_subcommand("map", "MAP point, Hessian and covariance per n");
  for (auto* s : {sweep, rate, fuzz, map}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    hmh::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = hmh::load_config_file(config_path);
    CLI::App* active = app.get_subcommands().front();
    for (const auto& [name, help] : flag_specs) {
      if (active->count("--" + name) > 0) hmh::apply_setting(cfg, name, flags[name]);
    }

    if (sweep->parsed()) {
      const auto rows = hmh::run_sweep(cfg);
      emit_table(cfg, hmh::sweep_table(cfg, rows));
      for (const auto& r : rows) {
        if (!r.error.empty()) return 1;
      }
      return 0;
    }
    if (rate->parsed()) {
      emit_table(cfg, hmh::rate_table(cfg, hmh::run_rate_study(cfg)));
      return 0;
    }
    if (map->parsed()) {
      emit_table(cfg, hmh::map_table(cfg));
      return 0;
    }
    if (fuzz->parsed()) {
      if (cfg.fuzz_cases < 1) throw hmh::ConfigurationError("fuzz-cases must be positive");
      const auto summary = hmh::run_pushforward_fuzz(cfg.fuzz_cases, cfg.fuzz_seed);
      Output out(cfg.out);
      *out.os << hmh::pushforward_report(cfg, summary);
      return summary.passed() ? 0 : 1;
    }
  } catch (const hmh::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
