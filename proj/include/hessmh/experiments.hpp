#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hessmh/catalog.hpp"
#include "hessmh/csv.hpp"
#include "hessmh/diagnostics.hpp"
#include "hessmh/distances.hpp"
#include "hessmh/pushforward.hpp"

namespace hmh {

struct ProposalSpec {
  std::string variant;  // rw, pcn, hessian-rw, modified-pcn, isotropic-rw-scaled
  double step = 1.0;
};

struct ExperimentConfig {
  std::string model = "gauss_ridge";
  std::vector<double> n_grid{1.0, 10.0, 100.0, 1000.0, 10000.0};
  std::vector<std::string> proposal_variants{"hessian-rw"};
  std::vector<double> proposal_steps;  // one per variant, or one shared; empty means 1
  std::size_t steps = 100000;
  std::size_t burn_in = kDefaultBurnIn;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<Vec> directions;  // empty means the unit basis
  std::string out;              // empty means stdout
  std::string format = "csv";
  std::uint64_t reference_budget = 1000000;
  std::uint64_t reference_seed = 0x5eed;
  int fuzz_cases = 200;
  std::uint64_t fuzz_seed = 20240611;
  bool with_tv = true;
  unsigned threads = 0;

  std::vector<ProposalSpec> proposals() const;
  std::vector<Vec> resolved_directions(int dim) const;
};

/// Sets one key (flag name without dashes) from its textual value.
/// Throws ConfigurationError for unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// "key = value" lines; '#' starts a comment.
ExperimentConfig load_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Throws ConfigurationError when the config is unusable.
void validate(const ExperimentConfig& cfg);

/// Every resolved setting as "key = value", in a fixed order.
std::vector<std::string> describe(const ExperimentConfig& cfg);

/// Builds the kernel for a proposal spec at concentration n.
ProposalKernel make_kernel(const ProposalSpec& spec, const LaplaceApproximation& la, double n);

struct SweepRow {
  double n = 0.0;
  ProposalSpec proposal;
  int direction = 0;
  Vec v;
  Estimate abar;
  Estimate accept_freq;
  Estimate rho;
  Estimate rhobar;
  IactResult tau;
  VarianceEstimate variance;
  Estimate ref_abar{std::nan(""), std::nan("")};
  Estimate ref_rhobar{std::nan(""), std::nan("")};
  std::string error;  // nonempty when this (n, proposal) failed
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
CsvTable sweep_table(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

RateStudy run_rate_study(const ExperimentConfig& cfg);
CsvTable rate_table(const ExperimentConfig& cfg, const RateStudy& study);

CsvTable map_table(const ExperimentConfig& cfg);

/// Fuzz summary as a JSON document (stable key order and number format).
std::string pushforward_report(const ExperimentConfig& cfg, const FuzzSummary& summary);

/// Converts a table into a JSON document with the config embedded.
std::string table_to_json(const ExperimentConfig& cfg, const CsvTable& table);

}  // namespace hmh
