#include "hessmh/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hmh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos, 0);
  } catch (const std::exception&) {
    throw ConfigurationError("not an unsigned integer: '" + s + "'");
  }
  if (pos != s.size() || s.front() == '-') {
    throw ConfigurationError("not an unsigned integer: '" + s + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_double(t));
  return out;
}

// "1,2,5" or "1-8" (inclusive) or a mix.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& t : split(s, ',')) {
    const auto dash = t.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_u64(t));
      continue;
    }
    const std::uint64_t a = parse_u64(trim(t.substr(0, dash)));
    const std::uint64_t b = parse_u64(trim(t.substr(dash + 1)));
    if (b < a) throw ConfigurationError("descending seed range '" + t + "'");
    for (std::uint64_t k = a; k <= b; ++k) out.push_back(k);
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigurationError("not a boolean: '" + s + "'");
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_vec(const Vec& v, const std::string& sep = ";") {
  std::vector<std::string> p;
  for (Eigen::Index i = 0; i < v.size(); ++i) p.push_back(format_double(v[i]));
  return join(p, sep);
}

std::string join_mat(const Mat& m) {
  std::vector<std::string> p;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) p.push_back(format_double(m(i, j)));
  return join(p, ";");
}

const std::set<std::string> kVariants{"rw", "pcn", "hessian-rw", "modified-pcn",
                                      "isotropic-rw-scaled"};

}  // namespace

std::vector<ProposalSpec> ExperimentConfig::proposals() const {
  if (!proposal_steps.empty() && proposal_steps.size() != 1 &&
      proposal_steps.size() != proposal_variants.size()) {
    throw ConfigurationError("give one step size per proposal or a single shared one");
  }
  std::vector<ProposalSpec> out;
  for (std::size_t i = 0; i < proposal_variants.size(); ++i) {
    double s = 1.0;
    if (proposal_steps.size() == 1) s = proposal_steps[0];
    else if (!proposal_steps.empty()) s = proposal_steps[i];
    out.push_back({proposal_variants[i], s});
  }
  return out;
}

std::vector<Vec> ExperimentConfig::resolved_directions(int dim) const {
  if (directions.empty()) {
    std::vector<Vec> out;
    for (int i = 0; i < dim; ++i) out.push_back(Vec::Unit(dim, i));
    return out;
  }
  for (const auto& v : directions) {
    if (v.size() != dim) throw ConfigurationError("direction dimension does not match the model");
  }
  return directions;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "model") {
    cfg.model = value;
  } else if (key == "n-grid") {
    cfg.n_grid = parse_doubles(value);
  } else if (key == "proposal") {
    cfg.proposal_variants = split(value, ',');
  } else if (key == "step") {
    cfg.proposal_steps = parse_doubles(value);
  } else if (key == "steps") {
    cfg.steps = parse_u64(value);
  } else if (key == "burn-in") {
    cfg.burn_in = parse_u64(value);
  } else if (key == "seeds") {
    cfg.seeds = parse_seeds(value);
  } else if (key == "directions") {
    cfg.directions.clear();
    for (const auto& part : split(value, ';')) {
      const auto comps = parse_doubles(part);
      cfg.directions.push_back(Eigen::Map<const Vec>(comps.data(), static_cast<Eigen::Index>(comps.size())));
    }
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "reference-budget") {
    cfg.reference_budget = parse_u64(value);
  } else if (key == "reference-seed") {
    cfg.reference_seed = parse_u64(value);
  } else if (key == "fuzz-cases") {
    cfg.fuzz_cases = static_cast<int>(parse_u64(value));
  } else if (key == "fuzz-seed") {
    cfg.fuzz_seed = parse_u64(value);
  } else if (key == "tv") {
    cfg.with_tv = parse_bool(value);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(parse_u64(value));
  } else {
    throw ConfigurationError("unknown setting '" + key + "'");
  }
}

ExperimentConfig load_config(std::istream& is, ExperimentConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(lineno) + " lacks '='");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  return load_config(in, std::move(base));
}

void validate(const ExperimentConfig& cfg) {
  const ModelCatalogEntry& model = find_model(cfg.model);
  if (cfg.n_grid.empty()) throw ConfigurationError("n grid is empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (!(cfg.n_grid[i] > 0.0) || !std::isfinite(cfg.n_grid[i])) {
      throw ConfigurationError("n grid entries must be positive");
    }
    if (i > 0 && !(cfg.n_grid[i] > cfg.n_grid[i - 1])) {
      throw ConfigurationError("n grid must be strictly increasing");
    }
  }
  if (cfg.proposal_variants.empty()) throw ConfigurationError("no proposal given");
  for (const auto& p : cfg.proposals()) {
    if (!kVariants.count(p.variant)) {
      throw ConfigurationError("unknown proposal '" + p.variant + "'");
    }
    const bool unit = p.variant == "pcn" || p.variant == "modified-pcn";
    if (!(p.step > 0.0) || !std::isfinite(p.step) || (unit && p.step > 1.0)) {
      throw ConfigurationError("step size out of range for " + p.variant);
    }
  }
  if (cfg.steps < 1) throw ConfigurationError("steps must be at least 1");
  if (cfg.seeds.empty()) throw ConfigurationError("no replica seeds given");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    throw ConfigurationError("replica seeds must be distinct");
  }
  for (const auto& v : cfg.resolved_directions(model.dim)) {
    if (!(v.norm() > 0.0)) throw ConfigurationError("directions must be nonzero");
  }
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigurationError("format must be csv or json");
  }
  if (cfg.fuzz_cases < 1) throw ConfigurationError("fuzz-cases must be positive");
}

std::vector<std::string> describe(const ExperimentConfig& cfg) {
  std::vector<std::string> ns, seeds, steps, dirs;
  for (double n : cfg.n_grid) ns.push_back(format_double(n));
  for (auto s : cfg.seeds) seeds.push_back(std::to_string(s));
  for (const auto& p : cfg.proposals()) steps.push_back(format_double(p.step));
  for (const auto& v : cfg.directions) dirs.push_back(join_vec(v, ","));
  return {
      "model = " + cfg.model,
      "n-grid = " + join(ns, ","),
      "proposal = " + join(cfg.proposal_variants, ","),
      "step = " + join(steps, ","),
      "steps = " + std::to_string(cfg.steps),
      "burn-in = " + std::to_string(cfg.burn_in),
      "seeds = " + join(seeds, ","),
      "directions = " + (dirs.empty() ? std::string("unit-basis") : join(dirs, ";")),
      "format = " + cfg.format,
      "reference-budget = " + std::to_string(cfg.reference_budget),
      "reference-seed = " + std::to_string(cfg.reference_seed),
      "fuzz-cases = " + std::to_string(cfg.fuzz_cases),
      "fuzz-seed = " + std::to_string(cfg.fuzz_seed),
      "tv = " + std::string(cfg.with_tv ? "true" : "false"),
  };
}

ProposalKernel make_kernel(const ProposalSpec& spec, const LaplaceApproximation& la, double n) {
  const int d = la.dim();
  if (spec.variant == "rw") return ProposalKernel::random_walk(SpdMatrix::identity(d), spec.step);
  if (spec.variant == "pcn") return ProposalKernel::pcn(SpdMatrix::identity(d), spec.step);
  if (spec.variant == "hessian-rw") return ProposalKernel::hessian_rw(la, spec.step);
  if (spec.variant == "modified-pcn") return ProposalKernel::modified_pcn(la, spec.step);
  if (spec.variant == "isotropic-rw-scaled") {
    return ProposalKernel::random_walk(SpdMatrix::identity(d), spec.step / n);
  }
  throw ConfigurationError("unknown proposal '" + spec.variant + "'");
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelCatalogEntry& model = find_model(cfg.model);
  const auto dirs = cfg.resolved_directions(model.dim);
  std::vector<SweepRow> rows;
  for (const auto& spec : cfg.proposals()) {
    Estimate ref_a{std::nan(""), std::nan("")}, ref_r{std::nan(""), std::nan("")};
    if (spec.variant == "hessian-rw") {
      const GaussianReference g =
          gaussian_reference(model.dim, spec.step, cfg.reference_budget, cfg.reference_seed);
      ref_a = g.alpha;
      ref_r = g.esjd;
    } else if (spec.variant == "modified-pcn") {
      ref_a = {1.0, 0.0};
      ref_r = {modified_pcn_reference_esjd(spec.step), 0.0};
    }
    for (double n : cfg.n_grid) {
      try {
        const LaplaceApproximation la = laplace_approximation(model.target, n, model.map_start);
        const ProposalKernel kernel = make_kernel(spec, la, n);
        const auto records = run_replicas(model.target, n, kernel, la.map_point, cfg.steps,
                                          cfg.burn_in, cfg.seeds, cfg.threads);
        std::vector<VarianceEstimate> vars;
        for (const auto& v : dirs) {
          vars.push_back(
              target_variance(model.target, n, v, la, model.flags.gaussian_exact, &records));
        }
        const EfficiencyReport rep = efficiency_report(records, dirs, vars);
        for (std::size_t j = 0; j < dirs.size(); ++j) {
          SweepRow r;
          r.n = n;
          r.proposal = spec;
          r.direction = static_cast<int>(j);
          r.v = dirs[j];
          r.abar = rep.abar;
          r.accept_freq = rep.acceptance_frequency;
          r.rho = rep.directions[j].rho;
          r.rhobar = rep.directions[j].rhobar;
          r.tau = rep.directions[j].tau;
          r.variance = rep.directions[j].variance;
          r.ref_abar = ref_a;
          r.ref_rhobar = ref_r;
          rows.push_back(std::move(r));
        }
      } catch (const ConfigurationError&) {
        throw;
      } catch (const Error& e) {
        SweepRow r;
        r.n = n;
        r.proposal = spec;
        r.direction = -1;
        r.v = Vec::Zero(model.dim);
        r.ref_abar = ref_a;
        r.ref_rhobar = ref_r;
        r.error = e.what();
        const double nan = std::nan("");
        r.abar = r.accept_freq = r.rho = r.rhobar = {nan, nan};
        r.tau = {nan, 0};
        r.variance = {nan, VarianceProvenance::sample, {}};
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

CsvTable sweep_table(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  CsvTable t;
  t.comments = describe(cfg);
  t.header = {"model",      "n",          "proposal",     "step",           "direction",
              "v",          "abar",       "abar_se",      "accept_freq",    "accept_freq_se",
              "rho",        "rho_se",     "rhobar",       "rhobar_se",      "tau",
              "tau_window", "variance",   "variance_source", "ref_abar",  "ref_abar_se",
              "ref_rhobar", "ref_rhobar_se", "warning",    "error"};
  for (const auto& r : rows) {
    t.rows.push_back({cfg.model, format_double(r.n), r.proposal.variant,
                      format_double(r.proposal.step), std::to_string(r.direction), join_vec(r.v),
                      format_double(r.abar.value), format_double(r.abar.se),
                      format_double(r.accept_freq.value), format_double(r.accept_freq.se),
                      format_double(r.rho.value), format_double(r.rho.se),
                      format_double(r.rhobar.value), format_double(r.rhobar.se),
                      format_double(r.tau.tau), std::to_string(r.tau.window),
                      format_double(r.variance.value),
                      r.error.empty() ? to_string(r.variance.provenance) : "none",
                      format_double(r.ref_abar.value), format_double(r.ref_abar.se),
                      format_double(r.ref_rhobar.value), format_double(r.ref_rhobar.se),
                      r.variance.warning, r.error});
  }
  if (!find_model(cfg.model).flags.gaussian_exact) {
    t.comments.push_back(
        "note = chains start at the MAP point with burn-in; residual non-stationarity bias is "
        "not corrected");
  }
  return t;
}

RateStudy run_rate_study(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelCatalogEntry& model = find_model(cfg.model);
  if (!model.flags.hellinger_rate) {
    throw ConfigurationError("model '" + cfg.model + "' is not flagged for the Hellinger rate");
  }
  if (model.dim > kMaxQuadratureDim) {
    throw ConfigurationError("rate study needs dimension at most 3");
  }
  return hellinger_rate_study(model.target, cfg.n_grid, model.map_start, cfg.with_tv);
}

CsvTable rate_table(const ExperimentConfig& cfg, const RateStudy& study) {
  CsvTable t;
  t.comments = describe(cfg);
  t.header = {"model", "n", "hellinger", "tv", "nodes_per_axis"};
  for (const auto& r : study.rows) {
    t.rows.push_back({cfg.model, format_double(r.n), format_double(r.hellinger),
                      format_double(r.tv), std::to_string(r.nodes_per_axis)});
  }
  t.rows.push_back({cfg.model, "slope", format_double(study.hellinger_slope),
                    format_double(study.tv_slope), ""});
  return t;
}

CsvTable map_table(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelCatalogEntry& model = find_model(cfg.model);
  const auto dirs = cfg.resolved_directions(model.dim);
  CsvTable t;
  t.comments = describe(cfg);
  t.header = {"model", "n", "x_n", "H_n", "C_n", "iterations", "grad_norm", "n_vCv"};
  for (double n : cfg.n_grid) {
    const LaplaceApproximation la = laplace_approximation(model.target, n, model.map_start);
    std::vector<std::string> scaled;
    for (const auto& v : dirs) {
      scaled.push_back(format_double(n * v.dot(la.covariance.matrix() * v)));
    }
    t.rows.push_back({cfg.model, format_double(n), join_vec(la.map_point),
                      join_mat(la.precision_core.matrix()), join_mat(la.covariance.matrix()),
                      std::to_string(la.trace.iterations), format_double(la.trace.grad_norm),
                      join(scaled, ";")});
  }
  return t;
}

std::string pushforward_report(const ExperimentConfig& cfg, const FuzzSummary& s) {
  nlohmann::ordered_json j;
  j["config"] = describe(cfg);
  j["cases"] = s.cases;
  j["seed"] = s.seed;
  j["bijective_cases"] = s.bijective_cases;
  j["tolerance"] = kFiniteTolerance;
  j["max_reversibility_residual"] = s.max_reversibility_residual;
  j["max_gap_violation"] = s.max_gap_violation;
  j["max_gap_equality_residual"] = s.max_gap_equality_residual;
  j["max_coincidence_residual"] = s.max_coincidence_residual;
  j["max_cheeger_slack"] = s.max_cheeger_slack;
  j["max_acceptance_slack"] = s.max_acceptance_slack;
  j["passed"] = s.passed();
  auto fails = nlohmann::ordered_json::array();
  for (const auto& f : s.failures) {
    fails.push_back({{"index", f.index},
                     {"states", f.states},
                     {"codomain", f.codomain},
                     {"bijective", f.bijective},
                     {"reversibility_residual", f.reversibility_residual},
                     {"gap_violation", f.gap_violation},
                     {"gap_equality_residual", f.gap_equality_residual},
                     {"coincidence_residual", f.coincidence_residual},
                     {"cheeger_slack", f.cheeger_slack},
                     {"acceptance_slack", f.acceptance_slack}});
  }
  j["failures"] = fails;
  return j.dump(2) + "\n";
}

std::string table_to_json(const ExperimentConfig& cfg, const CsvTable& table) {
  nlohmann::ordered_json j;
  j["config"] = describe(cfg);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      const std::string& cell = r[i];
      try {
        const double v = parse_double(cell);
        if (std::isfinite(v)) o[table.header[i]] = v;
        else o[table.header[i]] = cell;
      } catch (const ConfigurationError&) {
        o[table.header[i]] = cell;
      }
    }
    rows.push_back(std::move(o));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace hmh
