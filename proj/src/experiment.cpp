#include "sgdlab/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sgdlab/version.hpp"

namespace sgdlab {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Strict schema helpers
// ---------------------------------------------------------------------------

void require_object(const json& j, const std::string& path,
                    const std::vector<std::string>& allowed,
                    const std::vector<std::string>& required) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(path + "/" + item.key(), "unknown field");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) throw ConfigError(path, "missing field '" + key + "'");
  }
}

double get_number(const json& j, const std::string& path, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& j, const std::string& path, const std::string& key,
                     double fallback) {
  return j.contains(key) ? get_number(j, path, key) : fallback;
}

long get_integer(const json& j, const std::string& path, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
  return v.get<long>();
}

long get_integer_or(const json& j, const std::string& path, const std::string& key,
                    long fallback) {
  return j.contains(key) ? get_integer(j, path, key) : fallback;
}

bool get_bool_or(const json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

Vector get_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(path, "expected a non-empty array of numbers");
    v[static_cast<long>(i)] = j[i].get<double>();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Section parsers
// ---------------------------------------------------------------------------

MinimaSet parse_minima(const json& j, const std::string& path) {
  require_object(j, path, {"type", "center", "radius", "endpoints", "components"}, {"type"});
  const std::string type = get_string(j, path, "type");
  if (type == "point") {
    require_object(j, path, {"type", "center"}, {"type", "center"});
    return PointSet{get_vector(j.at("center"), path + "/center")};
  }
  if (type == "sphere") {
    require_object(j, path, {"type", "center", "radius"}, {"type", "center", "radius"});
    return SphereSet{get_vector(j.at("center"), path + "/center"), get_number(j, path, "radius")};
  }
  if (type == "segment") {
    require_object(j, path, {"type", "endpoints"}, {"type", "endpoints"});
    const auto& ends = j.at("endpoints");
    if (!ends.is_array() || ends.size() != 2)
      throw ConfigError(path + "/endpoints", "expected exactly two endpoints");
    return SegmentSet{get_vector(ends[0], path + "/endpoints/0"),
                      get_vector(ends[1], path + "/endpoints/1")};
  }
  if (type == "union") {
    require_object(j, path, {"type", "components"}, {"type", "components"});
    const auto& comps = j.at("components");
    if (!comps.is_array() || comps.empty())
      throw ConfigError(path + "/components", "expected a non-empty array");
    UnionSet u;
    for (std::size_t i = 0; i < comps.size(); ++i)
      u.components.push_back(parse_minima(comps[i], path + "/components/" + std::to_string(i)));
    return u;
  }
  throw ConfigError(path + "/type", "unknown minima type '" + type + "'");
}

Schedule parse_schedule(const json& j, const std::string& path) {
  require_object(j, path, {"type", "a", "beta"}, {"type", "a"});
  const std::string type = get_string(j, path, "type");
  try {
    if (type == "decreasing") {
      require_object(j, path, {"type", "a", "beta"}, {"type", "a", "beta"});
      return Schedule::decreasing(get_number(j, path, "a"), get_number(j, path, "beta"));
    }
    if (type == "constant") {
      require_object(j, path, {"type", "a"}, {"type", "a"});
      return Schedule::constant(get_number(j, path, "a"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + "/type", "unknown schedule type '" + type + "'");
}

NoiseModel parse_noise(const json& j, const std::string& path, int dim) {
  require_object(j, path, {"type", "sigma", "state_scaled", "offsets"}, {"type"});
  const std::string type = get_string(j, path, "type");
  NoiseModel model;
  if (type == "gaussian") {
    require_object(j, path, {"type", "sigma", "state_scaled"}, {"type", "sigma"});
    model = GaussianNoise{get_number(j, path, "sigma"), get_bool_or(j, path, "state_scaled", false)};
  } else if (type == "finite_sum") {
    require_object(j, path, {"type", "offsets"}, {"type", "offsets"});
    const auto& offs = j.at("offsets");
    if (!offs.is_array() || offs.empty())
      throw ConfigError(path + "/offsets", "expected a non-empty array");
    FiniteSumNoise fs;
    for (std::size_t i = 0; i < offs.size(); ++i)
      fs.offsets.push_back(get_vector(offs[i], path + "/offsets/" + std::to_string(i)));
    model = std::move(fs);
  } else {
    throw ConfigError(path + "/type", "unknown noise type '" + type + "'");
  }
  try {
    validate(model, dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return model;
}

struct ParsedSections {
  LandscapeSpec landscape;
  bool has_landscape = false;
  double radius = 0.0;
  long neighborhood_samples = 20000;
  bool has_neighborhood = false;
  Schedule schedule;
  bool has_schedule = false;
  json noise_json;
  bool has_noise = false;
  json sgd_json;
  bool has_sgd = false;
  json bounds_json;
  bool has_bounds = false;
  json mc_json;
  bool has_mc = false;
  json output_json;
  bool has_output = false;
};

ParsedSections parse_sections(const json& j, const std::string& path) {
  require_object(j, path,
                 {"landscape", "neighborhood", "schedule", "noise", "sgd", "bounds", "montecarlo",
                  "output"},
                 {});
  ParsedSections s;
  if (j.contains("landscape")) {
    const std::string lp = path + "/landscape";
    const auto& lj = j.at("landscape");
    require_object(lj, lp, {"family", "degree", "scale", "dimension", "minima", "validity_radius"},
                   {"family", "degree", "dimension", "minima"});
    const std::string family = get_string(lj, lp, "family");
    if (family != "power_basin")
      throw ConfigError(lp + "/family", "unknown landscape family '" + family + "'");
    s.landscape.family = LandscapeSpec::Family::kPowerBasin;
    s.landscape.degree = get_number(lj, lp, "degree");
    s.landscape.scale = get_number_or(lj, lp, "scale", 1.0);
    s.landscape.dimension = static_cast<int>(get_integer(lj, lp, "dimension"));
    s.landscape.minima = parse_minima(lj.at("minima"), lp + "/minima");
    if (lj.contains("validity_radius"))
      s.landscape.validity_radius = get_number(lj, lp, "validity_radius");
    s.has_landscape = true;
  }
  if (j.contains("neighborhood")) {
    const std::string np = path + "/neighborhood";
    const auto& nj = j.at("neighborhood");
    require_object(nj, np, {"radius", "samples"}, {"radius"});
    s.radius = get_number(nj, np, "radius");
    if (!(s.radius > 0.0)) throw ConfigError(np + "/radius", "radius must be positive");
    s.neighborhood_samples = get_integer_or(nj, np, "samples", 20000);
    s.has_neighborhood = true;
  }
  if (j.contains("schedule")) {
    s.schedule = parse_schedule(j.at("schedule"), path + "/schedule");
    s.has_schedule = true;
  }
  if (j.contains("noise")) {
    s.noise_json = j.at("noise");
    s.has_noise = true;
  }
  if (j.contains("sgd")) {
    s.sgd_json = j.at("sgd");
    s.has_sgd = true;
  }
  if (j.contains("bounds")) {
    s.bounds_json = j.at("bounds");
    s.has_bounds = true;
  }
  if (j.contains("montecarlo")) {
    s.mc_json = j.at("montecarlo");
    s.has_mc = true;
  }
  if (j.contains("output")) {
    s.output_json = j.at("output");
    s.has_output = true;
  }
  return s;
}

Experiment assemble(const json& doc, const std::string& path, const RunOptions& options,
                    bool require_sgd, std::size_t index) {
  const ParsedSections s = parse_sections(doc, path);
  if (!s.has_landscape) throw ConfigError(path, "missing section 'landscape'");
  if (!s.has_neighborhood) throw ConfigError(path, "missing section 'neighborhood'");

  Experiment exp;
  exp.config_hash = config_hash(doc);
  exp.condition_samples = s.neighborhood_samples;

  LandscapeSpec spec = s.landscape;
  if (!std::isfinite(spec.validity_radius)) spec.validity_radius = 10.0 * s.radius;
  try {
    exp.mc.sgd.landscape = make_landscape(spec);
  } catch (const std::exception& e) {
    throw ConfigError(path + "/landscape", e.what());
  }
  exp.mc.sgd.region = NeighborhoodSpec{s.radius, exp.mc.sgd.landscape.minima};
  exp.delta = 0.1 * s.radius;

  if (require_sgd) {
    if (!s.has_schedule) throw ConfigError(path, "missing section 'schedule'");
    if (!s.has_noise) throw ConfigError(path, "missing section 'noise'");
    if (!s.has_sgd) throw ConfigError(path, "missing section 'sgd'");
  }

  if (s.has_schedule) exp.mc.sgd.schedule = s.schedule;
  if (s.has_noise)
    exp.mc.sgd.noise = parse_noise(s.noise_json, path + "/noise", spec.dimension);

  if (s.has_sgd) {
    const std::string sp = path + "/sgd";
    require_object(s.sgd_json, sp, {"batch_size", "horizon", "x1", "seed"},
                   {"horizon", "x1", "seed"});
    exp.mc.sgd.batch_size = static_cast<int>(get_integer_or(s.sgd_json, sp, "batch_size", 1));
    exp.mc.sgd.horizon = get_integer(s.sgd_json, sp, "horizon");
    exp.mc.sgd.x1 = get_vector(s.sgd_json.at("x1"), sp + "/x1");
    exp.mc.sgd.seed = static_cast<std::uint64_t>(get_integer(s.sgd_json, sp, "seed"));
  }
  if (options.seed_override) exp.mc.sgd.seed = *options.seed_override;

  double given_lipschitz = 0.0;
  double given_sigma_r = -1.0;
  long estimate_samples = 2000;
  if (s.has_bounds) {
    const std::string bp = path + "/bounds";
    require_object(s.bounds_json, bp, {"lipschitz", "sigma_r", "delta", "estimate_samples"}, {});
    given_lipschitz = get_number_or(s.bounds_json, bp, "lipschitz", 0.0);
    given_sigma_r = get_number_or(s.bounds_json, bp, "sigma_r", -1.0);
    exp.delta = get_number_or(s.bounds_json, bp, "delta", exp.delta);
    estimate_samples = get_integer_or(s.bounds_json, bp, "estimate_samples", 2000);
  }

  if (s.has_mc) {
    const std::string mp = path + "/montecarlo";
    require_object(s.mc_json, mp, {"trials", "epsilon_grid", "rate_horizons", "rate_trials"}, {});
    exp.mc.trials = get_integer_or(s.mc_json, mp, "trials", 10000);
    if (s.mc_json.contains("epsilon_grid")) {
      const auto& grid = s.mc_json.at("epsilon_grid");
      if (!grid.is_array()) throw ConfigError(mp + "/epsilon_grid", "expected an array");
      for (const auto& e : grid) {
        if (!e.is_number() || !(e.get<double>() > 0.0))
          throw ConfigError(mp + "/epsilon_grid", "tolerances must be positive numbers");
        exp.mc.epsilon_grid.push_back(e.get<double>());
      }
    }
    if (s.mc_json.contains("rate_horizons")) {
      const auto& hs = s.mc_json.at("rate_horizons");
      if (!hs.is_array()) throw ConfigError(mp + "/rate_horizons", "expected an array");
      for (const auto& h : hs) {
        if (!h.is_number_integer()) throw ConfigError(mp + "/rate_horizons", "expected integers");
        exp.rate_horizons.push_back(h.get<long>());
      }
    }
    exp.rate_trials = get_integer_or(s.mc_json, mp, "rate_trials", 1000);
  }

  if (s.has_output) {
    const std::string op = path + "/output";
    require_object(s.output_json, op, {"dir", "name", "write_trajectory"}, {});
    if (s.output_json.contains("dir")) exp.out_dir = get_string(s.output_json, op, "dir");
    if (s.output_json.contains("name")) exp.name = get_string(s.output_json, op, "name");
    exp.write_trajectory = get_bool_or(s.output_json, op, "write_trajectory", false);
  }
  if (options.out_override) exp.out_dir = *options.out_override;
  if (exp.name.empty()) exp.name = "experiment" + std::to_string(index);

  exp.mc.threads = options.threads;
  exp.mc.label = exp.config_hash;

  if (require_sgd) {
    // Assemble the bound inputs; constants not supplied are estimated, the
    // Lipschitz estimate with the safety inflation.
    BoundInputs bi;
    bi.radius = s.radius;
    bi.schedule = exp.mc.sgd.schedule;
    bi.batch_size = exp.mc.sgd.batch_size;
    bi.horizon = exp.mc.sgd.horizon;
    try {
      bi.dist1 = dist_and_project(exp.mc.sgd.x1, exp.mc.sgd.landscape.minima).distance;
    } catch (const std::exception& e) {
      throw ConfigError(path + "/sgd/x1", e.what());
    }
    if (given_lipschitz > 0.0) {
      bi.lipschitz = given_lipschitz;
    } else {
      const LocalConstants lc = estimate_local_constants(
          exp.mc.sgd.landscape, exp.mc.sgd.region, exp.delta, estimate_samples, exp.mc.sgd.seed);
      bi.lipschitz = kLipschitzSafety * lc.lipschitz;
    }
    bi.sigma_r = given_sigma_r >= 0.0
                     ? given_sigma_r
                     : noise_second_moment_bound(exp.mc.sgd.noise, spec.dimension, s.radius);
    exp.mc.bound_inputs = bi;
    try {
      validate(exp.mc);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  return exp;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_header_line(const Experiment& exp) {
  std::ostringstream os;
  os << "# sgdlab " << kVersion << " config=" << exp.config_hash << " seed=" << exp.mc.sgd.seed
     << "\n";
  return os.str();
}

void write_results_csv(const std::filesystem::path& file, const Experiment& exp,
                       const std::vector<MCResult>& results, const RateFit* fit) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << csv_header_line(exp);
  os << "event,epsilon_or_horizon,empirical,ci_low,ci_high,bound,dominated\n";
  for (const auto& r : results) {
    os << r.event_name << ',';
    if (r.epsilon)
      os << fmt(*r.epsilon);
    else
      os << exp.mc.sgd.horizon;
    os << ',' << fmt(r.empirical_p) << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',';
    if (r.theoretical_bound)
      os << fmt(*r.theoretical_bound);
    else
      os << '-';
    os << ',' << to_string(r.dominated) << '\n';
  }
  if (fit != nullptr) {
    for (std::size_t i = 0; i < fit->horizons.size(); ++i)
      os << "rate_gap_mean," << fit->horizons[i] << ',' << fmt(fit->means[i]) << ",-,-,-,-\n";
    os << "rate_slope,-," << fmt(fit->slope) << ',' << fmt(fit->slope - fit->stderr_slope) << ','
       << fmt(fit->slope + fit->stderr_slope) << ",-,-\n";
  }
}

void write_trajectory_csv(const std::filesystem::path& file, const Experiment& exp,
                          const Trajectory& traj) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << csv_header_line(exp);
  os << "n,dist,gap,h,a_n,stopped_flag\n";
  for (const auto& s : traj.steps)
    os << s.n << ',' << fmt(s.dist) << ',' << fmt(s.gap) << ',' << fmt(s.h) << ',' << fmt(s.rate)
       << ',' << (s.stopped ? 1 : 0) << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

std::string config_hash(const json& doc) {
  const std::string dump = doc.dump();
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : dump) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
  return buf;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), "cannot open file");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

std::vector<Experiment> parse_experiments(const json& doc, const RunOptions& options,
                                          bool require_sgd) {
  std::vector<Experiment> experiments;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      experiments.push_back(
          assemble(doc[i], "/" + std::to_string(i), options, require_sgd, i));
  } else {
    experiments.push_back(assemble(doc, "", options, require_sgd, 0));
  }
  return experiments;
}

json to_json(const ConditionReport& report) {
  json j;
  j["kind"] = to_string(report.kind);
  j["holds"] = report.holds;
  if (report.best_constant) j["best_constant"] = *report.best_constant;
  if (report.violation_witness) {
    j["violation_witness"] = std::vector<double>(
        report.violation_witness->data(),
        report.violation_witness->data() + report.violation_witness->size());
  }
  j["n_samples"] = report.n_samples;
  j["radius"] = report.region.radius;
  return j;
}

json to_json(const HcprcReport& report) {
  json j;
  j["holds"] = report.holds;
  j["expected_codim"] = report.expected_codim;
  j["ranks"] = report.ranks;
  j["singular_values"] = report.singular_values;
  return j;
}

json to_json(const ImplicationMatrix& matrix) {
  json j;
  j["consistent"] = matrix.consistent;
  json reports = json::array();
  for (const auto& r : matrix.reports) reports.push_back(to_json(r));
  j["reports"] = reports;
  if (matrix.hcprc) j["hcprc"] = to_json(*matrix.hcprc);
  json entries = json::array();
  for (const auto& e : matrix.entries) {
    json je;
    je["premise"] = to_string(e.premise);
    je["conclusion"] = to_string(e.conclusion);
    switch (e.status) {
      case ImplicationEntry::Status::kConsistent: je["status"] = "consistent"; break;
      case ImplicationEntry::Status::kInconsistent: je["status"] = "inconsistent"; break;
      case ImplicationEntry::Status::kUnconstrained: je["status"] = "unconstrained"; break;
      case ImplicationEntry::Status::kNotApplicable: je["status"] = "not_applicable"; break;
    }
    je["premise_holds"] = e.premise_holds;
    je["conclusion_holds"] = e.conclusion_holds;
    entries.push_back(je);
  }
  j["implications"] = entries;
  return j;
}

json to_json(const MCResult& result) {
  json j;
  j["event"] = result.event_name;
  if (result.epsilon) j["epsilon"] = *result.epsilon;
  j["empirical"] = result.empirical_p;
  j["ci_low"] = result.ci_low;
  j["ci_high"] = result.ci_high;
  if (result.theoretical_bound) j["bound"] = *result.theoretical_bound;
  j["dominated"] = to_string(result.dominated);
  j["master_seed"] = result.master_seed;
  j["config"] = result.config_label;
  return j;
}

json to_json(const RateFit& fit) {
  json j;
  j["horizons"] = fit.horizons;
  j["means"] = fit.means;
  j["stayed_fraction"] = fit.stayed_fraction;
  j["slope"] = fit.slope;
  j["stderr"] = fit.stderr_slope;
  return j;
}

json to_json(const BoundReport& report) {
  json j;
  j["b_final"] = report.b_final;
  j["c_n"] = report.cn;
  j["stability_lower_bound"] = report.stability_lower_bound;
  j["vacuous"] = report.vacuous;
  return j;
}

int run_check_conditions(const std::filesystem::path& config_path, const RunOptions& options,
                         std::ostream& out) {
  std::vector<Experiment> experiments;
  try {
    experiments = parse_experiments(load_json(config_path), options, /*require_sgd=*/false);
  } catch (const ConfigError& e) {
    out << "config error at " << e.what() << "\n";
    return kExitConfigError;
  }

  bool consistent = true;
  for (const auto& exp : experiments) {
    const std::uint64_t seed = options.seed_override.value_or(exp.mc.sgd.seed);
    const ImplicationMatrix matrix = implication_matrix(
        exp.mc.sgd.landscape, exp.mc.sgd.region, exp.condition_samples, seed);
    out << exp.name << " (r=" << exp.mc.sgd.region.radius << ", samples=" << exp.condition_samples
        << ")\n";
    out << "  condition  holds  constant\n";
    for (const auto& r : matrix.reports) {
      out << "  " << std::left << std::setw(11) << to_string(r.kind) << std::setw(7)
          << (r.holds ? "yes" : "no");
      if (r.best_constant)
        out << *r.best_constant;
      else
        out << '-';
      out << "\n";
    }
    if (matrix.hcprc) {
      out << "  " << std::left << std::setw(11) << "HCPRC" << std::setw(7)
          << (matrix.hcprc->holds ? "yes" : "no") << "rank vs codim " << matrix.hcprc->expected_codim
          << "\n";
    }
    out << "  implications " << (matrix.consistent ? "consistent" : "INCONSISTENT") << "\n";
    consistent = consistent && matrix.consistent;

    try {
      std::filesystem::create_directories(exp.out_dir);
      std::ofstream os(std::filesystem::path(exp.out_dir) / (exp.name + "_conditions.json"),
                       std::ios::trunc);
      if (!os) return kExitIoError;
      json j = to_json(matrix);
      j["version"] = kVersion;
      j["config"] = exp.config_hash;
      j["seed"] = seed;
      os << j.dump(2) << "\n";
    } catch (const std::filesystem::filesystem_error&) {
      return kExitIoError;
    }
  }
  return consistent ? kExitOk : kExitDominanceFailure;
}

namespace {

// Bare bound-inputs record: used by `bounds` when the file is not a full
// experiment document.
BoundInputs parse_bound_inputs(const json& j, const std::string& path) {
  require_object(j, path,
                 {"dist1", "radius", "lipschitz", "sigma_r", "batch_size", "schedule", "horizon"},
                 {"dist1", "radius", "lipschitz", "sigma_r", "schedule"});
  BoundInputs bi;
  bi.dist1 = get_number(j, path, "dist1");
  bi.radius = get_number(j, path, "radius");
  bi.lipschitz = get_number(j, path, "lipschitz");
  bi.sigma_r = get_number(j, path, "sigma_r");
  bi.batch_size = static_cast<int>(get_integer_or(j, path, "batch_size", 1));
  bi.schedule = parse_schedule(j.at("schedule"), path + "/schedule");
  if (j.contains("horizon")) {
    const auto& h = j.at("horizon");
    if (h.is_string() && h.get<std::string>() == "inf") {
      bi.horizon.reset();
    } else if (h.is_number_integer()) {
      bi.horizon = h.get<long>();
    } else {
      throw ConfigError(path + "/horizon", "expected an integer or \"inf\"");
    }
  } else {
    bi.horizon.reset();
  }
  try {
    validate(bi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return bi;
}

void print_bound_report(const BoundInputs& bi, std::ostream& out) {
  const BoundReport report = compute_cn(bi);
  out << "C_N = " << report.cn << "  (b_final = " << report.b_final << ")\n";
  if (report.vacuous)
    out << "bound vacuous (C_N >= 1)\n";
  else
    out << "stability guaranteed with probability >= " << report.stability_lower_bound << "\n";
  if (bi.schedule.kind == Schedule::Kind::kDecreasing) {
    const DecreasingLrBound lr = check_decreasing_lr_bound(bi);
    out << "decreasing-rate inequality: lhs = " << lr.lhs << ", margin = " << lr.margin
        << (lr.holds ? " (holds)" : " (fails)") << ", max_a = " << lr.max_a << "\n";
  } else if (bi.horizon) {
    const ConstantLrBound lr = check_constant_lr_bound(bi);
    out << "constant-rate inequality: lhs = " << lr.lhs << ", margin = " << lr.margin
        << (lr.holds ? " (holds)" : " (fails)") << "\n";
  }
}

}  // namespace

int run_bounds(const std::filesystem::path& config_path, const RunOptions& options,
               std::ostream& out) {
  json doc;
  try {
    doc = load_json(config_path);
  } catch (const ConfigError& e) {
    out << "config error at " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    if (doc.is_object() && doc.contains("landscape")) {
      for (const auto& exp : parse_experiments(doc, options, /*require_sgd=*/true)) {
        out << exp.name << ":\n";
        print_bound_report(exp.mc.bound_inputs, out);
      }
    } else {
      print_bound_report(parse_bound_inputs(doc, ""), out);
    }
  } catch (const ConfigError& e) {
    out << "config error at " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

int run_simulate(const std::filesystem::path& config_path, const RunOptions& options,
                 std::ostream& out) {
  std::vector<Experiment> experiments;
  try {
    experiments = parse_experiments(load_json(config_path), options, /*require_sgd=*/true);
  } catch (const ConfigError& e) {
    out << "config error at " << e.what() << "\n";
    return kExitConfigError;
  }

  if (options.dry_run) {
    out << "plan: " << experiments.size() << " experiment(s)\n";
    for (const auto& exp : experiments) {
      out << "  " << exp.name << ": trials=" << exp.mc.trials << " horizon=" << exp.mc.sgd.horizon
          << " epsilons=" << exp.mc.epsilon_grid.size()
          << " rate_horizons=" << exp.rate_horizons.size() << " -> " << exp.out_dir << "\n";
    }
    return kExitOk;
  }

  bool any_violated = false;
  for (const auto& exp : experiments) {
    std::vector<MCResult> results;
    results.push_back(estimate_stability(exp.mc));
    if (!exp.mc.epsilon_grid.empty()) {
      auto conc = estimate_concentration(exp.mc);
      results.insert(results.end(), conc.begin(), conc.end());
    }
    std::optional<RateFit> fit;
    if (!exp.rate_horizons.empty()) {
      ExperimentConfig rate_cfg = exp.mc;
      rate_cfg.trials = exp.rate_trials;
      fit = fit_rate_slope(rate_cfg, exp.rate_horizons);
    }
    const ComparisonSummary summary = compare_to_bounds(results);

    try {
      std::filesystem::create_directories(exp.out_dir);
      const std::filesystem::path dir(exp.out_dir);
      write_results_csv(dir / (exp.name + "_results.csv"), exp, results,
                        fit ? &*fit : nullptr);
      if (exp.write_trajectory) {
        SgdConfig traj_cfg = exp.mc.sgd;
        traj_cfg.seed = mix_seed(exp.mc.sgd.seed, 0);
        write_trajectory_csv(dir / (exp.name + "_trajectory.csv"), exp,
                             run_trajectory(traj_cfg));
      }
      json j;
      j["version"] = kVersion;
      j["config"] = exp.config_hash;
      j["master_seed"] = exp.mc.sgd.seed;
      json jr = json::array();
      for (const auto& r : results) jr.push_back(to_json(r));
      j["results"] = jr;
      if (fit) j["rate_fit"] = to_json(*fit);
      j["comparison"] = {{"dominated", summary.dominated},
                         {"violated", summary.violated},
                         {"vacuous", summary.vacuous},
                         {"unbounded", summary.unbounded}};
      std::ofstream os(dir / (exp.name + "_summary.json"), std::ios::trunc);
      if (!os) return kExitIoError;
      os << j.dump(2) << "\n";
    } catch (const std::filesystem::filesystem_error&) {
      return kExitIoError;
    } catch (const std::runtime_error& e) {
      out << e.what() << "\n";
      return kExitIoError;
    }

    out << exp.name << ": dominated=" << summary.dominated << " violated=" << summary.violated
        << " vacuous=" << summary.vacuous << " unbounded=" << summary.unbounded << "\n";
    for (const auto& f : summary.failures) {
      out << "  dominance failure: event=" << f.event_name;
      if (f.epsilon) out << " epsilon=" << *f.epsilon;
      out << " config=" << f.config_label << " seed=" << f.master_seed << "\n";
    }
    if (summary.violated > 0) any_violated = true;
  }
  return any_violated ? kExitDominanceFailure : kExitOk;
}

}  // namespace sgdlab
