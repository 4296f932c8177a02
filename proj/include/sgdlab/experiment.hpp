#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdlab/conditions.hpp"
#include "sgdlab/montecarlo.hpp"

namespace sgdlab {

// Experiment files are JSON documents with sections
//   landscape, neighborhood, schedule, noise, sgd, bounds, montecarlo, output
// validated strictly (unknown keys rejected) before any computation. A file
// whose root is an array is a suite of experiments.

/// Schema or semantic violation in a config file; `path` is the JSON
/// pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDominanceFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  int threads = 1;
  bool dry_run = false;
};

struct Experiment {
  std::string name;
  std::string config_hash;
  ExperimentConfig mc;
  long condition_samples = 20000;
  double delta = 0.0;  // neighborhood inflation for the local constants
  std::vector<long> rate_horizons;
  long rate_trials = 1000;
  std::string out_dir = "out";
  bool write_trajectory = false;
};

/// FNV-1a hash of the canonical serialization, hex-encoded.
std::string config_hash(const nlohmann::json& doc);

/// Parses and strictly validates an experiment document (object or array).
/// Sections not needed by a given command may be omitted; `require_sgd`
/// demands the full simulation set. Throws ConfigError.
std::vector<Experiment> parse_experiments(const nlohmann::json& doc, const RunOptions& options,
                                          bool require_sgd);

/// Reads and parses a file; parse failures are reported as ConfigError.
nlohmann::json load_json(const std::filesystem::path& path);

// Command drivers shared by the CLI and the acceptance suite. Each returns
// a process exit code and prints human-readable output to `out`.
int run_check_conditions(const std::filesystem::path& config_path, const RunOptions& options,
                         std::ostream& out);
int run_bounds(const std::filesystem::path& config_path, const RunOptions& options,
               std::ostream& out);
int run_simulate(const std::filesystem::path& config_path, const RunOptions& options,
                 std::ostream& out);

// JSON forms of the report types.
nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const HcprcReport& report);
nlohmann::json to_json(const ImplicationMatrix& matrix);
nlohmann::json to_json(const MCResult& result);
nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const BoundReport& report);

}  // namespace sgdlab
