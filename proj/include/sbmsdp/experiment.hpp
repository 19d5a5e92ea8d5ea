#pragma once

#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbmsdp {

// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind {
  kSdpEval,
  kGoeCalibrate,
  kTestPower,
  kEstimateCommunities,
  kEstimateK,
  kBoundsCheck,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

using ParamMap = std::map<std::string, double>;

struct ExperimentConfig {
  std::string id;  // defaults to the kind name
  ExperimentKind kind = ExperimentKind::kSdpEval;
  std::string law = "zig";  // zig | bernoulli | gaussian
  // Scalar defaults: n, K, rho, mu_in, mu_out, tau, p_in, p_out, sigma,
  // epsilon, k0, r, s, m.
  ParamMap params;
  // Cartesian product of these axes; "mu_gap" sets mu_in = mu_out + gap.
  std::vector<std::pair<std::string, std::vector<double>>> grid;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  SolverOptions solver;
  std::string w_plus = "model";  // model | plugin | a positive number
  std::string labels = "spectral";  // spectral | sdp
  int K_max = 8;
  bool enumerate = false;
  std::string output;
  // FNV-1a of the normalized JSON the config was parsed from.
  std::string hash;
};

// Parses and validates the JSON document; throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Expands the grid; every point holds the full parameter set.
std::vector<ParamMap> grid_points(const ExperimentConfig& config);

// Builds the model a grid point describes.
SbmModel model_at(const std::string& law, const ParamMap& point);

struct ResultRow {
  std::string experiment;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string params;
  std::string metric;
  double value = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";  // reason code on error rows
};

struct RunOptions {
  // 0: SBMSDP_WORKERS from the environment, else hardware concurrency.
  int workers = 0;
  // Rewrites the file in (params, replicate, metric) order at the end.
  bool sorted = false;
  // When false, runtime_ms is written as 0 so reruns are byte-identical
  // apart from the timestamp line.
  bool timing = true;
  std::string output;  // overrides config.output when non-empty
};

struct RunSummary {
  std::string output_path;
  std::string summary_path;
  long long rows = 0;
  long long error_rows = 0;
};

// Runs every (grid point, replicate) pair. Replicate r uses the seed
// split_seed(base_seed, r). Writes the CSV plus "<stem>.summary.csv" with the
// mean and sample standard deviation per grid point and metric.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Metrics of a single (grid point, replicate) task; throws on failure.
std::vector<std::pair<std::string, double>> run_replicate(
    const ExperimentConfig& config, const ParamMap& point, std::uint64_t seed);

std::string format_params(const ParamMap& point, const std::vector<std::string>& axes);

}  // namespace sbmsdp
