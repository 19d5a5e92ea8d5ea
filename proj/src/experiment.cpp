#include "sbmsdp/experiment.hpp"

#include "sbmsdp/bounds.hpp"
#include "sbmsdp/detect.hpp"
#include "sbmsdp/hypo.hpp"
#include "sbmsdp/rng.hpp"
#include "sbmsdp/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace sbmsdp {
namespace {

using nlohmann::json;

const std::set<std::string> kParamNames = {
    "n", "K", "rho", "mu_in", "mu_out", "mu_gap", "tau", "p_in", "p_out",
    "sigma", "epsilon", "k0", "r", "s", "m", "exploratory"};

const char* kColumns = "experiment,replicate,seed,params,metric,value,runtime_ms,status";

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double get(const ParamMap& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double get_or(const ParamMap& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int get_int(const ParamMap& p, const std::string& key) {
  const double v = get(p, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("parameter '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

SolverOptions parse_solver(const json& j) {
  SolverOptions o;
  for (const auto& [key, v] : j.items()) {
    if (key == "rank") o.rank = v.get<int>();
    else if (key == "max_sweeps") o.max_sweeps = v.get<int>();
    else if (key == "tol_obj") o.tol_obj = v.get<double>();
    else if (key == "stall_sweeps") o.stall_sweeps = v.get<int>();
    else if (key == "tol_feas") o.tol_feas = v.get<double>();
    else if (key == "restarts") o.restarts = v.get<int>();
    else if (key == "certify") o.certify = v.get<bool>();
    else if (key == "max_iterations") o.max_iterations = v.get<int>();
    else if (key == "admm_tol") o.admm_tol = v.get<double>();
    else throw ConfigError("unknown solver option '" + key + "'");
  }
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return o;
}

void read_params(const json& j, ParamMap& out, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "law") continue;
    if (!kParamNames.count(key)) {
      throw ConfigError(std::string("unknown parameter '") + key + "' in " + where);
    }
    if (!v.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
    out[key] = v.get<double>();
  }
}

std::string reason_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension_error";
  if (dynamic_cast<const SolverError*>(&e)) return "solver_error";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  return "runtime_error";
}

std::string row_text(const ResultRow& r) {
  std::ostringstream os;
  os << r.experiment << ',' << r.replicate << ',' << r.seed << ',' << r.params << ','
     << r.metric << ',' << fmt(r.value) << ',' << fmt(r.runtime_ms) << ',' << r.status;
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SBMSDP_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string summary_path_for(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + ".summary.csv";
  }
  return out + ".summary.csv";
}

WPlusMode resolve_w_plus(const ExperimentConfig& c, const SbmModel& model) {
  if (c.w_plus == "plugin") return WPlusMode::plugin();
  if (c.w_plus == "model") return WPlusMode::known(subgamma(model).w_plus);
  return WPlusMode::known(std::stod(c.w_plus));
}

SequentialOptions sequential_options(const ExperimentConfig& c, const ParamMap& p,
                                     const SbmModel& model, std::uint64_t seed) {
  SequentialOptions so;
  so.epsilon = get_or(p, "epsilon", 0.1);
  so.K_max = c.K_max;
  so.w_plus = resolve_w_plus(c, model);
  so.seed = seed;
  so.labels = c.labels == "sdp" ? LabelMethod::kSdpMembership : LabelMethod::kSpectral;
  so.solver = c.solver;
  return so;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSdpEval: return "sdp-eval";
    case ExperimentKind::kGoeCalibrate: return "goe-calibrate";
    case ExperimentKind::kTestPower: return "test-power";
    case ExperimentKind::kEstimateCommunities: return "estimate-communities";
    case ExperimentKind::kEstimateK: return "estimate-k";
    case ExperimentKind::kBoundsCheck: return "bounds-check";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::kSdpEval, ExperimentKind::kGoeCalibrate,
                           ExperimentKind::kTestPower, ExperimentKind::kEstimateCommunities,
                           ExperimentKind::kEstimateK, ExperimentKind::kBoundsCheck}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.hash = hex64(fnv1a(j.dump()));
  try {
    if (!j.contains("kind")) throw ConfigError("config needs 'kind'");
    for (const auto& [key, v] : j.items()) {
      if (key == "id") c.id = v.get<std::string>();
      else if (key == "kind") c.kind = parse_kind(v.get<std::string>());
      else if (key == "model") {
        if (v.contains("law")) c.law = v["law"].get<std::string>();
        read_params(v, c.params, "model");
      } else if (key == "params") read_params(v, c.params, "params");
      else if (key == "grid") {
        if (!v.is_object()) throw ConfigError("grid must be an object of lists");
        for (const auto& [axis, values] : v.items()) {
          if (!kParamNames.count(axis)) throw ConfigError("unknown grid axis '" + axis + "'");
          if (!values.is_array() || values.empty()) {
            throw ConfigError("grid axis '" + axis + "' must be a non-empty list");
          }
          c.grid.emplace_back(axis, values.get<std::vector<double>>());
        }
      } else if (key == "replicates") c.replicates = v.get<int>();
      else if (key == "base_seed") c.base_seed = v.get<std::uint64_t>();
      else if (key == "solver") c.solver = parse_solver(v);
      else if (key == "w_plus") c.w_plus = v.is_number() ? fmt(v.get<double>()) : v.get<std::string>();
      else if (key == "labels") c.labels = v.get<std::string>();
      else if (key == "K_max") c.K_max = v.get<int>();
      else if (key == "enumerate") c.enumerate = v.get<bool>();
      else if (key == "output") c.output = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
  }
  if (c.id.empty()) c.id = to_string(c.kind);
  if (c.id.find(',') != std::string::npos) throw ConfigError("id must not contain commas");
  if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (c.K_max < 1) throw ConfigError("K_max must be >= 1");
  if (c.law != "zig" && c.law != "bernoulli" && c.law != "gaussian") {
    throw ConfigError("law must be zig, bernoulli or gaussian");
  }
  if (c.labels != "spectral" && c.labels != "sdp") throw ConfigError("labels must be spectral or sdp");
  if (c.w_plus != "model" && c.w_plus != "plugin") {
    double v = 0.0;
    try {
      v = std::stod(c.w_plus);
    } catch (const std::exception&) {
      throw ConfigError("w_plus must be model, plugin or a positive number");
    }
    if (!(v > 0.0)) throw ConfigError("w_plus must be positive");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<ParamMap> grid_points(const ExperimentConfig& config) {
  std::vector<ParamMap> points{config.params};
  for (const auto& [axis, values] : config.grid) {
    std::vector<ParamMap> next;
    for (const ParamMap& p : points) {
      for (double v : values) {
        ParamMap q = p;
        q[axis] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  for (ParamMap& p : points) {
    if (p.count("mu_gap")) p["mu_in"] = get_or(p, "mu_out", 0.0) + p["mu_gap"];
  }
  return points;
}

SbmModel model_at(const std::string& law, const ParamMap& p) {
  const int n = get_int(p, "n");
  const int K = get_int(p, "K");
  if (law == "zig") {
    return SbmModel::zig_dense(n, K, get(p, "rho"), get(p, "mu_in"), get(p, "mu_out"),
                               get(p, "tau"));
  }
  if (law == "bernoulli") return SbmModel(n, K, BernoulliLaw{get(p, "p_in"), get(p, "p_out")});
  if (law == "gaussian") {
    return SbmModel(n, K, GaussianLaw{get(p, "mu_in"), get(p, "mu_out"), get_or(p, "sigma", 1.0)});
  }
  throw ConfigError("unknown law '" + law + "'");
}

std::string format_params(const ParamMap& point, const std::vector<std::string>& axes) {
  if (axes.empty()) return "base";
  std::string out;
  for (const std::string& a : axes) {
    if (!out.empty()) out += ';';
    out += a + '=' + fmt(point.at(a));
  }
  return out;
}

std::vector<std::pair<std::string, double>> run_replicate(const ExperimentConfig& c,
                                                          const ParamMap& p,
                                                          std::uint64_t seed) {
  std::vector<std::pair<std::string, double>> out;
  SolverOptions solver = c.solver;
  solver.seed = split_seed(seed, 1);

  switch (c.kind) {
    case ExperimentKind::kBoundsCheck: {
      const int r = get_int(p, "r"), s = get_int(p, "s"), m = get_int(p, "m");
      const bool exploratory = get_or(p, "exploratory", 0.0) != 0.0;
      const BoundCase bc = closed_form_bound(r, s, m, exploratory);
      out.emplace_back("bound_coeff", bc.bound_coeff);
      out.emplace_back("overall_coeff", bc.overall_coeff);
      out.emplace_back("case_id", static_cast<double>(bc.case_id));
      if (c.enumerate && r * s * m <= 16) {
        const EnumerationResult e = enumerate_min_sdp_diff(r, s, m, solver, exploratory);
        out.emplace_back("enumerated_min", e.min_value);
        out.emplace_back("partitions", static_cast<double>(e.partitions));
      }
      return out;
    }
    case ExperimentKind::kGoeCalibrate: {
      const int n = get_int(p, "n");
      const SdpSolution sol = sdp_psd1(sample_goe(n, split_seed(seed, 0)), solver);
      out.emplace_back("sdp_over_n", sol.objective / n);
      out.emplace_back("converged", sol.converged ? 1.0 : 0.0);
      return out;
    }
    default:
      break;
  }

  const SbmModel model = model_at(c.law, p);
  const int n = model.n();
  const int K = model.K();
  const CommunityAssignment truth = balanced_assignment(n, K, split_seed(seed, 2));
  const SymmetricMatrix W = sample_sbm(model, truth, split_seed(seed, 0));

  switch (c.kind) {
    case ExperimentKind::kSdpEval: {
      const SdpSolution sol = sdp_psd1(W, solver);
      out.emplace_back("objective", sol.objective);
      out.emplace_back("objective_over_n", sol.objective / n);
      if (sol.dual_bound) out.emplace_back("dual_bound", *sol.dual_bound);
      out.emplace_back("sweeps", sol.iterations);
      out.emplace_back("converged", sol.converged ? 1.0 : 0.0);
      break;
    }
    case ExperimentKind::kTestPower: {
      const int k0 = p.count("k0") ? get_int(p, "k0") : K;
      const StageRecord st = plugin_stage(W, k0, sequential_options(c, p, model, split_seed(seed, 1)));
      if (!st.outcome) throw std::runtime_error(st.error);
      out.emplace_back("statistic", st.outcome->statistic);
      out.emplace_back("threshold", st.outcome->threshold);
      out.emplace_back("reject", st.outcome->reject ? 1.0 : 0.0);
      out.emplace_back("w_plus", st.outcome->w_plus_used);
      break;
    }
    case ExperimentKind::kEstimateCommunities: {
      const CommunityAssignment sc = spectral_clustering(W, K, split_seed(seed, 3));
      if (K == 2) {
        const TwoCommunityEstimate est = estimate_two(W, solver);
        out.emplace_back("overlap_error", overlap_error(est.signs, truth.sign_vector()));
        out.emplace_back("spectral_overlap_error", 2.0 * align_labels(sc, truth).mismatches);
        out.emplace_back("sdp_converged", est.solution.converged ? 1.0 : 0.0);
      } else {
        MembershipOptions mo;
        mo.solver = solver;
        const MembershipEstimate est = estimate_membership(W, K, mo);
        const Eigen::MatrixXi Z0 = to_binary(truth.membership_matrix());
        out.emplace_back("membership_error",
                         static_cast<double>(membership_error(est.Z_rounded, Z0)));
        out.emplace_back("spectral_membership_error",
                         static_cast<double>(membership_error(to_binary(sc.membership_matrix()), Z0)));
        out.emplace_back("sdp_converged", est.solution.converged ? 1.0 : 0.0);
      }
      break;
    }
    case ExperimentKind::kEstimateK: {
      const SequentialTrace tr =
          sequential_estimate_k(W, sequential_options(c, p, model, split_seed(seed, 1)));
      int stage_errors = 0;
      for (const StageRecord& st : tr.stages) stage_errors += st.error.empty() ? 0 : 1;
      const int k_hat = tr.k_hat ? *tr.k_hat : c.K_max + 1;
      out.emplace_back("k_hat", k_hat);
      out.emplace_back("k_hat_found", tr.k_hat ? 1.0 : 0.0);
      out.emplace_back("k_hat_correct", k_hat == K ? 1.0 : 0.0);
      out.emplace_back("stage_errors", stage_errors);
      break;
    }
    default:
      break;
  }
  return out;
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  RunSummary summary;
  summary.output_path = options.output.empty() ? config.output : options.output;
  if (summary.output_path.empty()) throw ConfigError("no output path given");
  summary.summary_path = summary_path_for(summary.output_path);

  std::ofstream out(summary.output_path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + summary.output_path);
  {
    std::ofstream probe(summary.summary_path, std::ios::trunc);
    if (!probe) throw ConfigError("cannot write " + summary.summary_path);
  }

  const std::vector<ParamMap> points = grid_points(config);
  std::vector<std::string> axes;
  for (const auto& [axis, values] : config.grid) axes.push_back(axis);
  if (std::find(axes.begin(), axes.end(), "mu_gap") != axes.end() &&
      std::find(axes.begin(), axes.end(), "mu_in") == axes.end()) {
    axes.push_back("mu_in");
  }
  // Deterministic kinds produce identical replicates; run one.
  const int reps = config.kind == ExperimentKind::kBoundsCheck ? 1 : config.replicates;

  std::string header;
  header += std::string("# sbmsdp ") + kVersion + " experiment=" + config.id +
            " kind=" + to_string(config.kind) + "\n";
  header += "# config_hash=" + config.hash + " base_seed=" + std::to_string(config.base_seed) +
            " replicates=" + std::to_string(reps) + "\n";
  header += "# timestamp=" + utc_timestamp() + "\n";
  header += std::string("# columns: ") + kColumns + "\n";
  header += std::string(kColumns) + "\n";
  out << header << std::flush;

  struct Task {
    std::size_t point;
    int replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < points.size(); ++g) {
    for (int r = 0; r < reps; ++r) tasks.push_back({g, r});
  }

  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::mutex sink;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const std::uint64_t seed = split_seed(config.base_seed, static_cast<std::uint64_t>(task.replicate));
      ResultRow base;
      base.experiment = config.id;
      base.replicate = task.replicate;
      base.seed = seed;
      base.params = format_params(points[task.point], axes);
      std::vector<ResultRow> rows;
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto metrics = run_replicate(config, points[task.point], seed);
        const double ms = options.timing
                              ? std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start).count()
                              : 0.0;
        for (const auto& [name, value] : metrics) {
          ResultRow row = base;
          row.metric = name;
          row.value = value;
          row.runtime_ms = ms;
          rows.push_back(std::move(row));
        }
      } catch (const std::exception& e) {
        ResultRow row = base;
        row.metric = "error";
        row.value = std::nan("");
        row.status = reason_code(e);
        rows.push_back(std::move(row));
      }
      std::lock_guard<std::mutex> lock(sink);
      for (const ResultRow& row : rows) out << row_text(row) << '\n' << std::flush;
      results[t] = std::move(rows);
    }
  };
  const int workers = std::min<int>(resolve_workers(options.workers), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  out.close();

  if (options.sorted) {
    std::ofstream sorted(summary.output_path, std::ios::trunc);
    sorted << header;
    for (const auto& rows : results) {
      for (const ResultRow& row : rows) sorted << row_text(row) << '\n';
    }
  }

  // Aggregate per (grid point, metric), metrics in first-seen order.
  std::ofstream sum(summary.summary_path, std::ios::trunc);
  sum << "# sbmsdp " << kVersion << " experiment=" << config.id << " config_hash=" << config.hash
      << "\nexperiment,params,metric,count,mean,sd,errors\n";
  for (std::size_t g = 0; g < points.size(); ++g) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> values;
    int errors = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].point != g) continue;
      for (const ResultRow& row : results[t]) {
        ++summary.rows;
        if (row.status != "ok") {
          ++errors;
          ++summary.error_rows;
          continue;
        }
        if (!values.count(row.metric)) order.push_back(row.metric);
        values[row.metric].push_back(row.value);
      }
    }
    const std::string params = format_params(points[g], axes);
    for (const std::string& metric : order) {
      const std::vector<double>& v = values[metric];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      sum << config.id << ',' << params << ',' << metric << ',' << v.size() << ',' << fmt(mean)
          << ',' << fmt(sd) << ',' << errors << '\n';
    }
    if (order.empty()) {
      sum << config.id << ',' << params << ",error," << errors << ",nan,nan," << errors << '\n';
    }
  }
  return summary;
}

}  // namespace sbmsdp
