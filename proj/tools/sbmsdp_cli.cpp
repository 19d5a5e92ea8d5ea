#include "sbmsdp/bounds.hpp"
#include "sbmsdp/detect.hpp"
#include "sbmsdp/experiment.hpp"
#include "sbmsdp/hypo.hpp"
#include "sbmsdp/matrix_io.hpp"
#include "sbmsdp/rng.hpp"
#include "sbmsdp/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sbmsdp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

struct ModelFlags {
  std::optional<double> n, K, rho, mu_in, mu_out, tau;
  std::string matrix;
  std::string law;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Base seed");
  app->add_option("--config", c.config, "JSON config supplying defaults");
  app->add_option("--out", c.out, "Write results here instead of stdout");
}

void add_model(CLI::App* app, ModelFlags& m) {
  app->add_option("--matrix", m.matrix, "Read W from a matrix file instead of sampling");
  app->add_option("--n", m.n, "Number of nodes");
  app->add_option("--K", m.K, "Number of communities");
  app->add_option("--rho", m.rho, "Edge density");
  app->add_option("--mu-in", m.mu_in, "Within-community mean");
  app->add_option("--mu-out", m.mu_out, "Between-community mean");
  app->add_option("--tau", m.tau, "Weight standard deviation");
  app->add_option("--law", m.law, "zig | bernoulli | gaussian");
}

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  for (const auto& [k, v] : ParamMap{{"n", 100}, {"K", 2}, {"rho", 0.8}, {"mu_in", 5},
                                     {"mu_out", 2}, {"tau", 1}}) {
    cfg.params.emplace(k, v);
  }
  return cfg;
}

ParamMap merged(ExperimentConfig& cfg, const ModelFlags& m) {
  ParamMap p = cfg.params;
  auto set = [&](const char* key, const std::optional<double>& v) {
    if (v) p[key] = *v;
  };
  set("n", m.n);
  set("K", m.K);
  set("rho", m.rho);
  set("mu_in", m.mu_in);
  set("mu_out", m.mu_out);
  set("tau", m.tau);
  if (!m.law.empty()) cfg.law = m.law;
  return p;
}

// Loads W from --matrix or samples it; returns the model when sampled.
std::optional<SbmModel> obtain(const ExperimentConfig& cfg, const ParamMap& p,
                               const ModelFlags& m, std::uint64_t seed, SymmetricMatrix& W) {
  if (!m.matrix.empty()) {
    W = read_matrix_file(m.matrix);
    return std::nullopt;
  }
  SbmModel model = model_at(cfg.law, p);
  const CommunityAssignment truth =
      balanced_assignment(model.n(), model.K(), split_seed(seed, 2));
  W = sample_sbm(model, truth, split_seed(seed, 0));
  return model;
}

WPlusMode w_plus_mode(const std::string& flag, const std::optional<SbmModel>& model) {
  if (flag == "plugin") return WPlusMode::plugin();
  if (flag == "model") {
    if (!model) throw ConfigError("--w-plus model needs a sampled model, not --matrix");
    return WPlusMode::known(subgamma(*model).w_plus);
  }
  double v = 0.0;
  try {
    v = std::stod(flag);
  } catch (const std::exception&) {
    throw ConfigError("--w-plus must be plugin, model or a positive number");
  }
  if (!(v > 0.0)) throw ConfigError("--w-plus must be positive");
  return WPlusMode::known(v);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ConfigError("cannot write " + c.out);
  f << text;
}

std::string describe_stage(const StageRecord& st) {
  std::ostringstream os;
  os << "K0 " << st.K0;
  if (st.outcome) {
    os << " statistic " << num(st.outcome->statistic) << " threshold "
       << num(st.outcome->threshold) << " reject " << (st.outcome->reject ? 1 : 0)
       << " w_plus " << num(st.outcome->w_plus_used);
  } else {
    os << " error " << st.error;
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDP-based testing and estimation for weighted stochastic block models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  ModelFlags model;

  auto* sdp = app.add_subcommand("sdp", "Solve the SDP for a matrix file");
  std::string matrix_file, set_name = "psd1";
  std::optional<double> lambda;
  sdp->add_option("matrix", matrix_file, "Matrix file")->required();
  sdp->add_option("--set", set_name, "psd1 | balanced | membership");
  sdp->add_option("--lambda", lambda, "Sum target for the membership set");
  add_common(sdp, common);

  auto* goe = app.add_subcommand("goe-calibrate", "Mean SDP(GOE)/n over replicates");
  int goe_n = 300, goe_reps = 20;
  goe->add_option("--n", goe_n, "Dimension");
  goe->add_option("--reps", goe_reps, "Replicates");
  add_common(goe, common);

  auto* test = app.add_subcommand("test-k", "One plug-in test at candidate K0");
  int k0 = 1;
  std::string w_plus_flag = "plugin", labels_flag = "spectral";
  std::optional<double> epsilon;
  test->add_option("--k0", k0, "Candidate number of communities")->required();
  test->add_option("--epsilon", epsilon, "Threshold slack");
  test->add_option("--w-plus", w_plus_flag, "plugin | model | value");
  test->add_option("--labels", labels_flag, "spectral | sdp");
  add_model(test, model);
  add_common(test, common);

  auto* est = app.add_subcommand("estimate-k", "Sequential estimate of K");
  int k_max = 8;
  est->add_option("--k-max", k_max, "Largest candidate");
  est->add_option("--epsilon", epsilon, "Threshold slack");
  est->add_option("--w-plus", w_plus_flag, "plugin | model | value");
  est->add_option("--labels", labels_flag, "spectral | sdp");
  add_model(est, model);
  add_common(est, common);

  auto* bnd = app.add_subcommand("bounds", "Closed-form lower bounds for SDP(M_r - M_s)");
  int r = 0, s = 0, m = 0;
  bool enumerate = false, exploratory = false;
  bnd->add_option("--r", r, "Finer community count")->required();
  bnd->add_option("--s", s, "Coarser community count")->required();
  bnd->add_option("--m", m, "Size multiplier, n = r s m")->required();
  bnd->add_flag("--enumerate", enumerate, "Brute-force minimum (n <= 16)");
  bnd->add_flag("--exploratory", exploratory, "Allow m = 1");
  add_common(bnd, common);

  auto* sim = app.add_subcommand("simulate", "Sample a weight matrix");
  std::string labels_out;
  sim->add_option("--labels-out", labels_out, "Also write the true labels");
  add_model(sim, model);
  add_common(sim, common);

  auto* run = app.add_subcommand("run", "Run an experiment config");
  bool sorted = false, no_timing = false;
  int workers = 0;
  run->add_flag("--sorted", sorted, "Canonical row order");
  run->add_flag("--no-timing", no_timing, "Write runtime_ms as 0");
  run->add_option("--workers", workers, "Worker threads (default: SBMSDP_WORKERS)");
  add_common(run, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    ExperimentConfig cfg = base_config(common);
    if (!common.config.empty() && !test->count("--w-plus") && !est->count("--w-plus")) {
      w_plus_flag = cfg.w_plus;
    }
    SolverOptions solver = cfg.solver;
    solver.seed = split_seed(common.seed, 1);
    std::ostringstream os;

    if (*sdp) {
      const SymmetricMatrix M = read_matrix_file(matrix_file);
      SdpSolution sol;
      if (set_name == "psd1") {
        sol = sdp_psd1(M, solver);
      } else if (set_name == "balanced") {
        sol = sdp_balanced(M, solver);
      } else if (set_name == "membership") {
        if (!lambda) throw ConfigError("--set membership needs --lambda");
        sol = sdp_membership(M, *lambda, solver);
      } else {
        throw ConfigError("--set must be psd1, balanced or membership");
      }
      os << "objective " << num(sol.objective) << '\n';
      if (sol.dual_bound) os << "dual_bound " << num(*sol.dual_bound) << '\n';
      os << "iterations " << sol.iterations << '\n'
         << "converged " << (sol.converged ? 1 : 0) << '\n'
         << "residual_diag " << num(sol.residuals.diag) << '\n'
         << "residual_psd " << num(sol.residuals.psd) << '\n';
      if (set_name != "psd1") {
        os << "residual_sum " << num(sol.residuals.sum) << '\n'
           << "residual_negativity " << num(sol.residuals.negativity) << '\n';
      }
    } else if (*goe) {
      if (goe_n < 1 || goe_reps < 1) throw ConfigError("--n and --reps must be positive");
      double total = 0.0, worst = 0.0;
      for (int rep = 0; rep < goe_reps; ++rep) {
        const std::uint64_t rs = split_seed(common.seed, static_cast<std::uint64_t>(rep));
        SolverOptions so = solver;
        so.seed = split_seed(rs, 1);
        const double v = sdp_psd1(sample_goe(goe_n, split_seed(rs, 0)), so).objective / goe_n;
        total += v;
        worst = std::max(worst, v);
      }
      os << "n " << goe_n << "\nreps " << goe_reps << "\nmean_sdp_over_n " << num(total / goe_reps)
         << "\nmax_sdp_over_n " << num(worst) << '\n';
    } else if (*test || *est) {
      const ParamMap p = merged(cfg, model);
      SymmetricMatrix W;
      const std::optional<SbmModel> sampled = obtain(cfg, p, model, common.seed, W);
      SequentialOptions so;
      so.epsilon = epsilon.value_or(p.count("epsilon") ? p.at("epsilon") : 0.1);
      so.K_max = *est ? k_max : cfg.K_max;
      so.w_plus = w_plus_mode(w_plus_flag, sampled);
      so.seed = split_seed(common.seed, 1);
      so.solver = cfg.solver;
      if (labels_flag != "spectral" && labels_flag != "sdp") {
        throw ConfigError("--labels must be spectral or sdp");
      }
      so.labels = labels_flag == "sdp" ? LabelMethod::kSdpMembership : LabelMethod::kSpectral;
      if (*test) {
        const StageRecord st = plugin_stage(W, k0, so);
        if (!st.outcome) throw std::runtime_error(st.error);
        os << describe_stage(st) << '\n';
      } else {
        const SequentialTrace tr = sequential_estimate_k(W, so);
        for (const StageRecord& st : tr.stages) os << describe_stage(st) << '\n';
        os << "k_hat " << (tr.k_hat ? std::to_string(*tr.k_hat) : std::string("none")) << '\n';
      }
    } else if (*bnd) {
      const BoundCase bc = closed_form_bound(r, s, m, exploratory);
      os << "r " << r << " s " << s << " m " << m << " t " << bc.t << " n " << r * s * m << '\n';
      for (const auto& [id, coeff] : bc.coefficients) {
        os << "case " << to_string(id) << " coeff " << num(coeff) << '\n';
      }
      os << "bound_coeff " << num(bc.bound_coeff) << " (" << to_string(bc.case_id) << ")\n"
         << "overall_coeff " << num(bc.overall_coeff) << '\n';
      if (enumerate) {
        const EnumerationResult e = enumerate_min_sdp_diff(r, s, m, solver, exploratory);
        os << "enumerated_min " << num(e.min_value) << " partitions " << e.partitions
           << "\nargmin";
        for (int l : e.argmin.labels()) os << ' ' << l;
        os << '\n';
      }
    } else if (*sim) {
      const ParamMap p = merged(cfg, model);
      const SbmModel sm = model_at(cfg.law, p);
      const CommunityAssignment truth = balanced_assignment(sm.n(), sm.K(), split_seed(common.seed, 2));
      write_matrix(os, sample_sbm(sm, truth, split_seed(common.seed, 0)));
      if (!labels_out.empty()) {
        std::ofstream lf(labels_out);
        if (!lf) throw ConfigError("cannot write " + labels_out);
        for (int l : truth.labels()) lf << l << '\n';
      }
    } else if (*run) {
      if (common.config.empty()) throw ConfigError("run needs --config");
      cfg = load_config(common.config);
      if (run->count("--seed")) cfg.base_seed = common.seed;
      RunOptions ro;
      ro.workers = workers;
      ro.sorted = sorted;
      ro.timing = !no_timing;
      ro.output = common.out;
      const RunSummary rs = run_experiment(cfg, ro);
      std::cout << "wrote " << rs.output_path << " and " << rs.summary_path << " (" << rs.rows
                << " rows, " << rs.error_rows << " errors)\n";
      return rs.error_rows > 0 ? kExitPartial : 0;
    }
    emit(common, os.str());
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
