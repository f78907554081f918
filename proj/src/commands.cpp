#include "so3est/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "so3est/cli/io.hpp"
#include "so3est/cli/star_tracker_example.hpp"
#include "so3est/wahba.hpp"

namespace so3est::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::MissingGyro:
      return kConfigError;
    case ErrorCode::GoldenMismatch:
      return kGoldenMismatch;
    case ErrorCode::SingularProfile:
    case ErrorCode::RankDeficient:
      return kSingularProfile;
    case ErrorCode::ReflectionProfile:
      return kReflectionProfile;
    case ErrorCode::NotSkew:
    case ErrorCode::NotRotation:
    case ErrorCode::NotSymmetricPD:
    case ErrorCode::PotentialGradientNotSkewCompatible:
    case ErrorCode::StepTooLarge:
    case ErrorCode::InconsistentUpdate:
      return kNumericalError;
  }
  return kInternalError;
}

namespace {

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  os << name << " =\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "  ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << std::setw(9) << std::fixed << std::setprecision(4) << m(r, c);
    os << '\n';
  }
  os.unsetf(std::ios::floatfield);
}

double omega_error(const Matrix3d& estimate, const Matrix3d& truth) {
  const Matrix3d d = estimate - truth;
  return Vector3d(d(2, 1), d(0, 2), d(1, 0)).norm();
}

}  // namespace

// paper-example -------------------------------------------------------------

PaperExampleResult paper_example() {
  namespace ex = star_tracker_example;
  const Matrix3Xd e = ex::inertial();
  const Matrix3Xd b = ex::measured();
  const VectorXd w = VectorXd::Ones(e.cols());

  const auto profile = build_profile(e, w, b);
  const auto sol = solve_attitude(profile);

  PaperExampleResult r;
  r.C_hat = sol.C_hat;
  r.S = sol.S;
  r.error = attitude_error(sol.C_hat, ex::true_attitude());
  r.residual = e - sol.C_hat * b;
  r.cost = cost_J0(sol.C_hat, e, b, w);
  r.max_deviation = max_abs(Matrix3d(sol.C_hat - ex::published_estimate()));
  r.max_error = max_abs(r.error);
  r.stationarity = stationarity_residual(sol.C_hat, profile.L);
  r.passed = r.max_deviation <= ex::kGoldenTolerance && r.max_error <= ex::kGoldenTolerance;
  return r;
}

std::string format_report(const PaperExampleResult& r) {
  std::ostringstream os;
  os << "Seven-vector star tracker example (identity weights)\n";
  print_matrix(os, "C_hat", r.C_hat);
  print_matrix(os, "e_C = C_hat^T C - I", r.error);
  print_matrix(os, "E - C_hat B", r.residual);
  os << std::setprecision(6);
  os << "cost J0                      = " << r.cost << '\n';
  os << "stationarity residual        = " << r.stationarity << '\n';
  os << "max |C_hat - published|      = " << r.max_deviation << '\n';
  os << "max |e_C|                    = " << r.max_error << '\n';
  os << "golden tolerance             = " << star_tracker_example::kGoldenTolerance << '\n';
  os << (r.passed ? "PASS" : "FAIL") << '\n';
  return os.str();
}

json to_json(const PaperExampleResult& r) {
  return {{"schema", io::kSchemaVersion},
          {"C_hat", io::to_json(r.C_hat)},
          {"S", io::to_json(r.S)},
          {"error_matrix", io::to_json(r.error)},
          {"residual", io::to_json(r.residual)},
          {"cost_J0", r.cost},
          {"stationarity_residual", r.stationarity},
          {"max_deviation", r.max_deviation},
          {"max_error", r.max_error},
          {"passed", r.passed}};
}

// determine -----------------------------------------------------------------

DetermineResult determine(const json& cfg) {
  const Matrix3Xd e = io::parse_matrix3x(cfg.at("E"), "E");
  const Matrix3Xd b = io::parse_matrix3x(cfg.at("B"), "B");
  if (e.cols() != b.cols()) throw Error(ErrorCode::ShapeMismatch, "E and B differ in column count");
  const VectorXd w = cfg.contains("weights") ? io::parse_vector(cfg["weights"], "weights")
                                             : VectorXd::Ones(e.cols()).eval();
  SolveOptions options;
  options.reflection_fallback = cfg.value("reflection_fallback", false);

  const auto profile = build_profile(e, w, b);
  const auto sol = solve_attitude(profile, options);

  DetermineResult r;
  r.C_hat = sol.C_hat;
  r.S = sol.S;
  r.cost = cost_J0(sol.C_hat, e, b, w);
  r.stationarity = stationarity_residual(sol.C_hat, profile.L);
  if (cfg.contains("C_true")) {
    const Matrix3d truth = io::parse_matrix3(cfg["C_true"], "C_true");
    r.principal_angle = principal_angle(sol.C_hat, truth);
    r.error = attitude_error(sol.C_hat, truth);
  }
  return r;
}

json to_json(const DetermineResult& r) {
  json out = {{"schema", io::kSchemaVersion},
              {"C_hat", io::to_json(r.C_hat)},
              {"S", io::to_json(r.S)},
              {"cost_J0", r.cost},
              {"stationarity_residual", r.stationarity}};
  if (r.principal_angle) out["principal_angle_rad"] = *r.principal_angle;
  if (r.error) out["error_matrix"] = io::to_json(*r.error);
  return out;
}

// propagate -----------------------------------------------------------------

std::vector<PropagateSample> run_propagate(const json& cfg) {
  const Matrix3d lambda = io::parse_matrix3(cfg.at("inertia"), "inertia");
  if (!is_symmetric_pd(lambda)) throw Error(ErrorCode::ConfigError, "inertia is not symmetric positive definite");
  const auto inertia = make_inertia(lambda);
  const auto potential = io::parse_potential(cfg.value("potential", json()), inertia);
  const auto init = io::parse_initial_state(cfg.at("initial"));
  const double t_end = cfg.at("t_end").get<double>();
  const auto integrator = io::parse_integrator(cfg.value("integrator", json()));
  const double sample_dt = cfg.value("sample_dt", 0.0);
  if (!(t_end >= init.t)) throw Error(ErrorCode::ConfigError, "t_end precedes initial.t");

  std::vector<double> times;
  if (sample_dt > 0.0) {
    const auto n = static_cast<long long>(std::floor((t_end - init.t) / sample_dt + 1e-9));
    for (long long k = 1; k <= n; ++k) times.push_back(init.t + static_cast<double>(k) * sample_dt);
  }
  if (times.empty() || times.back() < t_end) times.push_back(t_end);

  std::vector<PropagateSample> out;
  BodyState<double> state = init;
  out.push_back({state, kinetic_energy(inertia, state.Omega)});
  for (double t : times) {
    state = propagate(state, inertia, potential, std::min(t, t_end), integrator);
    out.push_back({state, kinetic_energy(inertia, state.Omega)});
  }
  return out;
}

std::string propagate_csv(const std::vector<PropagateSample>& samples) {
  std::ostringstream os;
  os << "t,C00,C01,C02,C10,C11,C12,C20,C21,C22,omega_x,omega_y,omega_z,kinetic_energy\n";
  for (const auto& s : samples) {
    os << io::format_number(s.state.t);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) os << ',' << io::format_number(s.state.C(r, c));
    const Matrix3d& w = s.state.Omega;
    os << ',' << io::format_number(w(2, 1)) << ',' << io::format_number(w(0, 2)) << ','
       << io::format_number(w(1, 0)) << ',' << io::format_number(s.kinetic_energy) << '\n';
  }
  return os.str();
}

// filter --------------------------------------------------------------------

FilterSetup parse_filter_setup(const json& cfg, const CommandOptions& opts) {
  FilterSetup setup;
  setup.scenario = io::parse_scenario(cfg.at("scenario"));
  setup.filter = io::parse_filter_config(cfg.value("filter", json()), setup.scenario.integrator);
  setup.mode = opts.mode ? *opts.mode : io::parse_mode(cfg.value("mode", std::string("no-gyro")));
  if (cfg.contains("filter")) {
    const json& f = cfg["filter"];
    if (f.contains("init_attitude")) setup.init_attitude = f["init_attitude"];
    if (f.contains("init_omega")) setup.init_omega = f["init_omega"];
  }
  if (opts.seed) setup.scenario.noise.seed = *opts.seed;
  return setup;
}

namespace {

FilterInit<double> make_init(const FilterSetup& setup, const BodyState<double>& truth0,
                             const MeasurementBatch<double>& batch0) {
  FilterInit<double> init;
  const json& att = setup.init_attitude;
  if (att.is_string()) {
    const auto s = att.get<std::string>();
    if (s == "truth") {
      init.C0 = truth0.C;
    } else if (s != "bootstrap") {
      throw Error(ErrorCode::ConfigError, "init_attitude must be 'truth', 'bootstrap' or a matrix");
    }
  } else {
    init.C0 = io::parse_matrix3(att, "filter.init_attitude");
  }

  const json& om = setup.init_omega;
  const std::string fallback = setup.mode == FilterMode::NoGyro ? "truth" : "measured";
  const std::string choice = om.is_null() ? fallback : (om.is_string() ? om.get<std::string>() : "");
  if (choice == "truth") {
    init.Omega0 = truth0.Omega;
  } else if (choice == "measured") {
    if (!batch0.Omega_meas) throw Error(ErrorCode::MissingGyro, "init_omega 'measured' needs gyro samples");
    init.Omega0 = *batch0.Omega_meas;
  } else if (!om.is_string()) {
    init.Omega0 = hat(io::parse_vector3(om, "filter.init_omega"));
  } else {
    throw Error(ErrorCode::ConfigError, "init_omega must be 'truth', 'measured' or a 3-vector");
  }
  return init;
}

}  // namespace

std::vector<FilterRow> run_filter_trial(const FilterSetup& setup, std::uint64_t seed, std::uint64_t trial) {
  const auto& scn = setup.scenario;
  const auto truth = gen_truth(scn);
  if (truth.empty()) return {};
  Rng rng(seed, trial);
  const bool gyro = setup.mode == FilterMode::WithGyro;
  const bool need_gyro_samples = gyro || setup.init_omega == json("measured");
  const auto batches = simulate_batches(scn, truth, rng, need_gyro_samples);
  const auto init = make_init(setup, truth.front(), batches.front());
  const auto estimates = run_filter(init, batches, scn.inertia, scn.potential, setup.filter, setup.mode);

  std::vector<FilterRow> rows;
  rows.reserve(estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& est = estimates[k];
    const auto& tr = truth[k];
    const auto& batch = batches[k];
    rows.push_back({est.t, principal_angle(est.C_minus, tr.C), principal_angle(est.C_plus, tr.C),
                    omega_error(est.Omega_minus, tr.Omega), omega_error(est.Omega_plus, tr.Omega),
                    cost_J0(est.C_plus, batch.E, batch.B, batch.W)});
  }
  return rows;
}

std::string filter_csv(const std::vector<FilterRow>& rows) {
  std::ostringstream os;
  os << kFilterCsvHeader << '\n';
  for (const auto& r : rows) {
    os << io::format_number(r.t) << ',' << io::format_number(r.err_att_pre) << ','
       << io::format_number(r.err_att_post) << ',' << io::format_number(r.err_omega_pre) << ','
       << io::format_number(r.err_omega_post) << ',' << io::format_number(r.cost_J0) << '\n';
  }
  return os.str();
}

// montecarlo ----------------------------------------------------------------

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    max = std::max(max, x);
    ++n;
  }

  MetricStats stats() const {
    MetricStats s;
    if (n == 0) return s;
    s.mean = sum / static_cast<double>(n);
    s.std = n > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * s.mean) / static_cast<double>(n - 1))) : 0.0;
    s.max = max;
    return s;
  }
};

struct EpochAccumulator {
  Accumulator att_pre, att_post, omega_pre, omega_post;

  void add(const FilterRow& r) {
    att_pre.add(r.err_att_pre);
    att_post.add(r.err_att_post);
    omega_pre.add(r.err_omega_pre);
    omega_post.add(r.err_omega_post);
  }

  EpochStats stats(double t) const {
    return {t, att_pre.stats(), att_post.stats(), omega_pre.stats(), omega_post.stats()};
  }
};

json to_json(const MetricStats& s) { return {{"mean", s.mean}, {"std", s.std}, {"max", s.max}}; }

json to_json(const EpochStats& e) {
  return {{"t", e.t},
          {"err_att_pre_rad", to_json(e.att_pre)},
          {"err_att_post_rad", to_json(e.att_post)},
          {"err_omega_pre", to_json(e.omega_pre)},
          {"err_omega_post", to_json(e.omega_post)}};
}

}  // namespace

MonteCarloSummary summarize(const std::vector<std::vector<FilterRow>>& runs) {
  MonteCarloSummary s;
  s.trials = static_cast<int>(runs.size());
  if (runs.empty()) return s;
  const std::size_t n_epochs = runs.front().size();
  std::vector<EpochAccumulator> per_epoch(n_epochs);
  EpochAccumulator total;
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < n_epochs; ++k) {
      per_epoch[k].add(run[k]);
      total.add(run[k]);
    }
  }
  for (std::size_t k = 0; k < n_epochs; ++k) s.epochs.push_back(per_epoch[k].stats(runs.front()[k].t));
  s.aggregate = total.stats(0.0);
  return s;
}

MonteCarloSummary run_montecarlo(const FilterSetup& setup, int trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw Error(ErrorCode::ConfigError, "trials must be at least 1");
  std::vector<std::vector<FilterRow>> runs(static_cast<std::size_t>(trials));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));

  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (auto i = static_cast<std::size_t>(w); i < runs.size(); i += threads) {
            runs[i] = run_filter_trial(setup, seed, i);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  MonteCarloSummary s = summarize(runs);
  s.seed = seed;
  s.mode = setup.mode;
  return s;
}

json to_json(const MonteCarloSummary& s) {
  json epochs = json::array();
  for (const auto& e : s.epochs) epochs.push_back(to_json(e));
  json agg = to_json(s.aggregate);
  agg.erase("t");
  return {{"schema", io::kSchemaVersion}, {"trials", s.trials},     {"seed", s.seed},
          {"mode", io::to_string(s.mode)}, {"aggregate", agg}, {"epochs", epochs}};
}

// dispatch ------------------------------------------------------------------

namespace {

json require_config(const CommandOptions& opts) {
  if (opts.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
  return io::load_config(opts.config);
}

}  // namespace

int cmd_paper_example(const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  const auto r = paper_example();
  out << format_report(r);
  if (!opts.output.empty()) io::write_artifact(io::resolve_output_path(opts.output), to_json(r).dump(2) + "\n", out);
  if (!r.passed) {
    log << "published estimate not reproduced within tolerance\n";
    throw Error(ErrorCode::GoldenMismatch, "max deviation " + io::format_number(r.max_deviation));
  }
  return kSuccess;
}

int cmd_determine(const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  const auto r = determine(require_config(opts));
  io::write_artifact(io::resolve_output_path(opts.output), to_json(r).dump(2) + "\n", out);
  log << "cost J0 = " << r.cost << ", stationarity residual = " << r.stationarity;
  if (r.principal_angle) log << ", principal angle vs truth = " << *r.principal_angle << " rad";
  log << '\n';
  return kSuccess;
}

int cmd_propagate(const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  const auto samples = run_propagate(require_config(opts));
  io::write_artifact(io::resolve_output_path(opts.output), propagate_csv(samples), out);
  const double e0 = samples.front().kinetic_energy;
  const double e1 = samples.back().kinetic_energy;
  log << "propagated to t = " << samples.back().state.t << "; kinetic energy " << e0 << " -> " << e1 << '\n';
  return kSuccess;
}

int cmd_filter(const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  const auto setup = parse_filter_setup(require_config(opts), opts);
  const auto rows = run_filter_trial(setup, setup.scenario.noise.seed, 0);
  io::write_artifact(io::resolve_output_path(opts.output), filter_csv(rows), out);
  const auto s = summarize({rows});
  log << io::to_string(setup.mode) << " filter, " << rows.size() << " epochs: mean attitude error "
      << s.aggregate.att_post.mean << " rad (max " << s.aggregate.att_post.max << "), mean omega error "
      << s.aggregate.omega_post.mean << " rad/s\n";
  return kSuccess;
}

int cmd_montecarlo(const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  const json cfg = require_config(opts);
  const auto setup = parse_filter_setup(cfg, opts);
  const int trials = opts.trials ? *opts.trials : cfg.value("trials", 1);
  const auto s = run_montecarlo(setup, trials, setup.scenario.noise.seed);
  io::write_artifact(io::resolve_output_path(opts.output), to_json(s).dump(2) + "\n", out);
  log << trials << " trials (" << io::to_string(setup.mode) << "): mean attitude error "
      << s.aggregate.att_post.mean << " rad, std " << s.aggregate.att_post.std << ", max "
      << s.aggregate.att_post.max << '\n';
  return kSuccess;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& log) {
  try {
    if (name == "paper-example") return cmd_paper_example(opts, out, log);
    if (name == "determine") return cmd_determine(opts, out, log);
    if (name == "propagate") return cmd_propagate(opts, out, log);
    if (name == "filter") return cmd_filter(opts, out, log);
    if (name == "montecarlo") return cmd_montecarlo(opts, out, log);
    log << "error: unknown command '" << name << "'\n";
    return kConfigError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    log << "error: ConfigError: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace so3est::cli
