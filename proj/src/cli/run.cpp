#include "phasorctl/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"

namespace phasorctl::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (category_of(code)) {
    case ErrorCategory::Validation: return kExitValidation;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Io: return kExitIo;
  }
  return kExitNumerical;
}

json error_json(const Error& e) {
  const char* category = e.category() == ErrorCategory::Validation  ? "validation"
                         : e.category() == ErrorCategory::Numerical ? "numerical"
                                                                    : "io";
  return {{"error",
           {{"code", std::string(code_name(e.code()))}, {"category", category}, {"message", e.what()}}}};
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PhasorConfig grid_from(Node& node) {
  PhasorConfig c{node.get<double>("period"), node.get("h", 5), node.get("N", 512)};
  c.validate();
  return c;
}

ToeplitzOperator operator_of(const PeriodicSpec& spec, const PhasorConfig& cfg) {
  const double w = cfg.omega();
  return toeplitz_of([&](double t) -> Eigen::MatrixXcd { return spec.at(t, w).cast<cplx>(); }, cfg);
}

RetoeplitzMode mode_from(Node& node) {
  const auto m = node.get<std::string>("retoeplitz", "central");
  if (m == "central") return RetoeplitzMode::Central;
  if (m == "average") return RetoeplitzMode::Average;
  fail(ErrorCode::Configuration, "retoeplitz must be 'central' or 'average'");
}

void cmd_decompose(Node& node, const RunOptions& opt, std::ostream& out) {
  const PhasorConfig cfg = grid_from(node);
  const auto input = node.get<std::string>("input");
  const auto output = node.get<std::string>("output", "phasors.json");
  node.finish();
  const SampledSignal sig = io::signal_from_csv(io::read_text(input));
  const PhasorTrajectory traj = decompose(sig, cfg);
  const auto coincidence = coincidence_residual(traj);
  io::write_atomic(opt.out_dir / output, io::dump(io::to_json(traj)));
  out << "decompose: " << traj.size() << " windows, h=" << cfg.truncation
      << ", coincidence residual=" << fmt(coincidence.max) << "\n";
}

void cmd_reconstruct(Node& node, const RunOptions& opt, std::ostream& out) {
  const auto input = node.get<std::string>("input");
  const auto mode_name = node.get<std::string>("mode", "causal");
  const auto output = node.get<std::string>("output", "reconstructed.csv");
  ReconstructionMode mode = reconstruction::Causal{};
  if (mode_name == "noncausal") {
    mode = reconstruction::NonCausal{node.get<double>("offset")};
  } else if (mode_name == "twosided") {
    reconstruction::TwoSided m;
    if (node.has("seed")) m.seed = io::signal_from_csv(io::read_text(node.get<std::string>("seed")));
    mode = m;
  } else {
    require(mode_name == "causal", ErrorCode::Configuration,
            "mode must be 'causal', 'noncausal' or 'twosided'");
  }
  node.finish();
  const PhasorTrajectory traj = io::trajectory_from_json(io::read_json(input));
  SampledSignal x = reconstruct(traj, mode);
  if (!x.is_real()) x = x.to_real(1e-9 * (1.0 + x.re().cwiseAbs().maxCoeff()));
  io::write_atomic(opt.out_dir / output, io::signal_csv(x));
  out << "reconstruct: " << x.count() << " samples (" << mode_name << ")\n";
}

json structure_json(const StructureReport& r) {
  return {{"hermitian", r.hermitian},
          {"positive_definite", r.positive_definite},
          {"toeplitz_defect", r.toeplitz_defect},
          {"min_eigenvalue", r.min_eigenvalue}};
}

void cmd_lyap(Node& node, const RunOptions& opt, std::ostream& out) {
  const PhasorConfig cfg = grid_from(node);
  const auto A = periodic_from_json(node.raw("A"), node.child_path("A"));
  const auto Q = periodic_from_json(node.raw("Q"), node.child_path("Q"));
  const auto mode = mode_from(node);
  const auto output = node.get<std::string>("output", "lyap.json");
  node.finish();
  require(A.rows() == A.cols() && Q.rows() == A.rows() && Q.cols() == A.rows(),
          ErrorCode::DimensionMismatch, "A and Q must be square of equal size");
  const Eigen::MatrixXcd drift =
      operator_of(A, cfg).dense() - n_operator(cfg, static_cast<int>(A.rows()));
  const auto sol = solve_lyapunov(drift, operator_of(Q, cfg), mode);
  const double margin = hurwitz_margin(drift);
  json j = {{"P", io::to_json(sol.P)},
            {"report",
             {{"residual", sol.residual},
              {"defect", sol.defect},
              {"hurwitz_margin", margin},
              {"structure", structure_json(check_structure(sol.P))}}}};
  io::write_atomic(opt.out_dir / output, io::dump(j));
  out << "lyap: residual=" << fmt(sol.residual) << " defect=" << fmt(sol.defect)
      << " hurwitz_margin=" << fmt(margin) << "\n";
}

void cmd_riccati(Node& node, const RunOptions& opt, std::ostream& out) {
  const PhasorConfig cfg = grid_from(node);
  const auto A = periodic_from_json(node.raw("A"), node.child_path("A"));
  const auto B = periodic_from_json(node.raw("B"), node.child_path("B"));
  const auto Q = periodic_from_json(node.raw("Q"), node.child_path("Q"));
  const auto R = periodic_from_json(node.raw("R"), node.child_path("R"));
  RiccatiOptions ro;
  ro.mode = mode_from(node);
  ro.max_iterations = node.get("max_iterations", ro.max_iterations);
  ro.tolerance = node.get("tolerance", ro.tolerance);
  const auto output = node.get<std::string>("output", "riccati.json");
  node.finish();
  require(A.rows() == A.cols() && B.rows() == A.rows() && Q.rows() == A.rows() &&
              R.rows() == B.cols() && R.rows() == R.cols(),
          ErrorCode::DimensionMismatch, "A, B, Q, R shapes are inconsistent");
  const Eigen::MatrixXcd drift =
      operator_of(A, cfg).dense() - n_operator(cfg, static_cast<int>(A.rows()));
  const auto sol = solve_riccati(drift, operator_of(B, cfg), operator_of(Q, cfg),
                                 operator_of(R, cfg), cfg, ro);
  json j = {{"P", io::to_json(sol.P.P)},
            {"K", io::to_json(sol.K)},
            {"report",
             {{"residual", sol.residual},
              {"defect", sol.P.defect},
              {"gain_defect", sol.gain_defect},
              {"closed_loop_margin", sol.margin},
              {"iterations", sol.iterations}}}};
  io::write_atomic(opt.out_dir / output, io::dump(j));
  out << "riccati: residual=" << fmt(sol.residual) << " iterations=" << sol.iterations
      << " closed_loop_margin=" << fmt(sol.margin) << "\n";
}

void cmd_sylvester(Node& node, const RunOptions& opt, std::ostream& out) {
  const PhasorConfig cfg = grid_from(node);
  const auto O = periodic_from_json(node.raw("O"), node.child_path("O"));
  const auto A = periodic_from_json(node.raw("A"), node.child_path("A"));
  const auto LC = periodic_from_json(node.raw("LC"), node.child_path("LC"));
  const auto mode = mode_from(node);
  const auto output = node.get<std::string>("output", "sylvester.json");
  node.finish();
  const int q = static_cast<int>(O.rows());
  const int n = static_cast<int>(A.rows());
  require(O.cols() == q && A.cols() == n && LC.rows() == q && LC.cols() == n,
          ErrorCode::DimensionMismatch, "O, A, LC shapes are inconsistent");
  const auto sol = solve_sylvester(operator_of(O, cfg).dense() - n_operator(cfg, q),
                                   operator_of(A, cfg).dense() - n_operator(cfg, n),
                                   operator_of(LC, cfg).dense());
  const auto rt = retoeplitz(sol.M, q, n, cfg.truncation, cfg.period, mode);
  json j = {{"M", io::to_json(rt.op)},
            {"report", {{"residual", sol.residual}, {"defect", rt.defect}, {"min_gap", sol.min_gap}}}};
  io::write_atomic(opt.out_dir / output, io::dump(j));
  out << "sylvester: residual=" << fmt(sol.residual) << " min_gap=" << fmt(sol.min_gap) << "\n";
}

struct Pipeline {
  Plant plant;
  HarmonicBilinearModel model;
  EquilibriumResult eq;
};

Pipeline equilibrium_of(const SynthesisSpec& s) {
  Pipeline p{rectifier_plant(s.plant), {}, {}};
  p.model = HarmonicBilinearModel(p.plant.sys, s.config());
  p.eq = optimize_equilibrium(p.model, s.equilibrium, p.model.W());
  return p;
}

json equilibrium_report(const EquilibriumResult& eq, int voltage_index) {
  json j = io::to_json(eq);
  j["V_dc0"] = eq.X.at(0)[voltage_index].real();
  return j;
}

void cmd_equilibrium(Node& node, const RunOptions& opt, std::ostream& out) {
  const SynthesisSpec s = synthesis_from_node(node);
  const auto output = node.get<std::string>("output", "equilibrium.json");
  node.finish();
  const Pipeline p = equilibrium_of(s);
  io::write_atomic(opt.out_dir / output,
                   io::dump(equilibrium_report(p.eq, s.equilibrium.voltage_index)));
  out << "equilibrium: J*=" << fmt(p.eq.J)
      << " V_dc0=" << fmt(p.eq.X.at(0)[s.equilibrium.voltage_index].real())
      << " residual=" << fmt(p.eq.residual) << " converged=" << (p.eq.converged ? "yes" : "no")
      << "\n";
}

ForwardingController controller_of(const SynthesisSpec& s, const Pipeline& p) {
  require(p.eq.within_bounds, ErrorCode::Precondition,
          "optimised equilibrium control leaves the control bounds");
  Eigen::MatrixXd Q = s.q_diag.asDiagonal();
  auto base = synthesize_feedback(p.model, p.eq, Q, s.gamma, p.plant.sys.bounds);
  return s.bank.empty() ? as_forwarding(base)
                        : synthesize_forwarding(p.model, base, s.bank, s.eta1, s.eta2);
}

void cmd_synthesize(Node& node, const RunOptions& opt, std::ostream& out) {
  const SynthesisSpec s = synthesis_from_node(node);
  const auto output = node.get<std::string>("output", "controller.json");
  node.finish();
  const Pipeline p = equilibrium_of(s);
  const auto ctrl = controller_of(s, p);
  io::write_atomic(opt.out_dir / output, io::dump(io::to_json(ctrl)));
  out << "synthesize: lyapunov residual=" << fmt(ctrl.base.lyapunov_residual)
      << " hurwitz_margin=" << fmt(ctrl.base.hurwitz_margin) << " bank=" << ctrl.bank.size();
  if (ctrl.has_bank()) out << " sylvester residual=" << fmt(ctrl.sylvester_residual);
  out << "\n";
}

void cmd_simulate(Node& node, const RunOptions& opt, std::ostream& out) {
  ForwardingController ctrl;
  Plant plant;
  if (node.has("controller")) {
    // reuse an exported bundle; only the plant parameters are read here
    const auto path = node.get<std::string>("controller");
    RectifierParams params;
    if (node.has("plant")) params = plant_from_json(node.raw("plant"), node.child_path("plant"));
    plant = rectifier_plant(params);
    ctrl = io::controller_from_json(io::read_json(path));
  } else {
    const SynthesisSpec s = synthesis_from_node(node);
    const Pipeline p = equilibrium_of(s);
    ctrl = controller_of(s, p);
    plant = p.plant;
    io::write_atomic(opt.out_dir / "controller.json", io::dump(io::to_json(ctrl)));
  }
  std::vector<Scenario> scenarios;
  for (const auto& sc : node.raw("scenarios")) {
    scenarios.push_back(scenario_from_json(sc, node.child_path("scenarios"), plant.sys.n()));
  }
  node.finish();
  require(!scenarios.empty(), ErrorCode::Configuration, "no scenarios to simulate");
  const PhasorConfig monitor = ctrl.base.config;

  // independent scenarios run concurrently; output order follows the config
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs = opt.jobs > 0 ? static_cast<std::size_t>(opt.jobs) : hw;
  std::vector<std::future<SimTrace>> pending(scenarios.size());
  std::vector<SimTrace> traces(scenarios.size());
  for (std::size_t start = 0; start < scenarios.size(); start += jobs) {
    const std::size_t stop = std::min(scenarios.size(), start + jobs);
    for (std::size_t i = start; i < stop; ++i) {
      pending[i] = std::async(std::launch::async,
                              [&, i] { return simulate(plant, ctrl, scenarios[i], monitor); });
    }
    for (std::size_t i = start; i < stop; ++i) traces[i] = pending[i].get();
  }

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& sc = scenarios[i];
    const auto& tr = traces[i];
    const auto mono = check_monotone(tr, tr.period, tr.times.back());
    json metrics = io::to_json(tr.metrics);
    metrics["scenario"] = sc.name;
    metrics["saturated_steps"] = std::count_if(tr.alpha.begin(), tr.alpha.end(), [](double a) { return a < 1.0; });
    metrics["functional_max_increase"] = mono.max_increase;
    metrics["functional_reference"] = mono.reference;
    io::write_atomic(opt.out_dir / (sc.name + ".csv"), io::trace_csv(tr));
    io::write_atomic(opt.out_dir / (sc.name + "_metrics.json"), io::dump(metrics));
    if (tr.phasors) {
      io::write_atomic(opt.out_dir / (sc.name + "_phasors.json"), io::dump(io::to_json(*tr.phasors)));
    }
    out << "simulate " << sc.name << ": v_dc_mean=" << fmt(tr.metrics.v_dc_mean)
        << " phase_error=" << fmt(tr.metrics.current_phase_error)
        << " settling_time=" << fmt(tr.metrics.settling_time) << "\n";
  }
}

void cmd_report(Node& node, const RunOptions& opt, std::ostream& out) {
  const auto files = node.get<std::vector<std::string>>("metrics");
  const double v_ref = node.get("v_ref", 200.0);
  const double band = node.get("band", 0.1);
  const double phase_tol = node.get("phase_tolerance", 0.1);
  const auto output = node.get<std::string>("output", "report.json");
  node.finish();
  json rows = json::array();
  int passed = 0;
  for (const auto& f : files) {
    const json m = io::read_json(f);
    const double v = m.at("v_dc_mean").get<double>();
    const double ph = m.at("current_phase_error").get<double>();
    const bool in_band = std::abs(v - v_ref) <= band * v_ref;
    const bool phase_ok = std::abs(ph) <= phase_tol;
    passed += in_band && phase_ok;
    rows.push_back({{"file", f},
                    {"v_dc_mean", v},
                    {"current_phase_error", ph},
                    {"in_band", in_band},
                    {"phase_ok", phase_ok}});
  }
  io::write_atomic(opt.out_dir / output, io::dump({{"v_ref", v_ref}, {"band", band},
                                                   {"phase_tolerance", phase_tol}, {"runs", rows}}));
  out << "report: " << passed << "/" << files.size() << " runs meet both objectives\n";
}

}  // namespace

void run(const std::string& command, const json& config, const RunOptions& options,
         std::ostream& out) {
  Node node(config, command);
  if (node.has("out_dir")) node.raw("out_dir");  // resolved by the caller
  if (command == "decompose") return cmd_decompose(node, options, out);
  if (command == "reconstruct") return cmd_reconstruct(node, options, out);
  if (command == "lyap") return cmd_lyap(node, options, out);
  if (command == "riccati") return cmd_riccati(node, options, out);
  if (command == "sylvester") return cmd_sylvester(node, options, out);
  if (command == "equilibrium") return cmd_equilibrium(node, options, out);
  if (command == "synthesize") return cmd_synthesize(node, options, out);
  if (command == "simulate") return cmd_simulate(node, options, out);
  if (command == "report") return cmd_report(node, options, out);
  fail(ErrorCode::Configuration, "unknown command '" + command + "'");
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic-domain analysis and control of periodic systems"};
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_flag;
  int jobs = 0;
  std::optional<int> h, N, spp;
  std::optional<double> duration;
  app.add_option("command", command,
                 "decompose | reconstruct | lyap | riccati | sylvester | equilibrium | "
                 "synthesize | simulate | report")
      ->required();
  app.add_option("config", config_path, "JSON config file");
  app.add_option("--set", sets, "override a config entry, key.path=value");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--jobs", jobs, "parallel scenarios (simulate)");
  app.add_option("--truncation", h, "truncation order h");
  app.add_option("--samples-per-period", N, "quadrature samples per period N");
  app.add_option("--steps-per-period", spp, "integrator steps per period for every scenario");
  app.add_option("--duration", duration, "duration of every scenario in seconds");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_json(Error(ErrorCode::Configuration, e.what())).dump() << "\n";
    return kExitValidation;
  }

  try {
    json config = config_path.empty() ? json::object() : io::read_json(config_path);
    require(config.is_object(), ErrorCode::Configuration, "config must be a JSON object");
    if (h) config["h"] = *h;
    if (N) config["N"] = *N;
    if ((spp || duration) && config.contains("scenarios") && config["scenarios"].is_array()) {
      for (auto& sc : config["scenarios"]) {
        if (spp) sc["steps_per_period"] = *spp;
        if (duration) sc["duration"] = *duration;
      }
    }
    for (const auto& s : sets) apply_override(config, s);

    RunOptions opt;
    opt.jobs = jobs;
    if (config.contains("out_dir")) opt.out_dir = config["out_dir"].get<std::string>();
    if (const char* env = std::getenv("PHASORCTL_OUT_DIR"); env && *env) opt.out_dir = env;
    if (!out_flag.empty()) opt.out_dir = out_flag;
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + opt.out_dir.string() + ": " + ec.message());
    run(command, config, opt, out);
    return kExitOk;
  } catch (const Error& e) {
    err << error_json(e).dump() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    const Error wrapped(ErrorCode::Io, e.what());
    err << error_json(wrapped).dump() << "\n";
    return kExitIo;
  } catch (const json::exception& e) {
    const Error wrapped(ErrorCode::Configuration, e.what());
    err << error_json(wrapped).dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorCode::Numerical, e.what());
    err << error_json(wrapped).dump() << "\n";
    return kExitNumerical;
  }
}

}  // namespace phasorctl::cli
