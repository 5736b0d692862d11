#include "phasorctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "phasorctl/errors.hpp"

namespace phasorctl {

void RectifierParams::validate() const {
  require(R > 0 && L > 0 && C > 0 && R_L > 0 && v_in_amplitude > 0 && f > 0,
          ErrorCode::Parameter, "rectifier parameters must be strictly positive");
}

BilinearAffineSystem build_rectifier(const RectifierParams& p) {
  p.validate();
  BilinearAffineSystem sys;
  sys.A_ind.resize(2, 2);
  sys.A_ind << -p.R / p.L, 0.0, 0.0, -1.0 / (p.R_L * p.C);
  sys.A_dep.resize(2, 2);
  sys.A_dep << 0.0, -1.0 / p.L, 1.0 / p.C, 0.0;
  sys.B_ind.resize(2, 1);
  sys.B_ind << 1.0 / p.L, 0.0;
  sys.B_dep = Eigen::MatrixXd::Zero(2, 1);
  sys.bounds = {-1.0, 1.0};
  sys.period = 1.0 / p.f;
  // v_in = A sin(wt): W_1 = -jA/2, W_-1 = +jA/2
  sys.w = PhasorVector(1, 1);
  sys.w.at(1)[0] = cplx(0.0, -0.5 * p.v_in_amplitude);
  sys.w.at(-1)[0] = cplx(0.0, 0.5 * p.v_in_amplitude);
  return sys;
}

Plant rectifier_plant(const RectifierParams& p) {
  Plant plant;
  plant.sys = build_rectifier(p);
  plant.load_gain = Eigen::Vector2d(0.0, 1.0 / p.C);
  return plant;
}

std::string channel_name(DisturbanceChannel c) {
  return c == DisturbanceChannel::InputVoltage ? "input_voltage" : "load_current";
}

DisturbanceChannel channel_from_name(const std::string& name) {
  if (name == "input_voltage") return DisturbanceChannel::InputVoltage;
  if (name == "load_current") return DisturbanceChannel::LoadCurrent;
  fail(ErrorCode::Parameter, "unknown disturbance channel '" + name + "'");
}

double Disturbance::value(double t, double omega) const {
  if (t < start_time) return 0.0;
  double v = 0.0;
  for (const auto& term : terms) {
    v += term.sin * std::sin(term.k * omega * t) + term.cos * std::cos(term.k * omega * t);
  }
  return v;
}

void Scenario::validate(double period, int samples_per_period) const {
  require(duration >= 3.0 * period * (1.0 - 1e-12), ErrorCode::Parameter,
          "scenario duration must cover at least three periods");
  require(steps_per_period >= samples_per_period, ErrorCode::Parameter,
          "steps_per_period must be at least samples_per_period");
  require(steps_per_period % samples_per_period == 0, ErrorCode::Parameter,
          "steps_per_period must be a multiple of samples_per_period");
}

namespace {

struct Law {
  const ForwardingController* ctrl = nullptr;
  const ControlFn* fn = nullptr;
};

struct ControlValue {
  double pre = 0.0;
  double post = 0.0;
  double alpha = 1.0;
};

SimTrace run(const Plant& plant, const Law& law, const Scenario& sc, const PhasorConfig& monitor) {
  const auto& sys = plant.sys;
  sys.validate();
  const double period = sys.period;
  monitor.validate();
  require(std::abs(monitor.period - period) <= 1e-12 * period, ErrorCode::Configuration,
          "monitor period differs from plant period");
  sc.validate(period, monitor.samples_per_period);
  const int n = sys.n();
  require(sc.initial_state.size() == n, ErrorCode::DimensionMismatch,
          "initial state dimension mismatch");
  const int q = law.ctrl ? law.ctrl->bank_states() : 0;
  require(sc.initial_bank.size() == 0 || sc.initial_bank.size() == q,
          ErrorCode::DimensionMismatch, "initial bank state dimension mismatch");
  require(plant.load_gain.size() == 0 || plant.load_gain.size() == n,
          ErrorCode::DimensionMismatch, "load gain dimension mismatch");

  const int spp = sc.steps_per_period;
  const double dt = period / spp;
  const long steps = std::lround(sc.duration / dt);
  const double omega = 2.0 * std::numbers::pi / period;

  auto input_at = [&](double t) {
    double w = sys.w_at(t)[0];
    for (const auto& d : sc.disturbances) {
      if (d.channel == DisturbanceChannel::InputVoltage) w += d.value(t, omega);
    }
    return w;
  };
  auto load_at = [&](double t) {
    double v = 0.0;
    for (const auto& d : sc.disturbances) {
      if (d.channel == DisturbanceChannel::LoadCurrent) v += d.value(t, omega);
    }
    return v;
  };
  auto control = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    ControlValue c;
    if (law.ctrl) {
      const double se = law.ctrl->base.s_e_t(t)(0, 0);
      c.pre = sc.open_loop ? se : eval_control(*law.ctrl, t, x, z);
      if (sc.saturate) {
        auto s = saturate(c.pre, se, sys.bounds);
        c.post = s.s;
        c.alpha = s.alpha;
      } else {
        c.post = c.pre;
      }
    } else {
      c.pre = (*law.fn)(t, x);
      c.post = sc.saturate ? std::clamp(c.pre, sys.bounds.lo, sys.bounds.hi) : c.pre;
    }
    return c;
  };
  auto rhs = [&](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd x = y.head(n);
    Eigen::VectorXd z = y.tail(q);
    const double s = control(t, x, z).post;
    Eigen::VectorXd dy(n + q);
    const double w = input_at(t);
    dy.head(n) = (sys.A_ind + s * sys.A_dep) * x + (sys.B_ind + s * sys.B_dep).col(0) * w;
    if (plant.load_gain.size() == n) dy.head(n) += plant.load_gain * load_at(t);
    if (q > 0) dy.tail(q) = bank_rhs(*law.ctrl, t, x, z);
    return dy;
  };

  SimTrace tr;
  tr.period = period;
  tr.steps_per_period = spp;
  const auto count = static_cast<int>(steps + 1);
  tr.x = SampledSignal(n, 0.0, dt, count, true);
  tr.z = RowMatrixXd::Zero(q, count);
  tr.times.resize(count);
  tr.s_pre.resize(count);
  tr.s_post.resize(count);
  tr.alpha.resize(count);
  tr.input.resize(count);
  tr.lyapunov.assign(count, std::numeric_limits<double>::quiet_NaN());
  tr.windowed.assign(count, std::numeric_limits<double>::quiet_NaN());

  const int decim = spp / monitor.samples_per_period;
  std::optional<SlidingDecomposer> mon;
  if (sc.record_phasors) {
    mon.emplace(n, monitor);
    tr.phasors = PhasorTrajectory{monitor, {}, {}};
  }

  Eigen::VectorXd y(n + q);
  y.head(n) = sc.initial_state;
  if (q > 0) y.tail(q) = sc.initial_bank.size() ? sc.initial_bank : Eigen::VectorXd::Zero(q);

  double running = 0.0;  // sum of the functional over the trailing window
  auto record = [&](long i, double t) {
    Eigen::VectorXd x = y.head(n);
    Eigen::VectorXd z = y.tail(q);
    auto c = control(t, x, z);
    tr.times[i] = t;
    tr.x.set(static_cast<int>(i), x);
    if (q > 0) tr.z.col(i) = z;
    tr.s_pre[i] = c.pre;
    tr.s_post[i] = c.post;
    tr.alpha[i] = c.alpha;
    tr.input[i] = input_at(t);
    if (law.ctrl) {
      const double l = lyapunov_value(*law.ctrl, t, x, z);
      tr.lyapunov[i] = l;
      running += l;
      if (i > spp) running -= tr.lyapunov[i - spp - 1];
      if (i >= spp) {
        tr.windowed[i] = (running - 0.5 * (tr.lyapunov[i - spp] + l)) / spp;
      }
    }
    if (mon && i % decim == 0) {
      mon->push(t, x);
      if (mon->ready()) {
        tr.phasors->times.push_back(t);
        tr.phasors->values.push_back(mon->phasors());
      }
    }
  };

  if (law.ctrl) {
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < spp; ++i) tr.functional_scale += lyapunov_value(*law.ctrl, i * dt, x0, z0);
    tr.functional_scale /= spp;
  }

  record(0, 0.0);
  for (long i = 0; i < steps; ++i) {
    const double t = i * dt;
    Eigen::VectorXd k1 = rhs(t, y);
    Eigen::VectorXd k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
    Eigen::VectorXd k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
    Eigen::VectorXd k4 = rhs(t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e12) {
      std::ostringstream os;
      os << "simulation diverged after t = " << t;
      fail(ErrorCode::Divergence, os.str());
    }
    record(i + 1, (i + 1) * dt);
  }

  if (sc.duration >= 2.0 * period) tr.metrics = compute_metrics(tr, monitor.truncation);
  return tr;
}

}  // namespace

SimTrace simulate(const Plant& plant, const ForwardingController& ctrl, const Scenario& scenario,
                  const PhasorConfig& monitor) {
  require(std::abs(ctrl.base.config.period - plant.sys.period) <= 1e-12 * plant.sys.period,
          ErrorCode::Configuration, "controller was synthesised for another period");
  require(static_cast<int>(ctrl.base.A_dep.rows()) == plant.sys.n(), ErrorCode::DimensionMismatch,
          "controller was synthesised for another plant");
  return run(plant, Law{&ctrl, nullptr}, scenario, monitor);
}

SimTrace simulate_open_loop(const Plant& plant, const ControlFn& law, const Scenario& scenario,
                            const PhasorConfig& monitor) {
  return run(plant, Law{nullptr, &law}, scenario, monitor);
}

Metrics compute_metrics(const SimTrace& tr, int truncation, int current_index,
                        int voltage_index) {
  const int spp = tr.steps_per_period;
  const int count = static_cast<int>(tr.size());
  if (count < 2 * spp + 1) {
    std::ostringstream os;
    os << "trace too short for metrics: " << count << " samples, need " << 2 * spp + 1;
    fail(ErrorCode::TraceTooShort, os.str());
  }
  require(current_index < tr.x.dim() && voltage_index < tr.x.dim(), ErrorCode::Parameter,
          "metric state index out of range");
  PhasorConfig cfg{tr.period, truncation, spp};
  Metrics m;
  m.final_phasors = decompose_window(tr.x, cfg, count - 1);
  SampledSignal in(1, tr.x.t0(), tr.x.dt(), count, true);
  for (int i = 0; i < count; ++i) in.set(i, Eigen::VectorXd(Eigen::VectorXd::Constant(1, tr.input[i])));
  m.input_phasor = truncation >= 1 ? decompose_window(in, cfg, count - 1).at(1)[0] : cplx(0.0);

  m.v_dc_mean = m.final_phasors.at(0)[voltage_index].real();
  for (int k = 0; k <= truncation; ++k) {
    m.current_harmonics.push_back(std::abs(m.final_phasors.at(k)[current_index]));
    m.voltage_harmonics.push_back(std::abs(m.final_phasors.at(k)[voltage_index]));
  }
  if (truncation >= 1) {
    double d = std::arg(m.final_phasors.at(1)[current_index]) - std::arg(m.input_phasor);
    m.current_phase_error = std::remainder(d, 2.0 * std::numbers::pi);
  }

  // settling: first instant after which the windowed functional stays within
  // 1% of its final value, the band widened to 1% of the excursion when the
  // final value is near zero and never narrower than the rounding floor
  if (!std::isnan(tr.windowed[count - 1])) {
    const double vf = tr.windowed[count - 1];
    double excursion = 0.0;
    for (int i = spp; i < count; ++i) excursion = std::max(excursion, std::abs(tr.windowed[i] - vf));
    const double band =
        std::max(0.01 * std::max(std::abs(vf), excursion), 1e-8 * tr.functional_scale);
    int first = count - 1;
    for (int i = count - 1; i >= spp; --i) {
      if (std::abs(tr.windowed[i] - vf) > band) break;
      first = i;
    }
    m.settling_time = first == spp ? 0.0 : tr.times[first] - tr.times[0];
  }
  return m;
}

MonotonicityReport check_monotone(const SimTrace& tr, double t_from, double t_to, double rel_tol) {
  MonotonicityReport rep;
  const std::size_t spp = tr.steps_per_period;
  bool have_ref = false;
  for (std::size_t i = spp; i + 1 < tr.size(); ++i) {
    if (tr.times[i] < t_from - 1e-12 || tr.times[i + 1] > t_to + 1e-12) continue;
    if (std::isnan(tr.windowed[i]) || std::isnan(tr.windowed[i + 1])) continue;
    if (!have_ref) {
      rep.reference = tr.windowed[i];
      rep.max_increase = -std::numeric_limits<double>::infinity();
      have_ref = true;
    }
    rep.max_increase = std::max(rep.max_increase, tr.windowed[i + 1] - tr.windowed[i]);
    ++rep.steps;
  }
  rep.ok = have_ref && rep.max_increase <= rel_tol * rep.reference;
  return rep;
}

}  // namespace phasorctl
