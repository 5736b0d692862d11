#pragma once

// Fixed-step closed-loop simulation of bilinear affine plants, disturbance
// injection, sliding phasor monitoring and run metrics.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasorctl/control.hpp"

namespace phasorctl {

struct RectifierParams {
  double R = 1e-3;    // ohm
  double L = 1e-3;    // henry
  double C = 4e-3;    // farad
  double R_L = 10.0;  // ohm
  double v_in_amplitude = 100.0;  // volt
  double f = 50.0;    // hertz

  void validate() const;
};

/// Plant with an extra direct-injection channel for load current
/// disturbances (dx/dt += load_gain * i_p).
struct Plant {
  BilinearAffineSystem sys;
  Eigen::VectorXd load_gain;
};

/// State (i, v_dc); w = v_in = A sin(wt); bounds [-1, 1].
BilinearAffineSystem build_rectifier(const RectifierParams& params);
Plant rectifier_plant(const RectifierParams& params);

enum class DisturbanceChannel { InputVoltage, LoadCurrent };

std::string channel_name(DisturbanceChannel c);
DisturbanceChannel channel_from_name(const std::string& name);

/// sum_k a_k sin(k w t) + b_k cos(k w t), active from start_time on.
struct Disturbance {
  struct Term {
    int k = 1;
    double sin = 0.0;
    double cos = 0.0;
  };
  double start_time = 0.0;
  DisturbanceChannel channel = DisturbanceChannel::InputVoltage;
  std::vector<Term> terms;

  double value(double t, double omega) const;
};

struct Scenario {
  std::string name;
  double duration = 0.0;
  int steps_per_period = 2048;
  Eigen::VectorXd initial_state;
  Eigen::VectorXd initial_bank;  // empty means zero
  std::vector<Disturbance> disturbances;
  bool record_phasors = false;
  bool saturate = true;
  /// Apply s = s^e(t) without feedback (equilibrium playback).
  bool open_loop = false;

  void validate(double period, int samples_per_period) const;
};

struct Metrics {
  double v_dc_mean = 0.0;
  std::vector<double> current_harmonics;  // |I_k|, k = 0..h, final window
  std::vector<double> voltage_harmonics;  // |V_k|
  double current_phase_error = 0.0;       // arg I_1 - arg V_in,1
  double settling_time = 0.0;
  PhasorVector final_phasors;             // state phasors of the final window
  cplx input_phasor = 0.0;                // V_in,1 of the final window
};

struct SimTrace {
  double period = 0.0;
  int steps_per_period = 0;
  std::vector<double> times;
  SampledSignal x;               // plant state
  RowMatrixXd z;                 // bank state, q x samples
  std::vector<double> s_pre;
  std::vector<double> s_post;
  std::vector<double> alpha;
  std::vector<double> input;     // total w(t) including disturbances
  std::vector<double> lyapunov;  // instantaneous functional
  std::vector<double> windowed;  // (1/T) integral over the last period; NaN before
  /// Functional evaluated at x = 0 and averaged over a period; sets the
  /// numerical noise floor of the settling test.
  double functional_scale = 0.0;
  std::optional<PhasorTrajectory> phasors;
  Metrics metrics;

  std::size_t size() const { return times.size(); }
};

/// RK4 with step T/steps_per_period; the control is evaluated inside every
/// stage and saturated toward s^e. Throws Divergence on non-finite states.
SimTrace simulate(const Plant& plant, const ForwardingController& ctrl, const Scenario& scenario,
                  const PhasorConfig& monitor);

using ControlFn = std::function<double(double t, const Eigen::VectorXd& x)>;

/// Same integrator under an arbitrary control law; no Lyapunov functional.
SimTrace simulate_open_loop(const Plant& plant, const ControlFn& law, const Scenario& scenario,
                            const PhasorConfig& monitor);

Metrics compute_metrics(const SimTrace& trace, int truncation, int current_index = 0,
                        int voltage_index = 1);

struct MonotonicityReport {
  double max_increase = 0.0;  // largest step increase of the windowed functional
  double reference = 0.0;     // functional at the start of the checked range
  std::size_t steps = 0;
  bool ok = false;
};

/// Checks v(t_{i+1}) - v(t_i) <= rel_tol * v(t_from) for t_from <= t_i < t_to.
MonotonicityReport check_monotone(const SimTrace& trace, double t_from, double t_to,
                                  double rel_tol = 1e-6);

}  // namespace phasorctl
