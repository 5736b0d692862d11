#pragma once

// Rectifier bridge set-up with the published parameters, shared by the
// simulation tests and the acceptance run.

#include <vector>

#include "phasorctl/sim.hpp"

namespace fixture {

using namespace phasorctl;

struct Rectifier {
  Plant plant = rectifier_plant(RectifierParams{});
  PhasorConfig cfg{plant.sys.period, 5, 512};
  HarmonicBilinearModel model = harmonic_bilinear(plant.sys, cfg);
  EquilibriumResult eq = optimize_equilibrium(model, EquilibriumSpec{}, model.W());
  HarmonicController base = synthesize_feedback(
      model, eq, Eigen::Vector2d(1.0, 1e-2).asDiagonal().toDenseMatrix(), 1e-4, ControlBounds{});
};

inline const Rectifier& rectifier() {
  static const Rectifier r;
  return r;
}

inline ForwardingController no_integral() { return as_forwarding(rectifier().base); }

// gamma2 doubled: the cosine action's coefficients are gamma2 / 2
inline ForwardingController two_action() {
  const auto& r = rectifier();
  return synthesize_forwarding(r.model, r.base,
                               {{ActionKind::Integrator, 1, 0, 200.0}, {ActionKind::Cosine, 0, 1, 200.0}},
                               1e-7, 2e-9);
}

inline ForwardingController four_action() {
  const auto& r = rectifier();
  return synthesize_forwarding(r.model, r.base,
                               {{ActionKind::Integrator, 1, 0, 400.0},
                                {ActionKind::Cosine, 0, 1, 200.0},
                                {ActionKind::Oscillator, 0, 3, 1000.0},
                                {ActionKind::Oscillator, 0, 5, 2000.0}},
                               4e-8, 4e-10);
}

inline constexpr double kOnset = 0.04;

/// v_in,p = 10 sin(wt) + 20 sin(3wt) + 20 sin(5wt), i_p = 20 cos(2wt) - 20 sin(4wt)
inline std::vector<Disturbance> disturbances() {
  Disturbance v{kOnset, DisturbanceChannel::InputVoltage, {{1, 10.0, 0.0}, {3, 20.0, 0.0}, {5, 20.0, 0.0}}};
  Disturbance i{kOnset, DisturbanceChannel::LoadCurrent, {{2, 0.0, 20.0}, {4, -20.0, 0.0}}};
  return {v, i};
}

inline Scenario scenario(const std::string& name, double duration, bool disturbed) {
  Scenario s;
  s.name = name;
  s.duration = duration;
  s.initial_state = Eigen::Vector2d::Zero();
  if (disturbed) s.disturbances = disturbances();
  return s;
}

inline bool in_band(const Metrics& m) { return m.v_dc_mean >= 180.0 && m.v_dc_mean <= 220.0; }
inline bool in_phase(const Metrics& m) { return std::abs(m.current_phase_error) <= 0.1; }

}  // namespace fixture
