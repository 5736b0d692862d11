#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasorctl/errors.hpp"
#include "phasorctl/model.hpp"
#include "phasorctl/sim.hpp"

using namespace phasorctl;

namespace {

PhasorVector scalar_phasors(int h, std::initializer_list<std::pair<int, cplx>> terms) {
  PhasorVector s(1, h);
  for (auto [k, v] : terms) {
    s.at(k)[0] = v;
    if (k != 0) s.at(-k)[0] = std::conj(v);
  }
  return s;
}

}  // namespace

TEST_CASE("LTV model of a constant system", "[model]") {
  PhasorConfig cfg{0.02, 1, 64};
  Eigen::MatrixXcd a(2, 2), b(2, 1);
  a << -1, 2, 0, -3;
  b << 1, 0.5;
  LTPSystem sys{0.02, MatrixSamples::sample([&](double) { return a; }, cfg),
                MatrixSamples::sample([&](double) { return b; }, cfg)};
  auto m = harmonic_ltv(sys, cfg);
  const cplx jw(0, cfg.omega());
  for (int k = -1; k <= 1; ++k) {
    const int r = 2 * (k + 1);
    Eigen::MatrixXcd expected = a - jw * static_cast<double>(k) * Eigen::MatrixXcd::Identity(2, 2);
    CHECK((m.drift.block(r, r, 2, 2) - expected).norm() < 1e-12);
    CHECK((m.input.block(r, k + 1, 2, 1) - b).norm() < 1e-12);
  }
  CHECK(m.drift.norm() == Catch::Approx(std::sqrt(3 * 14.0 + 2 * 2 * std::norm(jw))).epsilon(1e-12));
}

TEST_CASE("bilinear model with constant control", "[model]") {
  auto sys = build_rectifier(RectifierParams{});
  PhasorConfig cfg{sys.period, 5, 512};
  auto model = harmonic_bilinear(sys, cfg);
  auto zero = control_operator(PhasorVector(1, 5), sys.period);
  CHECK((model.A_of(zero) - model.A_ind().dense()).norm() == 0.0);
  auto one = control_operator(scalar_phasors(5, {{0, 1.0}}), sys.period);
  Eigen::MatrixXd sum = sys.A_ind + sys.A_dep;
  auto ref = ToeplitzOperator::constant(sum.cast<cplx>(), 5, sys.period);
  CHECK((model.A_of(one) - ref.dense()).norm() < 1e-12);
  CHECK(model.W().is_conjugate_symmetric());
  CHECK(std::abs(model.W().at(1)[0] - cplx(0, -50)) < 1e-12);
}

TEST_CASE("harmonic right-hand side without inputs", "[model]") {
  auto sys = build_rectifier(RectifierParams{});
  PhasorConfig cfg{sys.period, 3, 64};
  auto model = harmonic_bilinear(sys, cfg);
  auto zero_s = control_operator(PhasorVector(1, 3), sys.period);
  PhasorVector x(2, 3);
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()[i] = cplx(0.1 * i, -0.05 * i * i);
  auto rhs = harmonic_rhs(model, x, zero_s, PhasorVector(1, 3));
  Eigen::VectorXcd ref = (model.A_ind().dense() - model.N()) * x.stacked();
  CHECK((rhs.stacked() - ref).norm() == 0.0);
  CHECK_THROWS_AS(harmonic_rhs(model, PhasorVector(2, 2), zero_s, PhasorVector(1, 3)), Error);
}

TEST_CASE("harmonic model reproduces simulated phasor dynamics", "[model][oracle]") {
  const RectifierParams params;
  auto plant = rectifier_plant(params);
  const auto& sys = plant.sys;
  PhasorConfig cfg{sys.period, 5, 512};
  auto model = harmonic_bilinear(sys, cfg);
  // truncation error grows with the modulation depth of s, which feeds
  // harmonics above h back into the kept band
  auto s_ph = scalar_phasors(5, {{0, 0.3}, {1, cplx(0.0, -0.025)}});
  auto s_t = PeriodicMatrix(s_ph, sys.period);
  Scenario sc;
  sc.name = "band_limited";
  sc.duration = 6 * sys.period;
  sc.steps_per_period = 512;
  sc.initial_state = Eigen::Vector2d(0.0, 20.0);
  auto trace = simulate_open_loop(plant, [&](double t, const Eigen::VectorXd&) { return s_t(t)(0, 0); }, sc, cfg);

  // time derivative from the plant equations along the samples
  SampledSignal xdot(2, 0.0, cfg.step(), trace.x.count(), true);
  for (int i = 0; i < trace.x.count(); ++i) {
    const double t = trace.x.time(i);
    const double s = s_t(t)(0, 0);
    Eigen::VectorXd x = trace.x.real_value(i);
    Eigen::VectorXd d = (sys.A_ind + s * sys.A_dep) * x + (sys.B_ind + s * sys.B_dep) * sys.w_at(t);
    xdot.set(i, d);
  }
  auto X = decompose(trace.x, cfg);
  auto DX = decompose(xdot, cfg);
  auto dX = differentiate(X);
  auto S = control_operator(s_ph, sys.period);
  double worst_f = 0, worst_d = 0;
  for (std::size_t i = 1; i + 1 < X.size(); ++i) {
    auto rhs = harmonic_rhs(model, X.values[i], S, model.W());
    // phasors of x' equal A(S) X + B(S) W, and dX/dt is that minus N X
    Eigen::VectorXcd fx = rhs.stacked() + model.N() * X.values[i].stacked();
    worst_f = std::max(worst_f, (fx - DX.values[i].stacked()).norm() / DX.values[i].stacked().norm());
    worst_d = std::max(worst_d, (dX[i].stacked() - rhs.stacked()).norm() / dX[i].stacked().norm());
  }
  CHECK(worst_f <= 5e-3);
  CHECK(worst_d <= 1e-2);
}
