#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phasorctl/errors.hpp"
#include "phasorctl/phasor.hpp"

using namespace phasorctl;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

SampledSignal scalar_signal(const PhasorConfig& cfg, double t0, int count,
                            const std::function<double(double)>& f) {
  return SampledSignal::from_function(1, t0, cfg.step(), count, [&](double t) {
    return Eigen::VectorXd::Constant(1, f(t));
  });
}

double max_abs_diff(const SampledSignal& a, int ia, const SampledSignal& b, int ib, int count) {
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    worst = std::max(worst, (a.value(ia + i) - b.value(ib + i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("config validation", "[phasor]") {
  CHECK_NOTHROW((PhasorConfig{1.0, 5, 44}.validate()));
  CHECK_THROWS_AS((PhasorConfig{1.0, 5, 43}.validate()), Error);
  CHECK_THROWS_AS((PhasorConfig{0.0, 1, 64}.validate()), Error);
  PhasorConfig c{0.02, 5, 512};
  CHECK(c.omega() * c.period == Approx(2 * pi).epsilon(1e-15));
}

TEST_CASE("constant signal has only a mean phasor", "[phasor]") {
  PhasorConfig cfg{1.0, 3, 64};
  auto sig = SampledSignal::from_function(2, 0.0, cfg.step(), 100, [](double) {
    return Eigen::Vector2d(1.5, -2.0).eval();
  });
  auto traj = decompose(sig, cfg);
  REQUIRE(traj.size() == 100 - 64);
  for (const auto& x : traj.values) {
    CHECK(std::abs(x.at(0)[0] - 1.5) < 1e-13);
    CHECK(std::abs(x.at(0)[1] + 2.0) < 1e-13);
    for (int k = 1; k <= 3; ++k) CHECK(x.at(k).norm() + x.at(-k).norm() < 1e-13);
  }
}

TEST_CASE("sine phasors are -j/2 and +j/2", "[phasor]") {
  PhasorConfig cfg{0.02, 1, 512};
  auto sig = scalar_signal(cfg, 0.0, 600, [&](double t) { return std::sin(cfg.omega() * t); });
  for (const auto& x : decompose(sig, cfg).values) {
    CHECK(std::abs(x.at(1)[0] - cplx(0, -0.5)) < 1e-10);
    CHECK(std::abs(x.at(-1)[0] - cplx(0, 0.5)) < 1e-10);
    CHECK(std::abs(x.at(0)[0]) < 1e-10);
  }
}

TEST_CASE("square wave matches a high-resolution quadrature oracle", "[phasor][oracle]") {
  PhasorConfig cfg{1.0, 5, 512};
  // sample midpoints of the jumps so the trapezoid sees the Dirichlet value
  auto square = [](double t) {
    double u = t - std::floor(t);
    if (u == 0.0 || u == 0.5) return 0.0;
    return u < 0.5 ? 1.0 : -1.0;
  };
  auto sig = scalar_signal(cfg, 0.0, 513, square);
  auto x = decompose_window(sig, cfg, 512);
  for (int k = -5; k <= 5; ++k) {
    cplx ref = oracle::fourier_coefficient(square, 1.0, k, 1.0);
    INFO("k = " << k);
    CHECK(std::abs(x.at(k)[0] - ref) < 1e-3);
  }
  CHECK(std::abs(x.at(1)[0] - cplx(0, -2 / pi)) < 1e-3);
  CHECK(std::abs(x.at(3)[0] - cplx(0, -2 / (3 * pi))) < 1e-3);
  CHECK(std::abs(x.at(5)[0] - cplx(0, -2 / (5 * pi))) < 1e-3);
  CHECK(std::abs(x.at(2)[0]) < 1e-12);
  CHECK(std::abs(x.at(4)[0]) < 1e-12);
}

TEST_CASE("smooth aperiodic signal matches quadrature oracle", "[phasor][oracle]") {
  PhasorConfig cfg{1.0, 4, 512};
  auto f = [](double t) { return std::exp(-0.3 * t) * std::cos(5.1 * t) + 0.2 * t; };
  auto sig = scalar_signal(cfg, 0.0, 900, f);
  auto traj = decompose(sig, cfg);
  for (std::size_t i : {0ul, 100ul, 387ul}) {
    for (int k = -4; k <= 4; ++k) {
      cplx ref = oracle::fourier_coefficient(f, 1.0, k, traj.times[i]);
      CHECK(std::abs(traj.values[i].at(k)[0] - ref) < 5e-5);
    }
  }
}

TEST_CASE("decompose errors", "[phasor]") {
  PhasorConfig cfg{1.0, 2, 64};
  auto short_sig = scalar_signal(cfg, 0.0, 64, [](double t) { return t; });
  try {
    decompose(short_sig, cfg);
    FAIL("expected window underflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowUnderflow);
  }
  auto wrong_grid = SampledSignal::from_function(1, 0.0, 0.01, 200, [](double) {
    return Eigen::VectorXd::Ones(1).eval();
  });
  try {
    decompose(wrong_grid, cfg);
    FAIL("expected grid mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Configuration);
  }
}

TEST_CASE("sliding decomposer equals batch decomposition", "[phasor]") {
  PhasorConfig cfg{0.5, 3, 64};
  auto f = [](double t) { return std::sin(9.0 * t) + t * t; };
  auto sig = scalar_signal(cfg, 0.1, 300, f);
  auto traj = decompose(sig, cfg);
  SlidingDecomposer sd(1, cfg);
  std::size_t j = 0;
  for (int i = 0; i < sig.count(); ++i) {
    CHECK(sd.ready() == (i > 64));
    sd.push(sig.time(i), sig.real_value(i));
    if (sd.ready()) {
      CHECK((sd.phasors().stacked() - traj.values[j].stacked()).norm() < 1e-12);
      ++j;
    }
  }
  CHECK(j == traj.size());
  SlidingDecomposer fresh(1, cfg);
  CHECK_THROWS_AS(fresh.phasors(), Error);
}

TEST_CASE("conjugate symmetry and Parseval", "[phasor]") {
  PhasorConfig cfg{1.0, 3, 256};
  auto f = [&](double t) { return 1 + std::cos(2 * pi * t) - 0.5 * std::sin(6 * pi * t); };
  auto sig = scalar_signal(cfg, 0.0, 300, f);
  auto traj = decompose(sig, cfg);
  for (const auto& x : traj.values) {
    CHECK(x.is_conjugate_symmetric(1e-12));
    // trigonometric polynomial of degree 3: equality
    CHECK(x.stacked().squaredNorm() == Approx(1 + 0.5 + 0.125).epsilon(1e-6));
  }
  auto g = [](double t) { return t * t; };
  auto sig2 = scalar_signal(cfg, 0.0, 300, g);
  auto x = decompose_window(sig2, cfg, 280);
  const double t = sig2.time(280);
  const double energy = (std::pow(t, 5) - std::pow(t - 1, 5)) / 5.0;
  CHECK(x.stacked().squaredNorm() <= energy * (1 + 1e-9));
}

TEST_CASE("reconstruction of a constant trajectory", "[phasor][reconstruct]") {
  PhasorConfig cfg{1.0, 2, 32};
  PhasorTrajectory traj{cfg, {}, {}};
  PhasorVector c(1, 2);
  c.at(0)[0] = 4.0;
  for (int i = 0; i < 80; ++i) {
    traj.times.push_back(1.0 + i * cfg.step());
    traj.values.push_back(c);
  }
  auto seed = scalar_signal(cfg, 0.0, 32, [](double) { return 4.0; });
  for (const ReconstructionMode& mode :
       {ReconstructionMode{reconstruction::Causal{}}, ReconstructionMode{reconstruction::NonCausal{0.25}},
        ReconstructionMode{reconstruction::TwoSided{seed}}}) {
    auto x = reconstruct(traj, mode);
    for (int i = 0; i < x.count(); ++i) CHECK(std::abs(x.value(i)[0] - 4.0) < 1e-12);
  }
}

TEST_CASE("ramp is recovered by the causal jump term", "[phasor][reconstruct]") {
  PhasorConfig cfg{1.0, 5, 512};
  auto sig = scalar_signal(cfg, 0.0, 1500, [](double t) { return t; });
  auto traj = decompose(sig, cfg);
  auto x = reconstruct(traj, reconstruction::Causal{});
  double worst = 0, worst_series = 0;
  for (int i = 0; i < x.count(); ++i) {
    const double t = traj.times[i];
    worst = std::max(worst, std::abs(x.value(i)[0] - t));
    // window Fourier series alone sits at the jump midpoint t - T/2
    worst_series = std::max(worst_series,
                            std::abs(traj.values[i].evaluate(cfg.omega(), t)[0] - (t - 0.5)));
  }
  CHECK(worst <= 2 * cfg.step());
  CHECK(worst_series <= 2 * cfg.step());
}

TEST_CASE("reconstruction modes agree and roundtrip", "[phasor][reconstruct]") {
  PhasorConfig cfg{1.0, 5, 512};
  const double w = cfg.omega();
  auto f = [&](double t) { return std::sin(w * t) + 0.3 * std::sin(3 * w * t); };
  auto sig = scalar_signal(cfg, 0.0, 4 * 512 + 1, f);
  auto traj = decompose(sig, cfg);
  auto causal = reconstruct(traj, reconstruction::Causal{});
  auto noncausal = reconstruct(traj, reconstruction::NonCausal{0.5});
  auto twosided = reconstruct(traj, reconstruction::TwoSided{sig});
  const int common = noncausal.count();
  CHECK(max_abs_diff(causal, 0, noncausal, 0, common) <= 5 * cfg.step());
  CHECK(max_abs_diff(causal, 0, twosided, 0, common) <= 5 * cfg.step());
  CHECK(max_abs_diff(noncausal, 0, twosided, 0, common) <= 5 * cfg.step());
  double num = 0, den = 0;
  for (int i = 0; i <= 512; ++i) {
    const double ref = sig.real_value(512 + i)[0];
    num += std::norm(causal.value(i)[0] - ref);
    den += ref * ref;
  }
  CHECK(std::sqrt(num / den) <= 1e-6);
  // reconstruction of a conjugate-symmetric trajectory is real
  CHECK(causal.im().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("reconstruction errors", "[phasor][reconstruct]") {
  PhasorConfig cfg{1.0, 1, 16};
  auto sig = scalar_signal(cfg, 0.0, 60, [](double t) { return t; });
  auto traj = decompose(sig, cfg);
  auto code_of = [&](const ReconstructionMode& m) {
    try {
      reconstruct(traj, m);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of(reconstruction::NonCausal{0.0}) == ErrorCode::Parameter);
  CHECK(code_of(reconstruction::NonCausal{1.0}) == ErrorCode::Parameter);
  CHECK(code_of(reconstruction::TwoSided{}) == ErrorCode::SeedRequired);
  auto late = scalar_signal(cfg, 0.5, 30, [](double t) { return t; });
  CHECK(code_of(reconstruction::TwoSided{late}) == ErrorCode::SeedRequired);
}

TEST_CASE("mean derivative equals the window difference quotient", "[phasor]") {
  PhasorConfig cfg{1.0, 2, 256};
  auto f = [](double t) { return std::sin(3.7 * t) + 0.5 * t; };
  auto sig = scalar_signal(cfg, 0.0, 900, f);
  auto traj = decompose(sig, cfg);
  auto d = differentiate(traj);
  for (std::size_t i = 1; i + 1 < traj.size(); i += 37) {
    const double t = traj.times[i];
    const double dq = (f(t) - f(t - 1.0)) / 1.0;
    CHECK(std::abs(d[i].at(0)[0].real() - dq) <= 2 * cfg.step());
  }
}

TEST_CASE("coincidence residual", "[phasor][coincidence]") {
  PhasorConfig cfg{1.0, 5, 512};
  PhasorTrajectory eq{cfg, {}, {}};
  PhasorVector c(1, 5);
  c.at(2)[0] = cplx(1, 2);
  c.at(-2)[0] = cplx(1, -2);
  for (int i = 0; i < 5; ++i) {
    eq.times.push_back(i * cfg.step());
    eq.values.push_back(c);
  }
  CHECK(coincidence_residual(eq).max == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 4; ++trial) {
    double a1 = u(rng), a2 = u(rng), f1 = 1 + 3 * std::abs(u(rng)), f2 = 4 * std::abs(u(rng));
    auto f = [&](double t) { return a1 * std::sin(2 * pi * f1 * t) + a2 * std::cos(2 * pi * f2 * t + 1); };
    auto traj = decompose(scalar_signal(cfg, 0.0, 1400, f), cfg);
    CHECK(coincidence_residual(traj).max <= 5e-3);
  }

  auto traj = decompose(scalar_signal(cfg, 0.0, 800, [&](double t) { return std::sin(cfg.omega() * t); }), cfg);
  for (std::size_t i = 0; i < traj.size(); ++i) traj.values[i].at(1)[0] += 0.1 * traj.times[i];
  CHECK(coincidence_residual(traj).max >= 0.05);
}
