#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "phasorctl/errors.hpp"
#include "phasorctl/toeplitz.hpp"

using namespace phasorctl;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXcd scalar(cplx v) { return Eigen::MatrixXcd::Constant(1, 1, v); }

ToeplitzOperator scalar_op(const std::function<double(double)>& f, const PhasorConfig& cfg) {
  return toeplitz_of([&](double t) { return scalar(f(t)); }, cfg);
}

double band_diff(const ToeplitzOperator& a, const ToeplitzOperator& b, int kmax) {
  double worst = 0;
  for (int k = -kmax; k <= kmax; ++k) worst = std::max(worst, (a.block(k) - b.block(k)).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("constant function gives a block diagonal operator", "[toeplitz]") {
  PhasorConfig cfg{0.02, 3, 64};
  Eigen::MatrixXcd a(2, 2);
  a << 1, 2, -3, 4;
  auto op = toeplitz_of([&](double) { return a; }, cfg);
  CHECK((op.block(0) - a).norm() < 1e-13);
  for (int k = 1; k <= 6; ++k) {
    CHECK(op.block(k).norm() < 1e-13);
    CHECK(op.block(-k).norm() < 1e-13);
  }
  CHECK((op.dense() - ToeplitzOperator::constant(a, 3, 0.02).dense()).norm() < 1e-12);
  for (double t : {0.0, 0.003, 0.017}) CHECK((op.representative_at(t) - a).norm() < 1e-12);
}

TEST_CASE("cosine blocks and dense layout", "[toeplitz]") {
  PhasorConfig cfg{1.0, 1, 64};
  const double w = cfg.omega();
  auto op = scalar_op([&](double t) { return std::cos(w * t); }, cfg);
  CHECK(std::abs(op.block(1)(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(op.block(-1)(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(op.block(0)(0, 0)) < 1e-14);
  Eigen::MatrixXcd expected(3, 3);
  expected << 0, 0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0;
  CHECK((op.dense() - expected).norm() < 1e-13);
  for (double t : {0.0, 0.1, 0.77}) CHECK(std::abs(op.representative_at(t)(0, 0) - std::cos(w * t)) < 1e-10);
  CHECK(op.has_real_representative());
}

TEST_CASE("block (r, c) holds A_{r-c}", "[toeplitz]") {
  PhasorConfig cfg{1.0, 2, 64};
  const double w = cfg.omega();
  // e^{jwt} has a single block at k = 1, which must sit below the diagonal
  auto op = toeplitz_of([&](double t) { return scalar(std::polar(1.0, w * t)); }, cfg);
  auto d = op.dense();
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) CHECK(std::abs(d(r, c) - (r - c == 1 ? 1.0 : 0.0)) < 1e-13);
  }
}

TEST_CASE("non-periodic samples are rejected", "[toeplitz]") {
  PhasorConfig cfg{1.0, 1, 64};
  auto samples = MatrixSamples::sample([](double t) { return scalar(t); }, cfg);
  try {
    toeplitz_of(samples, cfg);
    FAIL("expected NotPeriodic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPeriodic);
  }
}

TEST_CASE("sampling roundtrip returns the blocks", "[toeplitz]") {
  PhasorConfig cfg{0.5, 3, 128};
  const double w = cfg.omega();
  Eigen::MatrixXcd a0(2, 2), a2(2, 2), b5(2, 2);
  a0 << 1, -2, 0.5, 3;
  a2 << 0.1, 0.2, -0.3, 0.4;
  b5 << 0.7, 0, 0.1, -0.2;
  auto fn = [&](double t) -> Eigen::MatrixXcd {
    return a0 + a2 * std::cos(2 * w * t) + b5 * std::sin(5 * w * t);
  };
  auto op = toeplitz_of(fn, cfg);
  auto again = toeplitz_of([&](double t) { return op.representative_at(t); }, cfg);
  CHECK(band_diff(op, again, 6) < 1e-9);
  CHECK((op.block(5) - b5 / cplx(0, 2)).norm() < 1e-12);
}

TEST_CASE("n operator", "[toeplitz]") {
  PhasorConfig cfg{0.02, 1, 16};
  auto n = n_operator(cfg, 1);
  CHECK(std::abs(n(0, 0) - cplx(0, -100 * pi)) < 1e-10);
  CHECK(std::abs(n(1, 1)) == 0.0);
  CHECK(std::abs(n(2, 2) - cplx(0, 100 * pi)) < 1e-10);
  CHECK((n.adjoint() + n).norm() == 0.0);
  CHECK(n_operator(PhasorConfig{0.02, 0, 16}, 1).norm() == 0.0);
  auto rep = check_structure(n_operator(PhasorConfig{1.0, 3, 64}, 2), 2);
  CHECK_FALSE(rep.hermitian);
}

TEST_CASE("product identities", "[toeplitz]") {
  PhasorConfig cfg{1.0, 3, 256};
  const double w = cfg.omega();
  auto c = scalar_op([&](double t) { return std::cos(w * t); }, cfg);
  auto one = scalar_op([](double) { return 1.0; }, cfg);
  auto id_prod = toeplitz_mul(c, one);
  CHECK(band_diff(id_prod.op, c, 3) < 1e-12);

  auto s = scalar_op([&](double t) { return std::sin(w * t); }, cfg);
  auto sq = toeplitz_mul(s, s);
  auto ref = scalar_op([&](double t) { return 0.5 - 0.5 * std::cos(2 * w * t); }, cfg);
  CHECK(band_diff(sq.op, ref, 3) < 1e-10);
  CHECK(check_structure(sq.op).toeplitz_defect < 1e-14);

  Eigen::MatrixXcd p(2, 2), q(2, 2);
  p << 0, 1, 0, 0;
  q << 0, 0, 1, 0;
  auto a = toeplitz_of([&](double t) -> Eigen::MatrixXcd { return p * (1 + std::cos(w * t)); }, cfg);
  auto b = toeplitz_of([&](double) -> Eigen::MatrixXcd { return q; }, cfg);
  CHECK((toeplitz_mul(a, b).op.dense() - toeplitz_mul(b, a).op.dense()).norm() > 0.5);
  CHECK_THROWS_AS(toeplitz_mul(scalar_op([](double) { return 1.0; }, cfg), a), Error);
}

TEST_CASE("average and central re-Toeplitzification agree on band-limited products", "[toeplitz]") {
  PhasorConfig cfg{1.0, 4, 256};
  const double w = cfg.omega();
  auto a = scalar_op([&](double t) { return 1 + 0.3 * std::cos(w * t); }, cfg);
  auto b = scalar_op([&](double t) { return 2 - 0.5 * std::sin(w * t); }, cfg);
  auto central = toeplitz_mul(a, b, RetoeplitzMode::Central);
  auto avg = toeplitz_mul(a, b, RetoeplitzMode::Average);
  auto ref = scalar_op([&](double t) { return (1 + 0.3 * std::cos(w * t)) * (2 - 0.5 * std::sin(w * t)); }, cfg);
  CHECK(band_diff(central.op, ref, 2) < 1e-12);
  CHECK(band_diff(avg.op, ref, 2) < 1e-12);
  // the dense product loses the outermost terms in the truncation corners
  CHECK(central.defect == Catch::Approx(0.3 * 0.5 / 4).epsilon(1e-12));
  CHECK(check_structure(central.op).toeplitz_defect == 0.0);
}

TEST_CASE("pointwise inverse", "[toeplitz]") {
  PhasorConfig cfg{1.0, 5, 512};
  const double w = cfg.omega();
  auto r = ToeplitzOperator::constant(scalar(4.0), 5, 1.0);
  auto ri = toeplitz_inverse(r, 1e-6, cfg);
  CHECK(std::abs(ri.block(0)(0, 0) - 0.25) < 1e-14);
  CHECK(ri.max_abs() == Catch::Approx(0.25));

  auto r2 = scalar_op([&](double t) { return 2 + std::cos(w * t); }, cfg);
  auto inv = toeplitz_inverse(r2, 1e-6, cfg);
  // independent oracle: analytic series of 1/(2 + cos) = (1/sqrt3) sum (sqrt3 - 2)^|k| e^{jkwt}
  const double rho = std::sqrt(3.0) - 2.0;
  for (int k = -5; k <= 5; ++k) {
    CHECK(std::abs(inv.block(k)(0, 0) - std::pow(rho, std::abs(k)) / std::sqrt(3.0)) < 1e-8);
  }
  auto direct = scalar_op([&](double t) { return 1.0 / (2 + std::cos(w * t)); }, cfg);
  CHECK(band_diff(inv, direct, 5) < 1e-8);

  auto c = scalar_op([&](double t) { return std::cos(w * t); }, cfg);
  try {
    toeplitz_inverse(c, 1e-3, cfg);
    FAIL("expected NearSingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
  }
}

TEST_CASE("structure checks", "[toeplitz]") {
  PhasorConfig cfg{1.0, 4, 128};
  const double w = cfg.omega();
  auto q = toeplitz_of([&](double t) -> Eigen::MatrixXcd {
    return (2 + std::cos(w * t)) * Eigen::MatrixXcd::Identity(2, 2);
  }, cfg);
  auto rq = check_structure(q);
  CHECK(rq.hermitian);
  CHECK(rq.positive_definite);
  auto rs = check_structure(scalar_op([&](double t) { return std::sin(w * t); }, cfg));
  CHECK(rs.hermitian);
  CHECK_FALSE(rs.positive_definite);
  auto rn = check_structure(n_operator(cfg, 1), 1);
  CHECK_FALSE(rn.hermitian);
  // jwk varies along the main diagonal, so N is not Toeplitz
  CHECK(rn.toeplitz_defect == Catch::Approx(w * cfg.truncation).epsilon(1e-12));
}

TEST_CASE("adjoint of a real representative is the transpose operator", "[toeplitz]") {
  PhasorConfig cfg{1.0, 3, 128};
  const double w = cfg.omega();
  auto fn = [&](double t) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd m(2, 2);
    m << std::cos(w * t), 2 + std::sin(2 * w * t), -1, 0.3 * std::cos(3 * w * t);
    return m;
  };
  auto a = toeplitz_of(fn, cfg);
  auto at = toeplitz_of([&](double t) -> Eigen::MatrixXcd { return fn(t).transpose(); }, cfg);
  CHECK(band_diff(a.adjoint(), at, 6) < 1e-14);
  CHECK((a.adjoint().dense() - a.dense().adjoint()).norm() < 1e-13);
}

TEST_CASE("commutator with N is the operator of the derivative", "[toeplitz]") {
  PhasorConfig cfg{1.0, 3, 128};
  const double w = cfg.omega();
  auto p = scalar_op([&](double t) { return 2 + std::cos(w * t) + 0.4 * std::sin(2 * w * t); }, cfg);
  auto dp = scalar_op([&](double t) { return -w * std::sin(w * t) + 0.8 * w * std::cos(2 * w * t); }, cfg);
  const auto n = n_operator(cfg, 1);
  // T(dP/dt) = N P - P N for the truncated operators, block by block
  Eigen::MatrixXcd comm = n * p.dense() - p.dense() * n;
  CHECK((comm - dp.dense()).cwiseAbs().maxCoeff() < 1e-9);
}
