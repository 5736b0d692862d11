#include "phasorctl/model.hpp"

#include <cmath>
#include <numbers>

#include "phasorctl/errors.hpp"

namespace phasorctl {

LTVHarmonic harmonic_ltv(const LTPSystem& sys, const PhasorConfig& config) {
  require(std::abs(sys.period - config.period) <= 1e-12 * config.period, ErrorCode::Configuration,
          "system period differs from configuration period");
  require(sys.n() > 0 && sys.m() > 0, ErrorCode::DimensionMismatch, "empty system samples");
  LTVHarmonic out;
  out.A = toeplitz_of(sys.A, config);
  out.B = toeplitz_of(sys.B, config);
  require(out.A.rows() == out.A.cols() && out.B.rows() == out.A.rows(),
          ErrorCode::DimensionMismatch, "A must be n x n and B n x m");
  out.drift = out.A.dense() - n_operator(config, sys.n());
  out.input = out.B.dense();
  return out;
}

void BilinearAffineSystem::validate() const {
  const auto n = A_ind.rows();
  require(n > 0 && A_ind.cols() == n && A_dep.rows() == n && A_dep.cols() == n,
          ErrorCode::DimensionMismatch, "A_ind and A_dep must be n x n");
  require(B_ind.rows() == n && B_dep.rows() == n && B_dep.cols() == B_ind.cols() && B_ind.cols() > 0,
          ErrorCode::DimensionMismatch, "B_ind and B_dep must be n x m");
  require(bounds.lo < bounds.hi, ErrorCode::Parameter, "control bounds need a nonempty interior");
  require(period > 0.0, ErrorCode::Parameter, "period must be positive");
  require(w.dim() == B_ind.cols(), ErrorCode::DimensionMismatch,
          "exogenous input phasors must have dimension m");
  require(w.is_conjugate_symmetric(1e-10), ErrorCode::Parameter,
          "exogenous input phasors must be conjugate symmetric");
}

Eigen::VectorXd BilinearAffineSystem::w_at(double t) const {
  return w.evaluate(2.0 * std::numbers::pi / period, t).real();
}

HarmonicBilinearModel::HarmonicBilinearModel(const BilinearAffineSystem& sys,
                                             const PhasorConfig& config)
    : config_(config), A_dep_(sys.A_dep), B_dep_(sys.B_dep) {
  sys.validate();
  config.validate();
  require(std::abs(sys.period - config.period) <= 1e-12 * config.period, ErrorCode::Configuration,
          "system period differs from configuration period");
  A_ind_ = ToeplitzOperator::constant(sys.A_ind.cast<cplx>(), config.truncation, config.period);
  B_ind_ = ToeplitzOperator::constant(sys.B_ind.cast<cplx>(), config.truncation, config.period);
  N_ = n_operator(config, sys.n());
  W_ = sys.w.retruncated(config.truncation);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& s, const Eigen::MatrixXd& block) {
  const auto r = block.rows();
  const auto c = block.cols();
  Eigen::MatrixXcd out(s.rows() * r, s.cols() * c);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) out.block(i * r, j * c, r, c) = s(i, j) * block;
  }
  return out;
}

namespace {

void check_control(const ToeplitzOperator& S, const PhasorConfig& config) {
  require(S.rows() == 1 && S.cols() == 1, ErrorCode::DimensionMismatch,
          "control operator must have scalar blocks");
  require(S.truncation() == config.truncation, ErrorCode::DimensionMismatch,
          "control operator truncation differs from model");
}

}  // namespace

Eigen::MatrixXcd HarmonicBilinearModel::A_of(const ToeplitzOperator& S) const {
  check_control(S, config_);
  return A_ind_.dense() + kron(S.dense(), A_dep_);
}

Eigen::MatrixXcd HarmonicBilinearModel::B_of(const ToeplitzOperator& S) const {
  check_control(S, config_);
  return B_ind_.dense() + kron(S.dense(), B_dep_);
}

Eigen::MatrixXcd HarmonicBilinearModel::drift(const ToeplitzOperator& S) const {
  return A_of(S) - N_;
}

HarmonicBilinearModel harmonic_bilinear(const BilinearAffineSystem& sys,
                                        const PhasorConfig& config) {
  return HarmonicBilinearModel(sys, config);
}

ToeplitzOperator control_operator(const PhasorVector& s, double period) {
  require(s.dim() == 1, ErrorCode::DimensionMismatch, "control phasors must be scalar");
  ToeplitzOperator out(1, 1, s.truncation(), period);
  for (int k = -s.truncation(); k <= s.truncation(); ++k) out.block(k)(0, 0) = s.at(k)[0];
  return out;
}

ToeplitzOperator control_operator(const MatrixSamples& s, const PhasorConfig& config) {
  return toeplitz_of(s, config);
}

PhasorVector harmonic_rhs(const HarmonicBilinearModel& model, const PhasorVector& X,
                          const ToeplitzOperator& S, const PhasorVector& W) {
  require(X.dim() == model.n() && X.truncation() == model.config().truncation,
          ErrorCode::DimensionMismatch, "state phasors do not match the model");
  require(W.dim() == model.m() && W.truncation() == model.config().truncation,
          ErrorCode::DimensionMismatch, "input phasors do not match the model");
  Eigen::VectorXcd rhs = model.drift(S) * X.stacked() + model.B_of(S) * W.stacked();
  return PhasorVector(X.dim(), X.truncation(), std::move(rhs));
}

}  // namespace phasorctl
