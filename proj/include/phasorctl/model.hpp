#pragma once

// Harmonic (truncated phasor-domain) models of linear time-periodic and
// bilinear affine systems. State ordering throughout: harmonic index slowest,
// state component fastest.

#include <Eigen/Dense>

#include "phasorctl/phasor.hpp"
#include "phasorctl/toeplitz.hpp"

namespace phasorctl {

/// x' = A(t) x + B(t) u with T-periodic A, B given on one period grid.
struct LTPSystem {
  double period = 0.0;
  MatrixSamples A;
  MatrixSamples B;

  int n() const { return A.values.empty() ? 0 : static_cast<int>(A.values.front().rows()); }
  int m() const { return B.values.empty() ? 0 : static_cast<int>(B.values.front().cols()); }
};

struct LTVHarmonic {
  ToeplitzOperator A;
  ToeplitzOperator B;
  Eigen::MatrixXcd drift;  // T_T(A) - N
  Eigen::MatrixXcd input;  // T_T(B)
};

LTVHarmonic harmonic_ltv(const LTPSystem& sys, const PhasorConfig& config);

struct ControlBounds {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double s) const { return s >= lo && s <= hi; }
  bool interior(double s) const { return s > lo && s < hi; }
};

/// x' = (A_ind + s A_dep) x + (B_ind + s B_dep) w with scalar control s and
/// T-periodic exogenous input w given by its phasors.
struct BilinearAffineSystem {
  Eigen::MatrixXd A_ind;
  Eigen::MatrixXd A_dep;
  Eigen::MatrixXd B_ind;
  Eigen::MatrixXd B_dep;
  ControlBounds bounds;
  double period = 0.0;
  PhasorVector w;

  int n() const { return static_cast<int>(A_ind.rows()); }
  int m() const { return static_cast<int>(B_ind.cols()); }
  void validate() const;

  /// w(t) resynthesised from its phasors.
  Eigen::VectorXd w_at(double t) const;
};

class HarmonicBilinearModel {
 public:
  HarmonicBilinearModel() = default;
  HarmonicBilinearModel(const BilinearAffineSystem& sys, const PhasorConfig& config);

  const PhasorConfig& config() const { return config_; }
  int n() const { return static_cast<int>(A_dep_.rows()); }
  int m() const { return static_cast<int>(B_dep_.cols()); }
  int state_dim() const { return n() * config_.harmonics(); }

  const ToeplitzOperator& A_ind() const { return A_ind_; }
  const ToeplitzOperator& B_ind() const { return B_ind_; }
  const Eigen::MatrixXd& A_dep() const { return A_dep_; }
  const Eigen::MatrixXd& B_dep() const { return B_dep_; }
  const Eigen::MatrixXcd& N() const { return N_; }
  const PhasorVector& W() const { return W_; }

  /// A_ind + S (x) A_dep and B_ind + S (x) B_dep (dense).
  Eigen::MatrixXcd A_of(const ToeplitzOperator& S) const;
  Eigen::MatrixXcd B_of(const ToeplitzOperator& S) const;

  /// A(S) - N
  Eigen::MatrixXcd drift(const ToeplitzOperator& S) const;

 private:
  PhasorConfig config_;
  ToeplitzOperator A_ind_;
  ToeplitzOperator B_ind_;
  Eigen::MatrixXd A_dep_;
  Eigen::MatrixXd B_dep_;
  Eigen::MatrixXcd N_;
  PhasorVector W_;
};

HarmonicBilinearModel harmonic_bilinear(const BilinearAffineSystem& sys, const PhasorConfig& config);

/// Scalar control operator S from the phasors s_k, |k| <= h.
ToeplitzOperator control_operator(const PhasorVector& s, double period);

/// Scalar control operator S from one period of control samples.
ToeplitzOperator control_operator(const MatrixSamples& s, const PhasorConfig& config);

/// Kronecker product of a dense scalar Toeplitz matrix with a block.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& s, const Eigen::MatrixXd& block);

/// (A(S) - N) X + B(S) W
PhasorVector harmonic_rhs(const HarmonicBilinearModel& model, const PhasorVector& X,
                          const ToeplitzOperator& S, const PhasorVector& W);

}  // namespace phasorctl
