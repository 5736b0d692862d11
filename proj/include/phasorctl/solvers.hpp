#pragma once

// Harmonic Lyapunov, Sylvester and Riccati equations at finite truncation,
// and a time-domain periodic differential equation oracle.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "phasorctl/toeplitz.hpp"

namespace phasorctl {

/// -max Re(eig(M)); positive iff M is Hurwitz.
double hurwitz_margin(const Eigen::MatrixXcd& m);

/// Solves A X + X B = C by complex Schur reduction (Bartels-Stewart).
/// Throws ResonantSylvester when some eig(A) + eig(B) falls below gap_tol
/// relative to the operator scale.
Eigen::MatrixXcd solve_sylvester_schur(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                       const Eigen::MatrixXcd& c, double gap_tol = 1e-10);

struct LyapunovSolution {
  ToeplitzOperator P;      // re-Toeplitzified
  Eigen::MatrixXcd dense;  // raw truncated solution, hermitian
  double residual = 0.0;   // relative, of the raw solution
  double defect = 0.0;     // deviation of the raw solution from P's structure
};

/// P F + F* P + Q = 0 for F = A - N Hurwitz and Q hermitian positive definite.
LyapunovSolution solve_lyapunov(const Eigen::MatrixXcd& drift, const ToeplitzOperator& Q,
                                RetoeplitzMode mode = RetoeplitzMode::Central);

struct SylvesterSolution {
  Eigen::MatrixXcd M;
  double residual = 0.0;  // relative
  double min_gap = 0.0;   // min |eig(O-N) - eig(A-N)|
};

/// (O - N) M - M (A - N) + L C = 0.
SylvesterSolution solve_sylvester(const Eigen::MatrixXcd& o_minus_n,
                                  const Eigen::MatrixXcd& a_minus_n,
                                  const Eigen::MatrixXcd& lc);

struct RiccatiOptions {
  int max_iterations = 50;
  double tolerance = 1e-8;
  double eta = 1e-6;  // determinant floor for the inverse of R
  RetoeplitzMode mode = RetoeplitzMode::Central;
};

struct RiccatiSolution {
  LyapunovSolution P;
  ToeplitzOperator K;        // R^{-1} B* P, re-Toeplitzified
  Eigen::MatrixXcd K_dense;  // raw gain
  double gain_defect = 0.0;
  double residual = 0.0;     // relative Riccati residual of the raw solution
  double margin = 0.0;       // hurwitz margin of F - B K
  int iterations = 0;
};

/// P F + F* P - P B R^{-1} B* P + Q = 0 by Newton-Kleinman iteration.
RiccatiSolution solve_riccati(const Eigen::MatrixXcd& drift, const ToeplitzOperator& B,
                              const ToeplitzOperator& Q, const ToeplitzOperator& R,
                              const PhasorConfig& config, const RiccatiOptions& options = {});

using MatrixFn = std::function<Eigen::MatrixXd(double)>;

struct RiccatiWeights {
  MatrixFn B;
  MatrixFn R;
};

struct OracleOptions {
  int samples_per_period = 512;
  int substeps = 8;
  int max_sweeps = 200;
  double relaxation = 0.5;
  double tolerance = 1e-8;
};

struct OracleResult {
  double period = 0.0;
  std::vector<double> times;          // N+1 grid points over [0, T]
  std::vector<Eigen::MatrixXd> P;
  double periodicity_defect = 0.0;
  double monodromy_radius = 0.0;      // lyapunov kind only
  int sweeps = 0;
};

/// T-periodic solution of P' + A'P + PA + Q = 0, or of the Riccati equation
/// P' + A'P + PA - P B R^{-1} B' P + Q = 0 when weights are given, by backward
/// RK4 integration over one period.
OracleResult periodic_lyapunov_oracle(const MatrixFn& A, const MatrixFn& Q, double period,
                                      const std::optional<RiccatiWeights>& riccati = std::nullopt,
                                      const OracleOptions& options = {});

}  // namespace phasorctl
