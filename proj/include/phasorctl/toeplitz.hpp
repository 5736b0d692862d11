#pragma once

// Truncated block-Toeplitz operators T_T(A) of T-periodic matrix functions.
// An operator at truncation h acts on phasor vectors of order h and stores
// the coefficient band A_k, |k| <= 2h, so that block (r, c) = A_{r-c}.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "phasorctl/phasor.hpp"

namespace phasorctl {

/// One period of a matrix-valued function on a uniform grid, N+1 samples
/// including both endpoints.
struct MatrixSamples {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::MatrixXcd> values;

  static MatrixSamples sample(const std::function<Eigen::MatrixXcd(double)>& fn,
                              const PhasorConfig& config, double t0 = 0.0);
};

class ToeplitzOperator {
 public:
  ToeplitzOperator() = default;
  ToeplitzOperator(int rows, int cols, int truncation, double period);

  /// Block diagonal operator of a constant matrix.
  static ToeplitzOperator constant(const Eigen::MatrixXcd& a, int truncation, double period);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int truncation() const { return truncation_; }
  int band() const { return 2 * truncation_; }
  double period() const { return period_; }
  double omega() const;

  const Eigen::MatrixXcd& block(int k) const;
  Eigen::MatrixXcd& block(int k);

  /// (n(2h+1)) x (m(2h+1)) matrix with block (r, c) = A_{r-c}.
  Eigen::MatrixXcd dense() const;

  /// sum_{|k| <= 2h} A_k e^{j w k t}
  Eigen::MatrixXcd representative_at(double t) const;

  /// A_{-k} = conj(A_k) for all k.
  bool has_real_representative(double tol = 1e-10) const;

  /// T_T(A') for the conjugate-transposed representative: blocks A_{-k}^*.
  ToeplitzOperator adjoint() const;

  ToeplitzOperator operator+(const ToeplitzOperator& o) const;
  ToeplitzOperator operator-(const ToeplitzOperator& o) const;
  ToeplitzOperator operator*(cplx a) const;

  /// Largest block entry magnitude.
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int truncation_ = 0;
  double period_ = 0.0;
  std::vector<Eigen::MatrixXcd> blocks_;  // index k + 2h
};

/// Fourier blocks up to order 2h of a sampled T-periodic matrix function.
ToeplitzOperator toeplitz_of(const MatrixSamples& samples, const PhasorConfig& config);
ToeplitzOperator toeplitz_of(const std::function<Eigen::MatrixXcd(double)>& fn,
                             const PhasorConfig& config);

/// Block diagonal jwk Id_n, k = -h..h.
Eigen::MatrixXcd n_operator(const PhasorConfig& config, int dim);

enum class RetoeplitzMode {
  Central,  // take each block diagonal's entry nearest the centre of the truncation
  Average,  // mean over the entries of each block diagonal
};

struct Retoeplitzed {
  ToeplitzOperator op;
  double defect = 0.0;  // max deviation of the dense input from op along its diagonals
};

/// Restores block-Toeplitz structure on a dense truncated matrix.
Retoeplitzed retoeplitz(const Eigen::MatrixXcd& dense, int rows, int cols, int truncation,
                        double period, RetoeplitzMode mode = RetoeplitzMode::Central);

/// Max deviation along block diagonals from the central entry of each.
double toeplitz_defect(const Eigen::MatrixXcd& dense, int rows, int cols);

/// Dense product of the truncations, re-Toeplitzified.
Retoeplitzed toeplitz_mul(const ToeplitzOperator& a, const ToeplitzOperator& b,
                          RetoeplitzMode mode = RetoeplitzMode::Central);

/// T_T(A^{-1}) from pointwise inversion of the representative on the
/// quadrature grid; throws NearSingular when |det A(t_i)| < eta.
ToeplitzOperator toeplitz_inverse(const ToeplitzOperator& a, double eta,
                                  const PhasorConfig& config);

struct StructureReport {
  bool hermitian = false;
  bool positive_definite = false;
  double toeplitz_defect = 0.0;
  double min_eigenvalue = 0.0;  // of the hermitian part
};

StructureReport check_structure(const ToeplitzOperator& a);
StructureReport check_structure(const Eigen::MatrixXcd& dense, int block_dim);

}  // namespace phasorctl
