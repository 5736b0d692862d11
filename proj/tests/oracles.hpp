#pragma once

// Reference computations for tests. They avoid the library's quadrature,
// kernels and solvers so that agreement is evidence rather than tautology.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

/// (1/T) integral over [t-T, t] of f(tau) e^{-j w k tau} by the composite
/// Simpson rule on m (even) panels.
inline cplx fourier_coefficient(const std::function<double(double)>& f, double period, int k,
                                double t, int m = 1 << 14) {
  const double w = 2.0 * std::numbers::pi / period;
  const double a = t - period;
  const double hstep = period / m;
  cplx acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double tau = a + i * hstep;
    const double weight = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += weight * f(tau) * std::exp(cplx(0.0, -w * k * tau));
  }
  return acc * hstep / 3.0 / period;
}

/// Solves A X + X B = C through the Kronecker-lifted linear system.
inline Eigen::MatrixXcd sylvester_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                       const Eigen::MatrixXcd& c) {
  const auto n = a.rows();
  const auto m = b.rows();
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * m, n * m);
  const Eigen::MatrixXcd in = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd im = Eigen::MatrixXcd::Identity(m, m);
  // vec(AX) = (I kron A) vec X, vec(XB) = (B^T kron I) vec X
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      big.block(i * n, j * n, n, n) = im(i, j) * a + b(j, i) * in;
    }
  }
  Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(c.data(), n * m);
  Eigen::VectorXcd x = big.fullPivLu().solve(rhs);
  return Eigen::Map<Eigen::MatrixXcd>(x.data(), n, m);
}

/// Classical RK4 for x' = f(t, x) with a fixed step.
inline Eigen::VectorXd rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                           Eigen::VectorXd x, double t0, double t1, int steps) {
  const double hstep = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * hstep;
    Eigen::VectorXd k1 = f(t, x);
    Eigen::VectorXd k2 = f(t + hstep / 2, x + hstep / 2 * k1);
    Eigen::VectorXd k3 = f(t + hstep / 2, x + hstep / 2 * k2);
    Eigen::VectorXd k4 = f(t + hstep, x + hstep * k3);
    x += hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace oracle
