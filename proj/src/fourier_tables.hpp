#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <numbers>
#include <vector>

#include "phasorctl/kernels.hpp"

namespace phasorctl::detail {

// cos/sin(2 pi k j / N) for j = 0..N and k = 0..kmax, each row contiguous.
class FourierTables {
 public:
  FourierTables(int kmax, int n) : kmax_(kmax), n_(n), stride_(n + 1) {
    cos_.resize(static_cast<std::size_t>(kmax + 1) * stride_);
    sin_.resize(cos_.size());
    for (int k = 0; k <= kmax; ++k) {
      for (int j = 0; j <= n; ++j) {
        // reduce the index first so large k*j stays exact
        long r = (static_cast<long>(k) * j) % n;
        double th = 2.0 * std::numbers::pi * static_cast<double>(r) / n;
        cos_[k * stride_ + j] = std::cos(th);
        sin_[k * stride_ + j] = std::sin(th);
      }
    }
  }

  int kmax() const { return kmax_; }
  int n() const { return n_; }
  const double* cos_row(int k) const { return cos_.data() + k * stride_; }
  const double* sin_row(int k) const { return sin_.data() + k * stride_; }

 private:
  int kmax_;
  int n_;
  std::size_t stride_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct Projection {
  double c = 0.0;  // trapezoid sum of x cos
  double s = 0.0;  // trapezoid sum of x sin
};

// Trapezoid sums over N+1 points x[0..N] against row k of the tables.
inline Projection trapezoid(const FourierTables& tab, int k, const double* x) {
  const int n = tab.n();
  auto sum = kernels::active().dual_dot(x, tab.cos_row(k), tab.sin_row(k), n + 1);
  // endpoints carry half weight; both sit at phase 0 mod 2 pi
  sum.c -= 0.5 * (x[0] + x[n]);
  return {sum.c, sum.s};
}

// Unnormalised sums of x e^{-j theta_k} and x e^{+j theta_k} for x = xr + j xi;
// xi may be null for real data.
inline std::pair<std::complex<double>, std::complex<double>> project(const FourierTables& tab,
                                                                     int k, const double* xr,
                                                                     const double* xi) {
  auto pr = trapezoid(tab, k, xr);
  Projection pi;
  if (xi) pi = trapezoid(tab, k, xi);
  return {{pr.c + pi.s, pi.c - pr.s}, {pr.c - pi.s, pi.c + pr.s}};
}

}  // namespace phasorctl::detail
