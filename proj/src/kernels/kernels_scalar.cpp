#include "phasorctl/kernels.hpp"

namespace phasorctl::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

DualSum dual_dot_scalar(const double* x, const double* c, const double* s, std::size_t n) {
  DualSum out;
  for (std::size_t i = 0; i < n; ++i) {
    out.c += x[i] * c[i];
    out.s += x[i] * s[i];
  }
  return out;
}

void axpy_scalar(double alpha, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += alpha * x[i];
}

}  // namespace phasorctl::kernels::detail
