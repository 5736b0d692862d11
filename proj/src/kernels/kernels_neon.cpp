#include <arm_neon.h>

#include "phasorctl/kernels.hpp"

namespace phasorctl::kernels::detail {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

DualSum dual_dot_neon(const double* x, const double* c, const double* s, std::size_t n) {
  float64x2_t ac = vdupq_n_f64(0.0);
  float64x2_t as = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    ac = vfmaq_f64(ac, xv, vld1q_f64(c + i));
    as = vfmaq_f64(as, xv, vld1q_f64(s + i));
  }
  DualSum out{vaddvq_f64(ac), vaddvq_f64(as)};
  for (; i < n; ++i) {
    out.c += x[i] * c[i];
    out.s += x[i] * s[i];
  }
  return out;
}

void axpy_neon(double alpha, const double* x, double* out, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] += alpha * x[i];
}

}  // namespace phasorctl::kernels::detail
