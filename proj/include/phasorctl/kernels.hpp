#pragma once

// Data-parallel inner loops shared by the quadrature (sliding Fourier
// projection, Toeplitz coefficients) and Fourier resynthesis paths.
//
// Every kernel has a portable scalar reference implementation. Wider
// variants (AVX2+FMA on x86-64, NEON on aarch64) are selected once at
// runtime from the CPU feature set; PHASORCTL_ISA=scalar forces the
// reference path. All variants agree with the reference up to summation
// reordering.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace phasorctl::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Pair of accumulated projections, {sum x*c, sum x*s}.
struct DualSum {
  double c = 0.0;
  double s = 0.0;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  DualSum (*dual_dot)(const double* x, const double* c, const double* s, std::size_t n);
  // out[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* out, std::size_t n);
};

/// Instruction sets compiled into this build and supported by the CPU.
std::vector<Isa> available_isas();

/// Table for a specific instruction set; throws if it is not available.
const KernelTable& table_for(Isa isa);

/// Currently active table (auto-detected on first use).
const KernelTable& active();

/// Overrides the active table; used by tests and benchmarks.
void set_active_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline DualSum dual_dot(std::span<const double> x, std::span<const double> c,
                        std::span<const double> s) {
  return active().dual_dot(x.data(), c.data(), s.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> out) {
  active().axpy(alpha, x.data(), out.data(), x.size());
}

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
DualSum dual_dot_scalar(const double* x, const double* c, const double* s, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* out, std::size_t n);
#if defined(PHASORCTL_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
DualSum dual_dot_avx2(const double* x, const double* c, const double* s, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* out, std::size_t n);
#endif
#if defined(PHASORCTL_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
DualSum dual_dot_neon(const double* x, const double* c, const double* s, std::size_t n);
void axpy_neon(double alpha, const double* x, double* out, std::size_t n);
#endif
}  // namespace detail

}  // namespace phasorctl::kernels
