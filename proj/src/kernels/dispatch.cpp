#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "phasorctl/kernels.hpp"

namespace phasorctl::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, detail::dot_scalar, detail::dual_dot_scalar,
                              detail::axpy_scalar};
#if defined(PHASORCTL_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, detail::dot_avx2, detail::dual_dot_avx2,
                            detail::axpy_avx2};
#endif
#if defined(PHASORCTL_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, detail::dot_neon, detail::dual_dot_neon,
                            detail::axpy_neon};
#endif

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(PHASORCTL_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(PHASORCTL_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("PHASORCTL_ISA")) {
    if (std::string(env) == "scalar") return &kScalar;
  }
#if defined(PHASORCTL_HAVE_AVX2)
  if (cpu_has(Isa::Avx2)) return &kAvx2;
#endif
#if defined(PHASORCTL_HAVE_NEON)
  if (cpu_has(Isa::Neon)) return &kNeon;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (cpu_has(Isa::Avx2)) out.push_back(Isa::Avx2);
  if (cpu_has(Isa::Neon)) out.push_back(Isa::Neon);
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!cpu_has(isa))
    throw std::invalid_argument("instruction set not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(PHASORCTL_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(PHASORCTL_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { slot().store(&table_for(isa), std::memory_order_release); }

}  // namespace phasorctl::kernels
