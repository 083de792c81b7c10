#include <atomic>
#include <cstdlib>

#include "airy/kernels.hpp"
#include "starkres/simd.hpp"

namespace starkres::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(STARKRES_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("STARKRES_SIMD")) {
    if (auto b = parse(env); b && available(*b)) return *b;
  }
  return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& state() {
  static std::atomic<Backend> s{initial_backend()};
  return s;
}

}  // namespace

bool available(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

Backend active() noexcept { return state().load(std::memory_order_relaxed); }

bool set_active(Backend b) noexcept {
  if (!available(b)) return false;
  state().store(b, std::memory_order_relaxed);
  return true;
}

std::string_view name(Backend b) noexcept { return b == Backend::Avx2 ? "avx2" : "scalar"; }

std::optional<Backend> parse(std::string_view s) noexcept {
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2") return Backend::Avx2;
  return std::nullopt;
}

}  // namespace starkres::simd

namespace starkres::airy::kernels {

const KernelTable& active() {
  static const KernelTable scalar{maclaurin_scalar, asymptotic_scalar};
#if defined(STARKRES_HAVE_AVX2)
  static const KernelTable avx2{maclaurin_avx2, asymptotic_avx2};
  if (simd::active() == simd::Backend::Avx2) return avx2;
#endif
  return scalar;
}

}  // namespace starkres::airy::kernels
