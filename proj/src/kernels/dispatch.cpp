#include <atomic>
#include <cstdlib>
#include <string>

#include "gdpnet/errors.hpp"
#include "gdpnet/kernels.hpp"

namespace gdpnet::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("GDPNET_KERNELS"); env && std::string(env) == "scalar") {
    return &scalar_table();
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return &avx2_table();
#endif
#if defined(__aarch64__)
  return &neon_table();
#endif
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2();
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& table_for(Backend b) {
  if (!backend_available(b)) {
    throw ArgumentError("kernel backend '" + std::string(backend_name(b)) +
                        "' is not available on this CPU");
  }
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2:
      return avx2_table();
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      return neon_table();
#endif
    default:
      return scalar_table();
  }
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

Backend active_backend() noexcept { return active().backend; }

void set_backend(Backend b) { current().store(&table_for(b), std::memory_order_relaxed); }

}  // namespace gdpnet::kernels
