#include <atomic>
#include <cstdlib>
#include <string>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"

namespace popeq::kernels {

#if defined(POPEQ_HAVE_AVX2)
const KernelTable* avx2_table_impl() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#if defined(POPEQ_HAVE_AVX2)
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(POPEQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("POPEQ_ISA"); env != nullptr && std::string(env) == "scalar")
    return Isa::Scalar;
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

const KernelTable* table_for(Isa isa) noexcept {
  return isa == Isa::Avx2 ? avx2_table() : &scalar_table();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw Error(ErrorKind::InvalidArgument, "instruction set not available: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() noexcept { return *table_for(active_isa()); }

}  // namespace popeq::kernels
