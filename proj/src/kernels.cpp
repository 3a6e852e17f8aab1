#include "unistoch/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace unistoch::kernels {
namespace {

constexpr Table kScalar{Isa::Scalar, scalar::sum_abs2, scalar::abs2, scalar::dotc, scalar::axpy};
#if defined(UNISTOCH_HAVE_AVX2)
constexpr Table kAvx2{Isa::Avx2, avx2::sum_abs2, avx2::abs2, avx2::dotc, avx2::axpy};
#endif

const Table* initial_table() {
  Isa isa = detected();
  if (const char* env = std::getenv("UNISTOCH_SIMD")) {
    const std::string want(env);
    if (want == "scalar") isa = Isa::Scalar;
    else if (want == "avx2" && supported(Isa::Avx2)) isa = Isa::Avx2;
  }
  return &table(isa);
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> ptr{initial_table()};
  return ptr;
}

}  // namespace

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(UNISTOCH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected() noexcept { return supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

std::string_view name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const Table& table(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("ISA not supported on this CPU/build: " + std::string(name(isa)));
#if defined(UNISTOCH_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2;
#endif
  return kScalar;
}

const Table& active() noexcept { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

}  // namespace unistoch::kernels
