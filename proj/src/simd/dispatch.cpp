#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "itn/simd.hpp"

namespace itn::simd {

#if defined(ITN_HAVE_AVX2)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double gather_dot(const double*, const std::uint32_t*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sum_squares(const double*, std::size_t);
void scale(double*, std::size_t, double);
}  // namespace avx2
#endif

#if defined(ITN_HAVE_NEON)
namespace neon {
double dot(const double*, const double*, std::size_t);
double gather_dot(const double*, const std::uint32_t*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sum_squares(const double*, std::size_t);
void scale(double*, std::size_t, double);
}  // namespace neon
#endif

namespace {

constexpr KernelTable kScalar{scalar::dot, scalar::gather_dot, scalar::sum, scalar::sum_squares,
                              scalar::scale};
#if defined(ITN_HAVE_AVX2)
constexpr KernelTable kAvx2{avx2::dot, avx2::gather_dot, avx2::sum, avx2::sum_squares,
                            avx2::scale};
#endif
#if defined(ITN_HAVE_NEON)
constexpr KernelTable kNeon{neon::dot, neon::gather_dot, neon::sum, neon::sum_squares,
                            neon::scale};
#endif

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(detect_isa())};
  return slot;
}

std::atomic<Isa>& active_isa_slot() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  if (name == "auto" || name.empty()) return detect_isa();
  throw std::invalid_argument("unknown SIMD variant '" + std::string(name) + "'");
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(ITN_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(ITN_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("SIMD variant '" + std::string(to_string(isa)) +
                                "' is not available on this build/CPU");
  switch (isa) {
#if defined(ITN_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(ITN_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

Isa detect_isa() {
  Isa best = Isa::Scalar;
  if (supported(Isa::Avx2)) best = Isa::Avx2;
  if (supported(Isa::Neon)) best = Isa::Neon;
  if (const char* env = std::getenv("ITN_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && supported(Isa::Avx2)) return Isa::Avx2;
    if (want == "neon" && supported(Isa::Neon)) return Isa::Neon;
  }
  return best;
}

Isa active_isa() { return active_isa_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable& t = table(isa);
  active_slot().store(&t, std::memory_order_release);
  active_isa_slot().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_slot().load(std::memory_order_acquire)->dot(a.data(), b.data(), a.size());
}

double gather_dot(std::span<const double> values, std::span<const std::uint32_t> index,
                  std::span<const double> x) {
  return active_slot().load(std::memory_order_acquire)
      ->gather_dot(values.data(), index.data(), x.data(), values.size());
}

double sum(std::span<const double> a) {
  return active_slot().load(std::memory_order_acquire)->sum(a.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active_slot().load(std::memory_order_acquire)->sum_squares(a.data(), a.size());
}

void scale(std::span<double> a, double factor) {
  active_slot().load(std::memory_order_acquire)->scale(a.data(), a.size(), factor);
}

}  // namespace itn::simd
