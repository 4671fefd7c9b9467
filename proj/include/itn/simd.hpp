#pragma once

// Data-parallel double-precision kernels behind the simulator and the
// weight-balancing null model. Every kernel has a scalar reference version;
// vector versions are picked once at runtime from the CPU's capabilities and
// are tested for equivalence against the reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace itn::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_k values[k] * x[index[k]]
  double (*gather_dot)(const double* values, const std::uint32_t* index, const double* x,
                       std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // a[k] *= factor
  void (*scale)(double* a, std::size_t n, double factor);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n);
double sum(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void scale(double* a, std::size_t n, double factor);
}  // namespace scalar

bool supported(Isa isa);

/// Kernel table for a specific instruction set. Throws std::invalid_argument
/// when the build or the CPU lacks it.
const KernelTable& table(Isa isa);

/// Widest supported ISA, unless the ITN_SIMD environment variable
/// ("scalar", "avx2", "neon") asks for a narrower one.
Isa detect_isa();

Isa active_isa();
void set_active_isa(Isa isa);

/// Parses "scalar" / "avx2" / "neon" / "auto".
Isa parse_isa(std::string_view name);

// Convenience wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double gather_dot(std::span<const double> values, std::span<const std::uint32_t> index,
                  std::span<const double> x);
double sum(std::span<const double> a);
double sum_squares(std::span<const double> a);
void scale(std::span<double> a, double factor);

}  // namespace itn::simd
