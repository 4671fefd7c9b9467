#include "itn/simd.hpp"

namespace itn::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += values[k] * x[index[k]];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k];
  return acc;
}

double sum_squares(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * a[k];
  return acc;
}

void scale(double* a, std::size_t n, double factor) {
  for (std::size_t k = 0; k < n; ++k) a[k] *= factor;
}

}  // namespace itn::simd::scalar
