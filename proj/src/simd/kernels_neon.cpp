// AArch64 only; NEON is part of the base ISA there.
#include <arm_neon.h>

#include "itn/simd.hpp"

namespace itn::simd::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) total += a[k] * b[k];
  return total;
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const double lanes[2] = {x[index[k]], x[index[k + 1]]};
    acc = vfmaq_f64(acc, vld1q_f64(values + k), vld1q_f64(lanes));
  }
  double total = vaddvq_f64(acc);
  for (; k < n; ++k) total += values[k] * x[index[k]];
  return total;
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(a + k));
    acc1 = vaddq_f64(acc1, vld1q_f64(a + k + 2));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) total += a[k];
  return total;
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

void scale(double* a, std::size_t n, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(a + k, vmulq_f64(vld1q_f64(a + k), f));
  for (; k < n; ++k) a[k] *= factor;
}

}  // namespace itn::simd::neon
