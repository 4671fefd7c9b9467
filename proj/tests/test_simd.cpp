#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "itn/simd.hpp"

using namespace itn;

namespace {

std::vector<simd::Isa> vector_isas() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::Avx2, simd::Isa::Neon})
    if (simd::supported(isa)) out.push_back(isa);
  return out;
}

// |a - b| within a few ulps of the magnitude sum of the terms.
void check_close(double got, double want, double magnitude) {
  CHECK(std::abs(got - want) <= 1e-14 * magnitude + 1e-300);
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar kernels on small inputs") {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(simd::scalar::dot(a.data(), b.data(), 3) == 32.0);
    CHECK(simd::scalar::sum(a.data(), 3) == 6.0);
    CHECK(simd::scalar::sum_squares(a.data(), 3) == 14.0);
    const std::vector<std::uint32_t> idx{2, 0};
    const std::vector<double> v{10, 100};
    CHECK(simd::scalar::gather_dot(v.data(), idx.data(), a.data(), 2) == 130.0);
    std::vector<double> c = a;
    simd::scalar::scale(c.data(), 3, 0.5);
    CHECK(c == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(simd::scalar::dot(a.data(), b.data(), 0) == 0.0);
  }

  TEST_CASE("vector kernels match the scalar reference") {
    const auto isas = vector_isas();
    if (isas.empty()) MESSAGE("no vector ISA on this machine; scalar only");
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto isa : isas) {
      const auto& t = simd::table(isa);
      CAPTURE(simd::to_string(isa));
      for (std::size_t n = 0; n < 70; ++n) {
        std::vector<double> a(n), b(n), x(n + 5);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        for (auto& v : x) v = u(rng);
        std::vector<std::uint32_t> idx(n);
        for (auto& i : idx) i = static_cast<std::uint32_t>(rng() % x.size());

        double mag_dot = 0.0, mag_sum = 0.0, mag_gather = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          mag_dot += std::abs(a[k] * b[k]);
          mag_sum += std::abs(a[k]);
          mag_gather += std::abs(a[k] * x[idx[k]]);
        }
        check_close(t.dot(a.data(), b.data(), n), simd::scalar::dot(a.data(), b.data(), n), mag_dot);
        check_close(t.sum(a.data(), n), simd::scalar::sum(a.data(), n), mag_sum);
        check_close(t.sum_squares(a.data(), n), simd::scalar::sum_squares(a.data(), n),
                    simd::scalar::sum_squares(a.data(), n));
        check_close(t.gather_dot(a.data(), idx.data(), x.data(), n),
                    simd::scalar::gather_dot(a.data(), idx.data(), x.data(), n), mag_gather);

        std::vector<double> s1 = a, s2 = a;
        t.scale(s1.data(), n, 0.37);
        simd::scalar::scale(s2.data(), n, 0.37);
        CHECK(s1 == s2);  // element-wise products round identically
      }
    }
  }

  TEST_CASE("sums of non-negative terms dominate each term") {
    // gravity_flow relies on the j-th term never exceeding the reduced sum
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<simd::Isa> isas = vector_isas();
    isas.push_back(simd::Isa::Scalar);
    for (auto isa : isas) {
      const auto& t = simd::table(isa);
      for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = u(rng) * std::pow(10.0, -20.0 * u(rng));
        for (auto& v : b) v = u(rng);
        const double total = t.dot(a.data(), b.data(), n);
        for (std::size_t k = 0; k < n; ++k) CHECK(a[k] * b[k] <= total);
      }
    }
  }

  TEST_CASE("dispatch selection") {
    const auto original = simd::active_isa();
    CHECK(simd::supported(original));
    simd::set_active_isa(simd::Isa::Scalar);
    CHECK(simd::active_isa() == simd::Isa::Scalar);
    const std::vector<double> a{1, 2, 3, 4, 5};
    CHECK(simd::sum(a) == 15.0);
    simd::set_active_isa(original);
    CHECK(simd::parse_isa("scalar") == simd::Isa::Scalar);
    CHECK_THROWS_AS(simd::parse_isa("sse9"), std::invalid_argument);
    if (!simd::supported(simd::Isa::Neon)) CHECK_THROWS_AS(simd::table(simd::Isa::Neon), std::invalid_argument);
  }
}
