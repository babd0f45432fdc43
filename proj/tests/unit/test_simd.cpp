#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "distres/simd/block_sum.hpp"

using namespace distres::simd;

namespace {

std::array<double, kBlock> block_of(std::mt19937_64& g, bool integers) {
  std::array<double, kBlock> w{};
  std::uniform_real_distribution<double> real(1e-6, 1e6);
  for (auto& x : w) {
    x = integers ? static_cast<double>(1 + g() % (1u << 20)) : real(g);
  }
  return w;
}

}  // namespace

TEST_CASE("scalar reference") {
  std::array<double, kBlock> w{};
  for (std::size_t i = 0; i < kBlock; ++i) w[i] = static_cast<double>(i + 1);
  CHECK(block_sum_scalar(w.data()) == 528.0);
}

TEST_CASE("dispatch") {
  CHECK(isa_available(Isa::scalar));
  CHECK(block_sum_for(Isa::scalar) == &block_sum_scalar);
  CHECK(isa_available(best_isa()));
  CHECK(block_sum() == block_sum_for(best_isa()));
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    CHECK((block_sum_for(isa) != nullptr) == isa_available(isa));
  }
  MESSAGE("block kernel: " << isa_name(best_isa()));
}

TEST_CASE("every available kernel matches the scalar reference") {
  std::mt19937_64 g(99);
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    const BlockSumFn fn = block_sum_for(isa);
    if (fn == nullptr) continue;
    CAPTURE(isa_name(isa));
    for (int i = 0; i < 10000; ++i) {
      const auto w = block_of(g, true);
      REQUIRE(fn(w.data()) == block_sum_scalar(w.data()));
    }
    for (int i = 0; i < 10000; ++i) {
      const auto w = block_of(g, false);
      const double ref = block_sum_scalar(w.data());
      REQUIRE(std::abs(fn(w.data()) - ref) <= 64 * std::numeric_limits<double>::epsilon() * ref);
    }
  }
}
