#include <stdexcept>
#include <array>
#include <set>
#include <vector>

#include "doctest.h"
#include "fptrack/common.hpp"
#include "fptrack/hashing.hpp"

using namespace fptrack;

TEST_SUITE("hashing") {

TEST_CASE("seeded construction is deterministic and seed-sensitive") {
  const auto a = HashFamily::seeded(123, 4, 1000, 2);
  const auto b = HashFamily::seeded(123, 4, 1000, 2);
  CHECK(a == b);
  for (uint64_t i : {0, 1, 999}) CHECK(a.sign(i) == b.sign(i));

  std::set<std::array<uint64_t, 4>> tuples;
  for (uint64_t seed = 0; seed < 64; ++seed) {
    const auto fam = HashFamily::seeded(seed, 4, 1000, 2);
    std::array<uint64_t, 4> t{};
    for (size_t d = 0; d < 4; ++d) t[d] = fam.coefficients()[d];
    tuples.insert(t);
  }
  CHECK(tuples.size() == 64);
}

TEST_CASE("construction contract") {
  CHECK_THROWS_AS(HashFamily::seeded(1, 3, 100, 2), std::invalid_argument);
  CHECK_THROWS_AS(HashFamily::seeded(1, 4, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(HashFamily::seeded(1, 2, 100, 0), std::invalid_argument);
  const auto fam = HashFamily::seeded(1, 2, 100, 8);
  CHECK_THROWS_AS(fam.eval(100), std::out_of_range);
  CHECK_THROWS_AS(fam.sign(0), std::logic_error);  // range 8, not a sign hash
}

// Exhaustive over all 7^4 degree-4 coefficient tuples, modulus 7: for every
// input, the polynomial value is uniform over the field, so the low-bit sign
// is +1 on exactly the 3 odd residues (3/7 of tuples; the documented fold
// skew of an odd field is |3/7 - 1/2| = 1/14 absolute, 1/7 relative).
TEST_CASE("sign hash marginals, exhaustive small field") {
  for (uint64_t input = 0; input < 7; ++input) {
    int plus = 0;
    for (uint64_t c0 = 0; c0 < 7; ++c0)
      for (uint64_t c1 = 0; c1 < 7; ++c1)
        for (uint64_t c2 = 0; c2 < 7; ++c2)
          for (uint64_t c3 = 0; c3 < 7; ++c3) {
            const std::array<uint64_t, 4> coeff{c0, c1, c2, c3};
            const auto fam = HashFamily::from_coefficients(coeff, 7, 7, 2);
            plus += fam.sign(input) > 0;
          }
    CHECK(plus == 3 * 343);
    const double fraction = plus / 2401.0;
    CHECK(std::abs(fraction - 0.5) <= 0.5 / 7.0 + 1e-12);
  }
}

// 4-wise independence content: for 4 distinct inputs the value tuple is
// uniform over F_7^4 (the Vandermonde map is a bijection), so every one of
// the 16 sign patterns occurs exactly prod_j marginal(s_j) times.
TEST_CASE("sign hash 4-tuple patterns factor into marginals, exhaustive") {
  const std::array<uint64_t, 4> inputs{0, 2, 3, 6};
  std::array<int, 16> pattern_count{};
  for (uint64_t c0 = 0; c0 < 7; ++c0)
    for (uint64_t c1 = 0; c1 < 7; ++c1)
      for (uint64_t c2 = 0; c2 < 7; ++c2)
        for (uint64_t c3 = 0; c3 < 7; ++c3) {
          const std::array<uint64_t, 4> coeff{c0, c1, c2, c3};
          const auto fam = HashFamily::from_coefficients(coeff, 7, 7, 2);
          int pattern = 0;
          for (size_t j = 0; j < 4; ++j)
            pattern |= (fam.sign(inputs[j]) > 0) << j;
          ++pattern_count[static_cast<size_t>(pattern)];
        }
  for (int pattern = 0; pattern < 16; ++pattern) {
    int expected = 1;
    for (int j = 0; j < 4; ++j) expected *= (pattern >> j) & 1 ? 3 : 4;
    CHECK(pattern_count[static_cast<size_t>(pattern)] == expected);
  }
}

TEST_CASE("sign hash empirical bias at the production prime") {
  // 10^6 (seed, input) pairs; the fold skew at 2^61 - 1 is ~2^-61, so the
  // mean should be statistical noise only.
  double sum = 0.0;
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto fam = HashFamily::seeded(rng.next(), 4, 1 << 20, 2);
    for (int j = 0; j < 1000; ++j) sum += fam.sign(rng.below(1 << 20));
  }
  CHECK(std::abs(sum / 1e6) < 0.005);
}

TEST_CASE("bucket hash basics") {
  const auto one = HashFamily::seeded(5, 2, 100, 1);
  for (uint64_t i = 0; i < 100; ++i) CHECK(one.bucket(i) == 0);
  const auto fam = HashFamily::seeded(5, 2, 100, 7);
  for (uint64_t i : {0, 13, 99}) CHECK(fam.bucket(i) == fam.bucket(i));
}

// Pairwise independence, exhaustive at modulus 5 with range 5: over the 25
// coefficient pairs, each (bucket(i1), bucket(i2)) combination for distinct
// inputs appears exactly once.
TEST_CASE("bucket hash pairwise uniform, exhaustive small field") {
  for (uint64_t i1 = 0; i1 < 5; ++i1)
    for (uint64_t i2 = 0; i2 < 5; ++i2) {
      if (i1 == i2) continue;
      std::array<int, 25> combo{};
      for (uint64_t c0 = 0; c0 < 5; ++c0)
        for (uint64_t c1 = 0; c1 < 5; ++c1) {
          const std::array<uint64_t, 2> coeff{c0, c1};
          const auto fam = HashFamily::from_coefficients(coeff, 5, 5, 5);
          ++combo[fam.bucket(i1) * 5 + fam.bucket(i2)];
        }
      for (int count : combo) CHECK(count == 1);
    }
}

// Folding modulus 5 to range 2 skews buckets to 3:2, i.e. 1/5 relative.
TEST_CASE("bucket hash fold skew, exhaustive small field") {
  for (uint64_t input = 0; input < 5; ++input) {
    int zero = 0;
    for (uint64_t c0 = 0; c0 < 5; ++c0)
      for (uint64_t c1 = 0; c1 < 5; ++c1) {
        const std::array<uint64_t, 2> coeff{c0, c1};
        const auto fam = HashFamily::from_coefficients(coeff, 5, 5, 2);
        zero += fam.bucket(input) == 0;
      }
    CHECK(zero == 15);  // 3 of 5 residues are even
    CHECK(std::abs(zero / 25.0 - 0.5) <= 0.5 / 5.0 + 1e-12);
  }
}

}  // TEST_SUITE
