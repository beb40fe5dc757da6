#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fptrack {

/// Seeded k-wise independent polynomial hash family over a prime field.
///
/// A degree-d polynomial with coefficients drawn uniformly from F_q gives a
/// d-wise independent map [n] -> F_q. The two consumers are the AMS sketch's
/// sign hash g (degree 4, range 2) and bucket hash h (degree 2, range k).
///
/// Folding the odd field to a smaller range skews the output: each residue
/// class of size ceil(q/r) vs floor(q/r) deviates from uniform by at most
/// r/q relative (1/q absolute per value). For the production Mersenne prime
/// 2^61 - 1 that is ~2^-61 and irrelevant; the small-field test moduli (5, 7)
/// make the skew exactly measurable and it is asserted there, not hidden.
class HashFamily {
 public:
  static constexpr uint64_t kMersenne61 = (uint64_t(1) << 61) - 1;

  /// Coefficients drawn from `seed` over the Mersenne prime 2^61 - 1.
  /// `degree` must be 2 or 4. Same arguments always rebuild the same family.
  static HashFamily seeded(uint64_t seed, int degree, uint64_t universe, uint64_t range);

  /// Explicit construction over an arbitrary (prime) modulus; used by the
  /// exhaustive small-field independence tests.
  static HashFamily from_coefficients(std::span<const uint64_t> coefficients,
                                      uint64_t modulus, uint64_t universe, uint64_t range);

  /// Raw polynomial value in [0, modulus). Requires i < universe.
  uint64_t eval(uint64_t i) const;

  /// +1/-1 from the low bit of the polynomial value. Requires range == 2.
  int sign(uint64_t i) const;

  /// Bucket in [0, range) via value mod range.
  uint64_t bucket(uint64_t i) const;

  int degree() const { return degree_; }
  uint64_t modulus() const { return modulus_; }
  uint64_t range() const { return range_; }
  uint64_t universe() const { return universe_; }
  std::span<const uint64_t> coefficients() const {
    return {coeff_.data(), static_cast<size_t>(degree_)};
  }

  bool operator==(const HashFamily& other) const = default;

 private:
  HashFamily() = default;

  std::array<uint64_t, 4> coeff_{};
  int degree_ = 0;
  uint64_t modulus_ = 0;
  uint64_t range_ = 0;
  uint64_t universe_ = 0;
};

/// a * b mod 2^61 - 1 with the Mersenne shift-fold reduction.
inline uint64_t mulmod61(uint64_t a, uint64_t b) noexcept {
  const unsigned __int128 v = static_cast<unsigned __int128>(a) * b;
  uint64_t s = static_cast<uint64_t>(v & HashFamily::kMersenne61) +
               static_cast<uint64_t>(v >> 61);
  if (s >= HashFamily::kMersenne61) s -= HashFamily::kMersenne61;
  return s;
}

}  // namespace fptrack
