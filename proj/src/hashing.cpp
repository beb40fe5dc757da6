#include "fptrack/hashing.hpp"

#include <stdexcept>

#include "fptrack/common.hpp"

namespace fptrack {

namespace {

uint64_t mulmod_generic(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

void validate(int degree, uint64_t modulus, uint64_t universe, uint64_t range) {
  if (degree != 2 && degree != 4)
    throw std::invalid_argument("hash family degree must be 2 or 4");
  if (range < 1) throw std::invalid_argument("hash range must be >= 1");
  if (universe < 1) throw std::invalid_argument("universe must be >= 1");
  if (modulus < 2 || modulus < universe)
    throw std::invalid_argument("field modulus must be prime and >= universe");
}

}  // namespace

HashFamily HashFamily::seeded(uint64_t seed, int degree, uint64_t universe, uint64_t range) {
  validate(degree, kMersenne61, universe, range);
  HashFamily fam;
  fam.degree_ = degree;
  fam.modulus_ = kMersenne61;
  fam.range_ = range;
  fam.universe_ = universe;
  Rng rng(seed);
  for (int d = 0; d < degree; ++d) {
    // 61-bit draws, rejecting the single out-of-field value.
    uint64_t c;
    do {
      c = rng.next() >> 3;
    } while (c >= kMersenne61);
    fam.coeff_[static_cast<size_t>(d)] = c;
  }
  return fam;
}

HashFamily HashFamily::from_coefficients(std::span<const uint64_t> coefficients,
                                         uint64_t modulus, uint64_t universe, uint64_t range) {
  validate(static_cast<int>(coefficients.size()), modulus, universe, range);
  HashFamily fam;
  fam.degree_ = static_cast<int>(coefficients.size());
  fam.modulus_ = modulus;
  fam.range_ = range;
  fam.universe_ = universe;
  for (size_t d = 0; d < coefficients.size(); ++d) {
    if (coefficients[d] >= modulus)
      throw std::invalid_argument("hash coefficient outside field");
    fam.coeff_[d] = coefficients[d];
  }
  return fam;
}

uint64_t HashFamily::eval(uint64_t i) const {
  if (i >= universe_) throw std::out_of_range("hash input outside universe");
  // Horner; coeff_[degree-1] is the leading coefficient.
  if (modulus_ == kMersenne61) {
    uint64_t acc = 0;
    for (int d = degree_ - 1; d >= 0; --d) {
      acc = mulmod61(acc, i) + coeff_[static_cast<size_t>(d)];
      if (acc >= kMersenne61) acc -= kMersenne61;
    }
    return acc;
  }
  uint64_t acc = 0;
  const uint64_t x = i % modulus_;
  for (int d = degree_ - 1; d >= 0; --d) {
    acc = mulmod_generic(acc, x, modulus_) + coeff_[static_cast<size_t>(d)];
    if (acc >= modulus_) acc -= modulus_;
  }
  return acc;
}

int HashFamily::sign(uint64_t i) const {
  if (range_ != 2) throw std::logic_error("sign hash requires range 2");
  return (eval(i) & 1) ? +1 : -1;
}

uint64_t HashFamily::bucket(uint64_t i) const {
  return eval(i) % range_;
}

}  // namespace fptrack
