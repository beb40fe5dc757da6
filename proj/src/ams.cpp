#include "fptrack/ams.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fptrack/common.hpp"

namespace fptrack {

namespace {

// Pair-cache cutoff: 256 KiB per copy. Beyond this, evaluate per update.
constexpr uint64_t kCacheableUniverse = uint64_t(1) << 16;

HashFamily make_sign(uint64_t universe, uint64_t seed) {
  return HashFamily::seeded(mix64(seed, seed_role::kSignHash), 4, universe, 2);
}

HashFamily make_bucket(uint64_t universe, size_t buckets, uint64_t seed) {
  return HashFamily::seeded(mix64(seed, seed_role::kBucketHash), 2, universe, buckets);
}

}  // namespace

AmsSketch::AmsSketch(uint64_t universe, size_t buckets, uint64_t seed)
    : AmsSketch(make_sign(universe, seed), make_bucket(universe, buckets, seed)) {}

AmsSketch::AmsSketch(HashFamily sign_hash, HashFamily bucket_hash)
    : sign_(std::move(sign_hash)), bucket_(std::move(bucket_hash)) {
  if (sign_.range() != 2) throw std::invalid_argument("sign hash must have range 2");
  if (bucket_.range() < 1) throw std::invalid_argument("bucket hash needs >= 1 bucket");
  if (sign_.universe() != bucket_.universe())
    throw std::invalid_argument("sign and bucket hash universes differ");
  counters_.assign(bucket_.range(), 0);
  if (sign_.universe() <= kCacheableUniverse)
    pair_cache_.assign(sign_.universe(), -1);
}

int32_t AmsSketch::hash_pair(uint64_t item) const {
  if (!pair_cache_.empty()) {
    int32_t packed = pair_cache_[item];
    if (packed < 0) {
      packed = static_cast<int32_t>((bucket_.bucket(item) << 1) |
                                    static_cast<uint32_t>(sign_.sign(item) > 0));
      pair_cache_[item] = packed;
    }
    return packed;
  }
  return static_cast<int32_t>((bucket_.bucket(item) << 1) |
                              static_cast<uint32_t>(sign_.sign(item) > 0));
}

void AmsSketch::update(uint64_t item, int64_t delta) {
  if (item >= sign_.universe()) throw std::out_of_range("sketch update outside universe");
  const int32_t packed = hash_pair(item);
  const int64_t signed_delta = (packed & 1) ? delta : -delta;
  int64_t& c = counters_[static_cast<size_t>(packed >> 1)];
  // (c + d)^2 - c^2 = d * (d + 2c)
  sum_sq_ += static_cast<__int128>(signed_delta) *
             (static_cast<__int128>(signed_delta) + 2 * static_cast<__int128>(c));
  c += signed_delta;
}

void AmsSketch::merge(const AmsSketch& other) {
  if (!(sign_ == other.sign_) || !(bucket_ == other.bucket_) ||
      counters_.size() != other.counters_.size())
    throw std::invalid_argument("cannot merge sketches with different configuration");
  for (size_t j = 0; j < counters_.size(); ++j) counters_[j] += other.counters_[j];
  recompute_sum_sq();
}

void AmsSketch::recompute_sum_sq() {
  sum_sq_ = 0;
  for (int64_t c : counters_)
    sum_sq_ += static_cast<__int128>(c) * static_cast<__int128>(c);
}

namespace {

void dump_family(std::ostream& out, char tag, const HashFamily& fam) {
  out << tag << ' ' << fam.degree() << ' ' << fam.modulus() << ' ' << fam.range();
  for (uint64_t c : fam.coefficients()) out << ' ' << c;
  out << '\n';
}

HashFamily parse_family(std::istream& in, char expected_tag, uint64_t universe) {
  std::string tag;
  int degree = 0;
  uint64_t modulus = 0, range = 0;
  in >> tag >> degree >> modulus >> range;
  if (in.fail() || tag.size() != 1 || tag[0] != expected_tag)
    throw std::runtime_error("sketch dump: bad hash family header");
  std::vector<uint64_t> coeff(static_cast<size_t>(degree));
  for (auto& c : coeff) in >> c;
  if (in.fail()) throw std::runtime_error("sketch dump: bad hash coefficients");
  return HashFamily::from_coefficients(coeff, modulus, universe, range);
}

}  // namespace

void AmsSketch::dump(std::ostream& out) const {
  out << "ams " << counters_.size() << ' ' << sign_.universe() << '\n';
  dump_family(out, 'g', sign_);
  dump_family(out, 'h', bucket_);
  out << "counters";
  for (int64_t c : counters_) out << ' ' << c;
  out << '\n';
}

AmsSketch AmsSketch::parse(std::istream& in) {
  std::string tag;
  size_t buckets = 0;
  uint64_t universe = 0;
  in >> tag >> buckets >> universe;
  if (in.fail() || tag != "ams") throw std::runtime_error("sketch dump: bad header");
  HashFamily g = parse_family(in, 'g', universe);
  HashFamily h = parse_family(in, 'h', universe);
  AmsSketch sketch(std::move(g), std::move(h));
  in >> tag;
  if (in.fail() || tag != "counters" || buckets != sketch.counters_.size())
    throw std::runtime_error("sketch dump: bad counters section");
  for (auto& c : sketch.counters_) in >> c;
  if (in.fail()) throw std::runtime_error("sketch dump: bad counter values");
  sketch.recompute_sum_sq();
  return sketch;
}

double ams_ratio(std::span<const double> x, const HashFamily& g, const HashFamily& h) {
  if (x.size() > g.universe() || x.size() > h.universe())
    throw std::out_of_range("vector larger than hash universe");
  double xtx = 0.0;
  std::vector<double> bucket_sum(h.range(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    xtx += x[i] * x[i];
    bucket_sum[h.bucket(i)] += g.sign(i) * x[i];
  }
  if (xtx == 0.0) throw std::invalid_argument("approximation ratio of the zero vector");
  double quad = 0.0;
  for (double s : bucket_sum) quad += s * s;
  return quad / xtx;
}

}  // namespace fptrack
