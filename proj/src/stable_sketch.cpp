#include "fptrack/stable_sketch.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fptrack/common.hpp"

namespace fptrack {

namespace {
constexpr uint64_t kFlatCacheUniverse = uint64_t(1) << 16;
}

StableSketch::StableSketch(uint64_t universe, size_t rows, double p, double scale,
                           uint64_t seed, double s_quantile)
    : universe_(universe),
      seed_(seed),
      scale_(scale),
      s_(s_quantile),
      sampler_(p, mix64(seed, seed_role::kStableRows)) {
  if (universe == 0) throw std::invalid_argument("universe must be >= 1");
  if (rows == 0) throw std::invalid_argument("sketch needs >= 1 row");
  if (!(scale > 0.0)) throw std::invalid_argument("scale constant must be positive");
  if (!(s_ > 0.0) || !(s_ < 1.0)) throw std::invalid_argument("quantile s must lie in (0, 1)");
  if (rows > std::numeric_limits<uint64_t>::max() / universe)
    throw std::overflow_error("rows * universe exceeds the draw-index space");
  accumulators_.assign(rows, 0.0);
  if (universe <= kFlatCacheUniverse) flat_cache_.resize(universe);
}

double StableSketch::entry(size_t row, uint64_t item) const {
  return sampler_.sample(static_cast<uint64_t>(row) * universe_ + item);
}

const std::vector<double>& StableSketch::column(uint64_t item) const {
  std::vector<double>* col;
  if (!flat_cache_.empty()) {
    col = &flat_cache_[item];
  } else {
    col = &map_cache_[item];
  }
  if (col->empty()) {
    col->resize(accumulators_.size());
    for (size_t j = 0; j < col->size(); ++j) (*col)[j] = entry(j, item);
  }
  return *col;
}

void StableSketch::update(uint64_t item, int64_t delta) {
  if (item >= universe_) throw std::out_of_range("sketch update outside universe");
  const std::vector<double>& col = column(item);
  const double d = static_cast<double>(delta);
  for (size_t j = 0; j < accumulators_.size(); ++j) accumulators_[j] += d * col[j];
}

double StableSketch::norm_estimate() const {
  scratch_.resize(accumulators_.size());
  for (size_t j = 0; j < accumulators_.size(); ++j) scratch_[j] = std::abs(accumulators_[j]);
  return lower_quantile(scratch_, s_) / scale_;
}

double StableSketch::estimate() const {
  const double norm = norm_estimate();
  if (norm == 0.0) return 0.0;
  return std::pow(norm, sampler_.p());
}

void StableSketch::merge(const StableSketch& other) {
  if (universe_ != other.universe_ || accumulators_.size() != other.accumulators_.size() ||
      sampler_.p() != other.sampler_.p() || seed_ != other.seed_ ||
      scale_ != other.scale_ || s_ != other.s_)
    throw std::invalid_argument("cannot merge sketches with different configuration");
  for (size_t j = 0; j < accumulators_.size(); ++j)
    accumulators_[j] += other.accumulators_[j];
}

void StableSketch::dump(std::ostream& out) const {
  out << "stable " << accumulators_.size() << ' ' << universe_ << ' ' << seed_ << ' '
      << format_double(sampler_.p()) << ' ' << format_double(scale_) << ' '
      << format_double(s_) << '\n';
  out << "y";
  for (double v : accumulators_) out << ' ' << format_double(v);
  out << '\n';
}

StableSketch StableSketch::parse(std::istream& in) {
  std::string tag;
  size_t rows = 0;
  uint64_t universe = 0, seed = 0;
  double p = 0, scale = 0, s = 0;
  in >> tag >> rows >> universe >> seed >> p >> scale >> s;
  if (in.fail() || tag != "stable") throw std::runtime_error("sketch dump: bad header");
  StableSketch sketch(universe, rows, p, scale, seed, s);
  in >> tag;
  if (in.fail() || tag != "y") throw std::runtime_error("sketch dump: bad accumulator section");
  for (auto& v : sketch.accumulators_) in >> v;
  if (in.fail()) throw std::runtime_error("sketch dump: bad accumulator values");
  return sketch;
}

}  // namespace fptrack
