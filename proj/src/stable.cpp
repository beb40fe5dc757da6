#include "fptrack/stable.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fptrack/common.hpp"

namespace fptrack {

StableSampler::StableSampler(double p, uint64_t seed) : p_(p), seed_(seed) {
  if (!(p > 0.0) || p > 2.0)
    throw std::invalid_argument("stability index must lie in (0, 2]");
}

double StableSampler::sample(uint64_t draw_index) const {
  Rng rng(mix64(seed_, draw_index));
  const double theta = std::numbers::pi * (rng.uniform01() - 0.5);
  const double w = -std::log(rng.uniform01());
  if (p_ == 1.0) return std::tan(theta);
  const double a = std::sin(p_ * theta) / std::pow(std::cos(theta), 1.0 / p_);
  const double b = std::pow(std::cos((1.0 - p_) * theta) / w, (1.0 - p_) / p_);
  return a * b;
}

namespace {

// Internal seed for scale constants; fixed so the cached table file and a
// fresh recomputation agree bit for bit.
constexpr uint64_t kScaleSeed = 0x7ab1e5ca1eULL;

}  // namespace

double ScaleTable::compute(double p, double s, uint64_t samples) {
  if (!(s > 0.0) || !(s < 1.0)) throw std::invalid_argument("quantile s must lie in (0, 1)");
  if (p == 1.0 && s == 0.5) return 1.0;  // median of |Cauchy| = tan(pi/4)
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  StableSampler sampler(p, mix64(kScaleSeed, seed_role::kScaleTable));
  std::vector<double> magnitudes(samples);
  for (uint64_t i = 0; i < samples; ++i)
    magnitudes[i] = std::abs(sampler.sample(i));
  return lower_quantile(magnitudes, s);
}

double ScaleTable::get_or_compute(double p, double s, uint64_t samples) {
  const auto key = std::make_pair(p, s);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second.scale;
  Entry e;
  if (p == 1.0 && s == 0.5) {
    e.scale = 1.0;
    e.samples = 0;
  } else {
    e.scale = compute(p, s, samples);
    e.samples = samples;
  }
  entries_.emplace(key, e);
  return e.scale;
}

void ScaleTable::load(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    double p = 0, s = 0;
    Entry e;
    ls >> p >> s >> e.scale >> e.samples;
    if (ls.fail()) throw std::runtime_error("scale table: bad row: " + line);
    entries_[{p, s}] = e;
  }
}

void ScaleTable::save(std::ostream& out) const {
  out << "# p s scale samples (samples 0 = analytic)\n";
  for (const auto& [key, e] : entries_)
    out << format_double(key.first) << ' ' << format_double(key.second) << ' '
        << format_double(e.scale) << ' ' << e.samples << '\n';
}

bool ScaleTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return false;
  load(in);
  return true;
}

void ScaleTable::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scale table: " + path);
  save(out);
}

}  // namespace fptrack
