#include "fptrack/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fptrack/common.hpp"

namespace fptrack {

GeneratedStream gen_zipf(uint64_t n, uint64_t m, double skew, uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
  if (!(skew > 0.0)) throw std::invalid_argument("zipf skew must be positive");
  std::vector<double> cdf(n);
  double total = 0.0;
  for (uint64_t r = 0; r < n; ++r) {
    total += std::pow(static_cast<double>(r + 1), -skew);
    cdf[r] = total;
  }
  GeneratedStream out;
  out.mode = StreamMode::CashRegister;
  out.universe = n;
  out.events.reserve(m);
  Rng rng(seed);
  for (uint64_t i = 0; i < m; ++i) {
    const double u = rng.uniform01() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const uint64_t item = static_cast<uint64_t>(it - cdf.begin());
    out.events.push_back({std::min(item, n - 1), +1, 1});
  }
  return out;
}

GeneratedStream gen_uniform(uint64_t n, uint64_t m, uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
  GeneratedStream out;
  out.mode = StreamMode::CashRegister;
  out.universe = n;
  out.events.reserve(m);
  Rng rng(seed);
  for (uint64_t i = 0; i < m; ++i) out.events.push_back({rng.below(n), +1, 1});
  return out;
}

HardParams hard_params(double p, HardFamily family) {
  if (!(p > 0.0) || p > 2.0) throw std::invalid_argument("p must lie in (0, 2]");
  HardParams params;
  params.family = family;
  params.p = p;
  if (family == HardFamily::CashRegister) {
    const double denom = std::abs(std::exp2(p - 1.0) - 1.0);
    if (p == 1.0 || denom == 0.0)
      throw std::invalid_argument("cash-register family is undefined at p = 1");
    params.t = std::exp2(2.0 * p) / denom;
    params.q = std::pow(params.t, 1.0 / p);
  } else {
    params.q = std::exp2(1.0 / p);
    params.t = 2.0;
  }
  return params;
}

uint64_t floor_qpow(double q, uint32_t i) {
  long double v = std::pow(static_cast<long double>(q), static_cast<long double>(i));
  const long double r = std::round(v);
  if (std::abs(v - r) < 1e-6L) v = r;
  if (v >= 0x1p62L) throw std::overflow_error("floor(q^i) exceeds the 2^62 repeat bound");
  return static_cast<uint64_t>(std::floor(v));
}

uint64_t flatten_item(uint32_t position, uint32_t value, uint32_t alphabet) {
  return static_cast<uint64_t>(position - 1) * alphabet + (value - 1);
}

namespace {

uint32_t cyclic_next(uint32_t value, uint32_t alphabet) {
  return value % alphabet + 1;
}

std::vector<uint32_t> random_sorted_distinct(uint32_t count, uint32_t bound, Rng& rng) {
  // Floyd's sampling; fine at desk scale.
  std::vector<uint32_t> picked;
  picked.reserve(count);
  for (uint32_t j = bound - count; j < bound; ++j) {
    const uint32_t t = static_cast<uint32_t>(rng.below(j + 1)) + 1;
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j + 1);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

CashHardInput CashHardInput::random(uint32_t positions, uint32_t players, uint64_t seed) {
  if (positions < 1 || players < 1 || players > positions)
    throw std::invalid_argument("need 1 <= players <= positions");
  CashHardInput in;
  in.positions = positions;
  in.players = players;
  in.alphabet = std::max<uint32_t>(players, 2);
  Rng rng(seed);
  in.x.resize(positions);
  for (auto& value : in.x) value = static_cast<uint32_t>(rng.below(in.alphabet)) + 1;
  in.v = random_sorted_distinct(players, positions, rng);
  in.y.resize(players);
  for (size_t j = 0; j < players; ++j) {
    const uint32_t truth = in.x[in.v[j] - 1];
    in.y[j] = rng.next() & 1 ? truth : cyclic_next(truth, in.alphabet);
  }
  return in;
}

CashHardInput CashHardInput::with_planted(size_t j, bool planted) const {
  CashHardInput copy = *this;
  const uint32_t truth = x[v[j] - 1];
  copy.y[j] = planted ? truth : cyclic_next(truth, alphabet);
  return copy;
}

void CashHardInput::validate() const {
  if (positions < 1 || players < 1 || alphabet < 2)
    throw std::invalid_argument("hard input needs positions >= 1, players >= 1, alphabet >= 2");
  if (x.size() != positions || v.size() != players || y.size() != players)
    throw std::invalid_argument("hard input vector sizes disagree with (N, k)");
  for (uint32_t value : x)
    if (value < 1 || value > alphabet) throw std::invalid_argument("x value outside alphabet");
  for (uint32_t value : y)
    if (value < 1 || value > alphabet) throw std::invalid_argument("y value outside alphabet");
  for (size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 1 || v[j] > positions) throw std::invalid_argument("v position out of range");
    if (j > 0 && v[j] <= v[j - 1])
      throw std::invalid_argument("v positions must be sorted and distinct");
  }
}

GeneratedStream gen_cash_hard(const HardParams& params, const CashHardInput& input) {
  if (params.family != HardFamily::CashRegister)
    throw std::invalid_argument("params are not for the cash-register family");
  input.validate();
  floor_qpow(params.q, input.positions);  // overflow guard up front

  GeneratedStream out;
  out.mode = StreamMode::CashRegister;
  out.universe = static_cast<uint64_t>(input.positions) * input.alphabet;

  uint32_t prev = 0;  // v_0 = 0
  for (uint32_t j = 0; j < input.players; ++j) {
    const uint32_t vj = input.v[j];
    for (uint32_t i = prev + 1; i <= vj; ++i)
      out.events.push_back({flatten_item(i, input.x[i - 1], input.alphabet), +1,
                            floor_qpow(params.q, i)});
    out.events.push_back({flatten_item(vj, input.y[j], input.alphabet), +1,
                          floor_qpow(params.q, vj)});
    out.checkpoints.push_back({out.events.size(), j + 1});
    prev = vj;
  }
  return out;
}

TurnstileHardInput TurnstileHardInput::random(uint32_t positions, uint32_t players,
                                              uint64_t seed) {
  if (positions < 1 || players < 1)
    throw std::invalid_argument("need positions >= 1 and players >= 1");
  TurnstileHardInput in;
  in.positions = positions;
  in.players = players;
  in.alphabet = std::max<uint32_t>(players, 2);
  Rng rng(seed);
  in.instances.resize(players);
  for (auto& inst : in.instances) {
    inst.a.resize(positions);
    for (auto& value : inst.a) value = static_cast<uint32_t>(rng.below(in.alphabet)) + 1;
    inst.t = static_cast<uint32_t>(rng.below(positions)) + 1;
    const uint32_t truth = inst.a[inst.t - 1];
    inst.probe = rng.next() & 1 ? truth : cyclic_next(truth, in.alphabet);
  }
  return in;
}

TurnstileHardInput TurnstileHardInput::with_planted(size_t i, bool planted) const {
  TurnstileHardInput copy = *this;
  TurnstileHardInstance& inst = copy.instances[i];
  const uint32_t truth = inst.a[inst.t - 1];
  inst.probe = planted ? truth : cyclic_next(truth, alphabet);
  return copy;
}

void TurnstileHardInput::validate() const {
  if (positions < 1 || players < 1 || alphabet < 2)
    throw std::invalid_argument("hard input needs positions >= 1, players >= 1, alphabet >= 2");
  if (instances.size() != players)
    throw std::invalid_argument("instance count disagrees with player count");
  for (const auto& inst : instances) {
    if (inst.a.size() != positions) throw std::invalid_argument("instance vector size != N");
    for (uint32_t value : inst.a)
      if (value < 1 || value > alphabet) throw std::invalid_argument("a value outside alphabet");
    if (inst.t < 1 || inst.t > positions) throw std::invalid_argument("prefix length out of range");
    if (inst.probe < 1 || inst.probe > alphabet)
      throw std::invalid_argument("probe value outside alphabet");
  }
}

GeneratedStream gen_turnstile_hard(const HardParams& params, const TurnstileHardInput& input) {
  if (params.family != HardFamily::Turnstile)
    throw std::invalid_argument("params are not for the turnstile family");
  input.validate();
  floor_qpow(params.q, input.positions);

  GeneratedStream out;
  out.mode = StreamMode::Turnstile;
  out.universe = static_cast<uint64_t>(input.positions) * input.alphabet;

  for (uint32_t i = 0; i < input.players; ++i) {
    const TurnstileHardInstance& inst = input.instances[i];
    const size_t phase_start = out.events.size();
    for (uint32_t j = 1; j <= inst.t; ++j)
      out.events.push_back({flatten_item(j, inst.a[j - 1], input.alphabet), +1,
                            floor_qpow(params.q, j)});
    out.events.push_back({flatten_item(inst.t, inst.probe, input.alphabet), -1,
                          floor_qpow(params.q, inst.t)});
    out.checkpoints.push_back({out.events.size(), i + 1});
    // Reverse every update of the phase (LIFO), returning the vector to zero.
    const size_t phase_end = out.events.size();
    for (size_t e = phase_end; e > phase_start; --e) {
      StreamEvent undo = out.events[e - 1];
      undo.delta = -undo.delta;
      out.events.push_back(undo);
    }
  }
  return out;
}

double gap_check(const FrequencyVector& f_yes, const FrequencyVector& f_no, double p) {
  const double yes = f_yes.moment(p);
  const double no = f_no.moment(p);
  const double low = std::min(yes, no);
  if (low == 0.0) throw std::invalid_argument("gap undefined at zero moment");
  return std::abs(yes - no) / low;
}

double hard_gap_threshold(double p) {
  return (std::exp2(p) - 2.0) / std::exp2(p + 3.0);
}

}  // namespace fptrack
