#pragma once

#include <cstdint>
#include <vector>

#include "fptrack/stream.hpp"

namespace fptrack {

/// A generated stream plus the phase checkpoints the hard-instance
/// constructions guarantee something about.
struct GeneratedStream {
  StreamMode mode = StreamMode::CashRegister;
  uint64_t universe = 0;
  std::vector<StreamEvent> events;
  std::vector<Checkpoint> checkpoints;

  StreamData data() const { return {mode, universe, events}; }
};

/// m cash-register events with item frequencies proportional to
/// (rank + 1)^-skew; item identity equals rank. Deterministic per seed, and
/// a shorter stream is a prefix of a longer one with the same seed.
GeneratedStream gen_zipf(uint64_t n, uint64_t m, double skew, uint64_t seed);

/// m uniform cash-register events over [n].
GeneratedStream gen_uniform(uint64_t n, uint64_t m, uint64_t seed);

// ---------------------------------------------------------------------------
// Hard instances: streams on which any small tracker must eventually be
// wrong, built so that every planted/unplanted decision shows up as a
// guaranteed relative gap in F_p at a recorded checkpoint.
// ---------------------------------------------------------------------------

enum class HardFamily { CashRegister, Turnstile };

/// Insertion-count bases. Cash-register family: t = 2^{2p} / |2^{p-1} - 1|
/// and q = t^{1/p} (undefined at p = 1, where the denominator vanishes).
/// Turnstile family: q = 2^{1/p}, i.e. t = q^p = 2.
struct HardParams {
  HardFamily family = HardFamily::CashRegister;
  double p = 2.0;
  double t = 0.0;
  double q = 0.0;
};

HardParams hard_params(double p, HardFamily family);

/// floor(q^i), used for every insertion count. Computed in long double with
/// a 1e-6 snap to the nearest integer so exactly-integer powers (q = 4,
/// q = sqrt(2) at even i, ...) never land on the wrong side of the floor.
/// Throws std::overflow_error at 2^62, the explicit desk-scale bound.
uint64_t floor_qpow(double q, uint32_t i);

/// Item pairs (position, value), both 1-based, flattened row-major:
/// (position - 1) * alphabet + (value - 1). Part of the stream file format.
uint64_t flatten_item(uint32_t position, uint32_t value, uint32_t alphabet);

/// One instance of the k-player communication input behind the cash-register
/// construction: x in [alphabet]^N, k distinct sorted positions v, and a
/// vector y whose j-th coordinate is planted (y_j = x_{v_j}) or not.
/// `alphabet` is >= 2 even when k = 1 so an unplanted value exists.
struct CashHardInput {
  uint32_t positions = 0;  // N
  uint32_t players = 0;    // k
  uint32_t alphabet = 0;
  std::vector<uint32_t> x;  // size N, values 1..alphabet
  std::vector<uint32_t> v;  // size k, distinct, sorted ascending, values 1..N
  std::vector<uint32_t> y;  // size k, values 1..alphabet

  /// Uniform x and y, uniform distinct v (sorted), each y_j planted with
  /// probability 1/2.
  static CashHardInput random(uint32_t positions, uint32_t players, uint64_t seed);

  bool planted(size_t j) const { return y[j] == x[v[j] - 1]; }

  /// Copy with coordinate j forced planted or unplanted (the cyclically next
  /// alphabet value), leaving everything else untouched.
  CashHardInput with_planted(size_t j, bool planted) const;

  void validate() const;
};

/// The k-phase cash-register stream: phase j inserts floor(q^i) copies of
/// (i, x_i) for v_{j-1} < i <= v_j and floor(q^{v_j}) copies of (v_j, y_j),
/// with a checkpoint after each phase. At checkpoint j the frequency vector
/// is exactly the one the j-th decision is about.
GeneratedStream gen_cash_hard(const HardParams& params, const CashHardInput& input);

/// One phase input of the turnstile construction: a in [alphabet]^N, a
/// prefix length t in [1, N] and a probe value q in [1, alphabet].
struct TurnstileHardInstance {
  std::vector<uint32_t> a;
  uint32_t t = 0;
  uint32_t probe = 0;
};

struct TurnstileHardInput {
  uint32_t positions = 0;  // N
  uint32_t players = 0;    // k
  uint32_t alphabet = 0;
  std::vector<TurnstileHardInstance> instances;  // size k

  static TurnstileHardInput random(uint32_t positions, uint32_t players, uint64_t seed);

  bool planted(size_t i) const {
    return instances[i].probe == instances[i].a[instances[i].t - 1];
  }

  TurnstileHardInput with_planted(size_t i, bool planted) const;

  void validate() const;
};

/// The k-phase turnstile stream: phase i builds the frequency vector of the
/// prefix a^i_{<= t_i}, inserts floor(q^{t_i}) negative copies of
/// (t_i, probe_i) (checkpoint), then reverses every update of the phase so
/// the frequency vector returns to exactly zero.
GeneratedStream gen_turnstile_hard(const HardParams& params, const TurnstileHardInput& input);

/// Relative F_p gap between a matched planted/unplanted checkpoint pair:
/// |F_p(yes) - F_p(no)| / min(F_p(yes), F_p(no)). Throws when either moment
/// is zero.
double gap_check(const FrequencyVector& f_yes, const FrequencyVector& f_no, double p);

/// The guaranteed gap fraction (2^p - 2) / 2^{p+3}; 1/16 at p = 2.
double hard_gap_threshold(double p);

}  // namespace fptrack
