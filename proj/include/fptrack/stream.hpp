#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fptrack {

enum class StreamMode { CashRegister, Turnstile };

/// One signed update, run-length encoded. Adversarial generators insert
/// floor(q^i) identical copies of an item; `repeat` keeps those streams at
/// desk scale instead of materialising billions of unit updates.
struct StreamEvent {
  uint64_t item = 0;
  int32_t delta = +1;  // +1 or -1; cash-register streams allow +1 only
  uint64_t repeat = 1; // run length, >= 1
};

/// Sparse frequency vector. Canonical form: zero entries are absent.
/// Turnstile streams may drive entries negative; moments use |count|.
class FrequencyVector {
 public:
  explicit FrequencyVector(uint64_t universe_size);

  /// Applies one event. Throws std::out_of_range for item >= universe,
  /// std::invalid_argument for a negative delta in cash-register mode,
  /// delta not in {+1,-1}, or repeat == 0.
  void apply(const StreamEvent& e, StreamMode mode);

  int64_t count(uint64_t item) const;

  /// Exact frequency moment F_p = sum |count|^p. Requires p > 0.
  double moment(double p) const;

  /// F_0, the number of nonzero entries.
  uint64_t distinct_count() const { return counts_.size(); }

  /// sum |count|.
  uint64_t l1_norm() const;

  uint64_t universe_size() const { return universe_; }
  const std::unordered_map<uint64_t, int64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  bool operator==(const FrequencyVector& other) const;

 private:
  uint64_t universe_;
  std::unordered_map<uint64_t, int64_t> counts_;
};

/// Exact moment of a single signed count; shared by FrequencyVector and the
/// incremental trackers so both sides round identically.
double count_moment(int64_t count, double p);

/// Replays a prefix of `events` (all of them by default) into a fresh vector.
FrequencyVector replay(std::span<const StreamEvent> events, StreamMode mode,
                       uint64_t universe, size_t event_count = SIZE_MAX);

// ---------------------------------------------------------------------------
// Stream file format: '#' comments and blank lines anywhere, then
//   mode cash|turnstile
//   n <universe_size>
//   <item> <delta> <repeat>      (one event per line, decimal ASCII)
// ---------------------------------------------------------------------------

struct StreamData {
  StreamMode mode = StreamMode::CashRegister;
  uint64_t universe = 0;
  std::vector<StreamEvent> events;
};

StreamData read_stream(std::istream& in);
void write_stream(std::ostream& out, const StreamData& data);
StreamData load_stream_file(const std::string& path);
void save_stream_file(const std::string& path, const StreamData& data);

/// Phase checkpoint emitted by the hard-instance generators:
/// taken after `event_index` events have been applied (1-based count).
struct Checkpoint {
  uint64_t event_index = 0;
  uint32_t phase = 0;
};

// Sidecar format: one `checkpoint <event_index> <phase>` line each.
std::vector<Checkpoint> read_checkpoints(std::istream& in);
void write_checkpoints(std::ostream& out, std::span<const Checkpoint> checkpoints);

}  // namespace fptrack
