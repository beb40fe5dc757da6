#include "fptrack/stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fptrack/common.hpp"

namespace fptrack {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double lower_quantile(std::vector<double>& values, double s) {
  if (values.empty()) throw std::invalid_argument("quantile of empty list");
  const size_t idx = lower_quantile_index(values.size(), s);
  std::nth_element(values.begin(), values.begin() + static_cast<ptrdiff_t>(idx), values.end());
  return values[idx];
}

FrequencyVector::FrequencyVector(uint64_t universe_size) : universe_(universe_size) {}

void FrequencyVector::apply(const StreamEvent& e, StreamMode mode) {
  if (e.item >= universe_) throw std::out_of_range("stream item outside universe");
  if (e.delta != 1 && e.delta != -1) throw std::invalid_argument("delta must be +1 or -1");
  if (e.repeat == 0) throw std::invalid_argument("repeat must be >= 1");
  if (mode == StreamMode::CashRegister && e.delta < 0)
    throw std::invalid_argument("negative update in cash-register mode");

  const int64_t d = static_cast<int64_t>(e.delta) * static_cast<int64_t>(e.repeat);
  auto it = counts_.find(e.item);
  if (it == counts_.end()) {
    counts_.emplace(e.item, d);
  } else {
    it->second += d;
    if (it->second == 0) counts_.erase(it);
  }
}

int64_t FrequencyVector::count(uint64_t item) const {
  auto it = counts_.find(item);
  return it == counts_.end() ? 0 : it->second;
}

double count_moment(int64_t count, double p) {
  const double a = std::abs(static_cast<double>(count));
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

double FrequencyVector::moment(double p) const {
  if (!(p > 0.0)) throw std::invalid_argument("moment requires p > 0");
  double sum = 0.0;
  for (const auto& [item, c] : counts_) sum += count_moment(c, p);
  return sum;
}

uint64_t FrequencyVector::l1_norm() const {
  uint64_t sum = 0;
  for (const auto& [item, c] : counts_)
    sum += static_cast<uint64_t>(c < 0 ? -c : c);
  return sum;
}

bool FrequencyVector::operator==(const FrequencyVector& other) const {
  return universe_ == other.universe_ && counts_ == other.counts_;
}

FrequencyVector replay(std::span<const StreamEvent> events, StreamMode mode,
                       uint64_t universe, size_t event_count) {
  FrequencyVector f(universe);
  const size_t n = std::min(event_count, events.size());
  for (size_t i = 0; i < n; ++i) f.apply(events[i], mode);
  return f;
}

namespace {

bool next_payload_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

StreamData read_stream(std::istream& in) {
  StreamData data;
  std::string line;

  if (!next_payload_line(in, line)) throw std::runtime_error("stream file: missing mode header");
  {
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (key != "mode" || (value != "cash" && value != "turnstile"))
      throw std::runtime_error("stream file: expected `mode cash|turnstile`, got: " + line);
    data.mode = value == "cash" ? StreamMode::CashRegister : StreamMode::Turnstile;
  }

  if (!next_payload_line(in, line)) throw std::runtime_error("stream file: missing universe header");
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key >> data.universe;
    if (key != "n" || ls.fail() || data.universe == 0)
      throw std::runtime_error("stream file: expected `n <universe_size>`, got: " + line);
  }

  while (next_payload_line(in, line)) {
    std::istringstream ls(line);
    StreamEvent e;
    int64_t delta = 0;
    ls >> e.item >> delta >> e.repeat;
    if (ls.fail()) throw std::runtime_error("stream file: bad event line: " + line);
    if (delta != 1 && delta != -1) throw std::runtime_error("stream file: delta must be +1 or -1: " + line);
    e.delta = static_cast<int32_t>(delta);
    data.events.push_back(e);
  }
  return data;
}

void write_stream(std::ostream& out, const StreamData& data) {
  out << "mode " << (data.mode == StreamMode::CashRegister ? "cash" : "turnstile") << '\n';
  out << "n " << data.universe << '\n';
  for (const StreamEvent& e : data.events)
    out << e.item << ' ' << e.delta << ' ' << e.repeat << '\n';
}

StreamData load_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file: " + path);
  return read_stream(in);
}

void save_stream_file(const std::string& path, const StreamData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stream file: " + path);
  write_stream(out, data);
}

std::vector<Checkpoint> read_checkpoints(std::istream& in) {
  std::vector<Checkpoint> result;
  std::string line;
  while (next_payload_line(in, line)) {
    std::istringstream ls(line);
    std::string key;
    Checkpoint c;
    ls >> key >> c.event_index >> c.phase;
    if (key != "checkpoint" || ls.fail())
      throw std::runtime_error("checkpoint file: bad line: " + line);
    result.push_back(c);
  }
  return result;
}

void write_checkpoints(std::ostream& out, std::span<const Checkpoint> checkpoints) {
  for (const Checkpoint& c : checkpoints)
    out << "checkpoint " << c.event_index << ' ' << c.phase << '\n';
}

}  // namespace fptrack
