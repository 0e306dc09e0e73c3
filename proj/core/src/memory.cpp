#include "wmpg/memory.hpp"

#include <algorithm>
#include <numeric>

#include "wmpg/errors.hpp"

namespace wmpg {

WorldModelMemory::WorldModelMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw ConfigError("world-model memory capacity must be >= 1");
}

void WorldModelMemory::push(TransitionRecord record) {
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(std::move(record));
}

void WorldModelMemory::append(const std::vector<TransitionRecord>& records) {
  for (const auto& r : records) push(r);
}

std::vector<const TransitionRecord*> WorldModelMemory::sample(std::size_t n, Rng& rng) const {
  std::vector<const TransitionRecord*> out;
  const std::size_t m = records_.size();
  if (m == 0) return out;
  n = std::min(n, m);
  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(&records_[idx[i]]);
  }
  return out;
}

std::vector<double> discounted_returns(const std::vector<TransitionRecord>& records, double gamma,
                                       const std::vector<double>& bootstrap) {
  if (bootstrap.size() != records.size()) throw ConfigError("bootstrap vector must align with records");
  std::vector<double> returns(records.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = records.size(); i-- > 0;) {
    const auto& r = records[i];
    const bool segment_tail = i + 1 == records.size() || r.episode_end;
    if (segment_tail) running = r.terminal ? 0.0 : bootstrap[i];
    running = r.reward + gamma * running;
    returns[i] = running;
  }
  return returns;
}

}  // namespace wmpg
