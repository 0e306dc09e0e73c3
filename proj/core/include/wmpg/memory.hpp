#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "wmpg/random.hpp"

namespace wmpg {

using LatentState = std::vector<double>;

struct TransitionRecord {
  LatentState state;
  std::size_t action = 0;
  double reward = 0.0;
  LatentState next_state;
  bool terminal = false;     // environment reached a failure/absorbing state
  bool episode_end = false;  // last transition of an episode (terminal or time limit)
};

/// On-policy batch memory; holds the current data-gathering phase only.
class OnPolicyMemory {
 public:
  explicit OnPolicyMemory(std::size_t batch_size) : batch_size_(batch_size) {}

  void push(TransitionRecord record) { records_.push_back(std::move(record)); }
  /// True once the memory holds more than batch_size transitions.
  bool ready() const { return records_.size() > batch_size_; }
  void wipe() { records_.clear(); }

  std::size_t size() const { return records_.size(); }
  std::size_t batch_size() const { return batch_size_; }
  const std::vector<TransitionRecord>& records() const { return records_; }

 private:
  std::size_t batch_size_;
  std::vector<TransitionRecord> records_;
};

/// Fixed-capacity FIFO of policy-agnostic transitions for world-model training.
class WorldModelMemory {
 public:
  explicit WorldModelMemory(std::size_t capacity);

  void push(TransitionRecord record);
  void append(const std::vector<TransitionRecord>& records);

  /// Uniform draw of min(n, size) distinct records.
  std::vector<const TransitionRecord*> sample(std::size_t n, Rng& rng) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  const TransitionRecord& operator[](std::size_t i) const { return records_[i]; }

 private:
  std::size_t capacity_;
  std::deque<TransitionRecord> records_;
};

/// Discounted returns over a transition batch, restarting at every episode boundary.
/// Segments that end without a terminal take `bootstrap[i]` (the value of next_state of
/// the segment's last record i) as their tail value.
std::vector<double> discounted_returns(const std::vector<TransitionRecord>& records, double gamma,
                                       const std::vector<double>& bootstrap);

}  // namespace wmpg
