#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mepf/distribution.hpp"
#include "mepf/types.hpp"

namespace mepf {

/// Subset of classes 0..universe-1.
class ClassSet {
 public:
  ClassSet() = default;
  explicit ClassSet(std::size_t universe);
  ClassSet(std::size_t universe, std::span<const ClassIndex> members);

  void insert(ClassIndex y);
  bool contains(ClassIndex y) const noexcept {
    return y < universe_ && (words_[y >> 6] >> (y & 63)) & 1U;
  }
  std::size_t size() const noexcept { return size_; }
  std::size_t universe() const noexcept { return universe_; }
  bool empty() const noexcept { return size_ == 0; }
  std::vector<ClassIndex> members() const;
  /// Comma-joined ascending indices.
  std::string to_string() const;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t universe_ = 0;
  std::size_t size_ = 0;
};

/// Hidden samples behind membership queries 1{Y_j in S}.
///
/// Samples are either drawn lazily from (pv, seed) by index or read from a
/// fixed replay sequence. Nothing but query() depends on their values.
class QueryOracle {
 public:
  QueryOracle(const ProbabilityVector& pv, std::uint64_t seed);

  /// Replay mode; `classes` defaults to max index + 1 (at least 2).
  static QueryOracle replay(std::vector<ClassIndex> sequence, std::optional<std::size_t> classes = {});
  /// Newline-separated class indices.
  static QueryOracle replay_text(std::string_view text, std::optional<std::size_t> classes = {});

  /// Throws kDegenerateSet when S is empty or holds every class,
  /// kReplayExhausted past the end of a replay sequence.
  bool query(std::uint64_t j, const ClassSet& s);

  std::uint64_t query_count() const noexcept { return query_count_; }
  std::uint64_t samples_touched() const noexcept { return touched_; }
  std::uint64_t queries_for(std::uint64_t j) const noexcept {
    return j < per_sample_.size() ? per_sample_[j] : 0;
  }
  std::size_t classes() const noexcept { return classes_; }

  /// One line per query: "<j> <set> <0|1>". Pass nullptr to stop tracing.
  void set_trace(std::ostream* out) noexcept { trace_ = out; }

 private:
  QueryOracle() = default;
  ClassIndex materialize(std::uint64_t j);

  std::optional<ProbabilityVector> pv_;
  std::uint64_t seed_ = 0;
  std::vector<ClassIndex> replay_;
  bool replaying_ = false;

  std::vector<ClassIndex> samples_;  // kUnset until materialized
  std::vector<std::uint32_t> per_sample_;
  std::size_t classes_ = 0;
  std::uint64_t query_count_ = 0;
  std::uint64_t touched_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace mepf
