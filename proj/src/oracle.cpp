#include "mepf/oracle.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>
#include <ostream>

#include "mepf/error.hpp"

namespace mepf {
namespace {

constexpr ClassIndex kUnset = std::numeric_limits<ClassIndex>::max();

}  // namespace

ClassSet::ClassSet(std::size_t universe) : words_((universe + 63) / 64, 0), universe_(universe) {}

ClassSet::ClassSet(std::size_t universe, std::span<const ClassIndex> members) : ClassSet(universe) {
  for (ClassIndex y : members) insert(y);
}

void ClassSet::insert(ClassIndex y) {
  if (y >= universe_) throw Error(Errc::kUnknownClass, "class " + std::to_string(y) + " outside the universe");
  std::uint64_t& w = words_[y >> 6];
  const std::uint64_t bit = std::uint64_t{1} << (y & 63);
  if (!(w & bit)) {
    w |= bit;
    ++size_;
  }
}

std::vector<ClassIndex> ClassSet::members() const {
  std::vector<ClassIndex> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w) {
      out.push_back(static_cast<ClassIndex>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

std::string ClassSet::to_string() const {
  std::string s;
  for (ClassIndex y : members()) {
    if (!s.empty()) s.push_back(',');
    s += std::to_string(y);
  }
  return s;
}

QueryOracle::QueryOracle(const ProbabilityVector& pv, std::uint64_t seed)
    : pv_(pv), seed_(seed), classes_(pv.size()) {}

QueryOracle QueryOracle::replay(std::vector<ClassIndex> sequence, std::optional<std::size_t> classes) {
  QueryOracle o;
  ClassIndex top = 0;
  for (ClassIndex y : sequence) top = std::max(top, y);
  o.classes_ = classes.value_or(std::max<std::size_t>(2, std::size_t{top} + 1));
  if (!sequence.empty() && top >= o.classes_) {
    throw Error(Errc::kUnknownClass, "replay class " + std::to_string(top) + " outside the universe");
  }
  o.replay_ = std::move(sequence);
  o.replaying_ = true;
  return o;
}

QueryOracle QueryOracle::replay_text(std::string_view text, std::optional<std::size_t> classes) {
  std::vector<ClassIndex> seq;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    ClassIndex y = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), y);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw Error(Errc::kInvalidArgument, "bad replay line: " + std::string(line));
    }
    seq.push_back(y);
  }
  return replay(std::move(seq), classes);
}

ClassIndex QueryOracle::materialize(std::uint64_t j) {
  if (j >= samples_.size()) {
    if (replaying_ && j >= replay_.size()) {
      throw Error(Errc::kReplayExhausted, "sample " + std::to_string(j) + " past the replay sequence");
    }
    const std::size_t grow = std::max<std::size_t>(j + 1, samples_.size() * 2);
    samples_.resize(replaying_ ? std::min(grow, replay_.size()) : grow, kUnset);
    per_sample_.resize(samples_.size(), 0);
  }
  ClassIndex& y = samples_[j];
  if (y == kUnset) {
    y = replaying_ ? replay_[j] : sample_at(*pv_, seed_, j);
    ++touched_;
  }
  return y;
}

bool QueryOracle::query(std::uint64_t j, const ClassSet& s) {
  if (s.empty() || s.size() >= classes_) {
    throw Error(Errc::kDegenerateSet, "query set must be non-empty and not every class");
  }
  const bool answer = s.contains(materialize(j));
  ++query_count_;
  ++per_sample_[j];
  if (trace_) *trace_ << j << ' ' << s.to_string() << ' ' << (answer ? 1 : 0) << '\n';
  return answer;
}

}  // namespace mepf
