#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace mepf {

using ClassIndex = std::uint32_t;
using Count = std::uint64_t;

enum class Algorithm {
  kExhaustive,
  kAdaptive,
  kTruncated,
  kElimination,
  kSetElimination,
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kExhaustive, Algorithm::kAdaptive, Algorithm::kTruncated,
    Algorithm::kElimination, Algorithm::kSetElimination};

std::string_view to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);

// splitmix64 finalizer; used for seed derivation and counter-based sampling.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from 53 high bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace mepf
