#pragma once

// Slow, independent reference computations used by the checks and tests.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mepf/types.hpp"

namespace mepf::reference {

/// Minimum of sum(count * depth) over all full binary trees whose leaves carry
/// the given counts. Exhaustive over subsets; keep the input small (<= 12).
Count min_weighted_path_length(std::span<const Count> counts);

/// Huffman cost by merging values only: the sum of all merged weights.
Count huffman_cost(std::span<const Count> counts);

struct GridMinimum {
  double divergence_bits = 0.0;
  std::array<double, 3> q{};
};

/// Minimum of D(q || p) in bits over the grid q = (i, j, k) * step on the
/// 3-simplex, restricted to q whose largest mass off p's mode is at least
/// the mass on the mode.
GridMinimum grid_projection(std::span<const double> p, double step);

}  // namespace mepf::reference
