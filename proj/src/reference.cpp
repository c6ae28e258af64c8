#include "reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "mepf/error.hpp"

namespace mepf::reference {

Count min_weighted_path_length(std::span<const Count> counts) {
  const std::size_t m = counts.size();
  if (m == 0 || m > 12) throw Error(Errc::kInvalidArgument, "reference DP takes 1..12 counts");
  const std::size_t full = (std::size_t{1} << m) - 1;
  std::vector<Count> weight(full + 1, 0);
  for (std::size_t s = 1; s <= full; ++s) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
    weight[s] = weight[s & (s - 1)] + counts[low];
  }
  // cost[S]: best tree over S; a split pays weight(S) once for the extra level.
  std::vector<Count> cost(full + 1, std::numeric_limits<Count>::max());
  for (std::size_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) {
      cost[s] = 0;
      continue;
    }
    const std::size_t anchor = s & (~s + 1);  // keep one side fixed to halve the work
    for (std::size_t a = (s - 1) & s; a > 0; a = (a - 1) & s) {
      if (!(a & anchor)) continue;
      const std::size_t b = s ^ a;
      cost[s] = std::min(cost[s], cost[a] + cost[b] + weight[s]);
    }
  }
  return cost[full];
}

Count huffman_cost(std::span<const Count> counts) {
  std::priority_queue<Count, std::vector<Count>, std::greater<>> pq(counts.begin(), counts.end());
  Count total = 0;
  while (pq.size() > 1) {
    const Count a = pq.top();
    pq.pop();
    const Count b = pq.top();
    pq.pop();
    total += a + b;
    pq.push(a + b);
  }
  return total;
}

GridMinimum grid_projection(std::span<const double> p, double step) {
  if (p.size() != 3) throw Error(Errc::kInvalidArgument, "grid projection is for three classes");
  const std::size_t mode = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  const long steps = std::lround(1.0 / step);
  GridMinimum best;
  best.divergence_bits = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= steps; ++i) {
    for (long j = 0; i + j <= steps; ++j) {
      const std::array<double, 3> q{static_cast<double>(i) / steps, static_cast<double>(j) / steps,
                                    static_cast<double>(steps - i - j) / steps};
      double other = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (k != mode) other = std::max(other, q[k]);
      }
      if (other < q[mode]) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (q[k] > 0.0) d += q[k] * std::log2(q[k] / p[k]);
      }
      if (d < best.divergence_bits) {
        best.divergence_bits = d;
        best.q = q;
      }
    }
  }
  return best;
}

}  // namespace mepf::reference
