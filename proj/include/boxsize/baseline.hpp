#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "boxsize/model.hpp"

namespace boxsize {

struct BaselineResult {
  std::vector<Dims> boxes;
  Solution solution;
  double v_tilde = 0.0;  // optimal 1D objective
};

/// Exact clustering of product volumes v = l*w*h into K groups minimizing
///
///   sum_k (max volume in group k) * (velocity sum of group k).
///
/// For this objective some optimal grouping is contiguous in volume order:
/// if a product of volume a sits in a group whose maximum is A while a product
/// of volume b > a sits in a group whose maximum is B < A, swapping them never
/// raises either group's maximum past A and moves weight from the larger
/// maximum to the smaller one, so the objective does not increase. Repeating
/// the exchange yields a contiguous solution. The DP below therefore scans
/// contiguous groups only, in O(N^2 K).
///
/// Returns results for every k = 1..k_max from one DP table; entry k-1 holds
/// the k-group solution.
inline std::vector<BaselineResult> dp_1d_all(const Catalog& catalog, std::size_t k_max) {
  const std::size_t n = catalog.size();
  if (k_max < 1) throw Error("K must be >= 1");
  if (k_max > n) throw Error("K exceeds the number of products");

  std::vector<ProductIndex> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = static_cast<ProductIndex>(j);
  std::vector<double> vol(n);
  for (std::size_t j = 0; j < n; ++j) vol[j] = catalog[static_cast<ProductIndex>(j)].dims.volume();
  std::stable_sort(order.begin(), order.end(), [&](ProductIndex a, ProductIndex b) {
    if (vol[a] != vol[b]) return vol[a] < vol[b];
    return a < b;
  });

  // prefix[j] = velocity of the first j products in volume order.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + catalog[order[j]].velocity;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[k][j]: best objective for the first j products in k+1 groups.
  std::vector<std::vector<double>> cost(k_max, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::uint32_t>> start(k_max, std::vector<std::uint32_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) cost[0][j] = vol[order[j - 1]] * prefix[j];
  for (std::size_t k = 1; k < k_max; ++k) {
    for (std::size_t j = k + 1; j <= n; ++j) {
      const double top = vol[order[j - 1]];
      double best = kInf;
      std::uint32_t arg = 0;
      // last group is order[i-1 .. j-1]
      for (std::size_t i = k + 1; i <= j; ++i) {
        const double c = cost[k - 1][i - 1] + top * (prefix[j] - prefix[i - 1]);
        if (c < best) {
          best = c;
          arg = static_cast<std::uint32_t>(i);
        }
      }
      cost[k][j] = best;
      start[k][j] = arg;
    }
  }

  std::vector<BaselineResult> out;
  out.reserve(k_max);
  for (std::size_t k = 0; k < k_max; ++k) {
    std::vector<std::vector<ProductIndex>> groups(k + 1);
    std::size_t j = n;
    for (std::size_t g = k + 1; g-- > 0;) {
      const std::size_t i = (g == 0) ? 1 : start[g][j];
      groups[g].assign(order.begin() + static_cast<std::ptrdiff_t>(i - 1),
                       order.begin() + static_cast<std::ptrdiff_t>(j));
      j = i - 1;
    }
    BaselineResult r;
    r.solution = solution_from_groups(groups, catalog);
    r.boxes = r.solution.boxes();
    r.v_tilde = cost[k][n];
    out.push_back(std::move(r));
  }
  return out;
}

inline BaselineResult dp_1d(const Catalog& catalog, std::size_t k) {
  auto all = dp_1d_all(catalog, k);
  return std::move(all.back());
}

}  // namespace boxsize
