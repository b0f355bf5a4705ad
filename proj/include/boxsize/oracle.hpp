#pragma once

// Brute-force references for tests. Nothing here calls into the solver
// headers' volume code: every volume is recomputed from raw product dims.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "boxsize/model.hpp"
#include "boxsize/split.hpp"

namespace boxsize::oracle {

namespace detail {

inline double group_volume(const Catalog& catalog, const std::vector<ProductIndex>& group) {
  double l = 0.0, w = 0.0, h = 0.0, s = 0.0;
  for (ProductIndex j : group) {
    const Product& p = catalog[j];
    l = std::max(l, p.dims.length);
    w = std::max(w, p.dims.width);
    h = std::max(h, p.dims.height);
    s += p.velocity;
  }
  return l * w * h * s;
}

}  // namespace detail

struct PartitionOptimum {
  double volume = 0.0;
  Solution solution;
};

/// Minimum total volume over every partition into at most K groups.
inline PartitionOptimum exhaustive_partition(const Catalog& catalog, std::size_t k) {
  const std::size_t n = catalog.size();
  if (n == 0 || n > 10 || k < 1 || k > 4) throw Error("exhaustive_partition guard: N <= 10, 1 <= K <= 4");

  // Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i)).
  std::vector<std::size_t> label(n, 0);
  std::vector<std::size_t> best_label;
  double best = std::numeric_limits<double>::infinity();
  auto evaluate = [&] {
    std::vector<std::vector<ProductIndex>> groups(k);
    for (std::size_t j = 0; j < n; ++j) groups[label[j]].push_back(static_cast<ProductIndex>(j));
    double v = 0.0;
    for (const auto& g : groups) {
      if (!g.empty()) v += detail::group_volume(catalog, g);
    }
    if (v < best) {
      best = v;
      best_label = label;
    }
  };
  auto rec = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (i == n) {
      evaluate();
      return;
    }
    for (std::size_t b = 0; b <= std::min(used, k - 1); ++b) {
      label[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  rec(rec, 1, 1);

  std::vector<std::vector<ProductIndex>> groups(k);
  for (std::size_t j = 0; j < n; ++j) groups[best_label[j]].push_back(static_cast<ProductIndex>(j));
  return {best, solution_from_groups(groups, catalog)};
}

/// Every axis and every cut with both children rebuilt from scratch, O(N^2).
/// Same tie rules as the sweep: smallest cut, then axis order.
inline std::optional<SplitPlan> exhaustive_split(const Cluster& c, const Catalog& catalog) {
  if (c.members.size() > 500) throw Error("exhaustive_split guard: N_k <= 500");
  std::optional<SplitPlan> best;
  const double parent = detail::group_volume(catalog, c.members);
  for (Axis a : kAxes) {
    std::vector<double> values;
    for (ProductIndex j : c.members) values.push_back(catalog[j].dims[a]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::optional<SplitPlan> axis_best;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      SplitPlan p;
      p.axis = a;
      p.cut = values[i];
      for (ProductIndex j : c.members) {
        (catalog[j].dims[a] <= p.cut ? p.left_members : p.right_members).push_back(j);
      }
      p.gain = parent - (detail::group_volume(catalog, p.left_members) +
                         detail::group_volume(catalog, p.right_members));
      if (!axis_best || p.gain > axis_best->gain) axis_best = std::move(p);
    }
    if (axis_best && (!best || axis_best->gain > best->gain)) best = std::move(axis_best);
  }
  return best;
}

/// Minimum 1D objective over all contiguous K-group partitions in
/// (volume, id) order.
inline double exhaustive_1d(const Catalog& catalog, std::size_t k) {
  const std::size_t n = catalog.size();
  if (n == 0 || n > 12 || k < 1 || k > n) throw Error("exhaustive_1d guard: N <= 12, 1 <= K <= N");
  std::vector<ProductIndex> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = static_cast<ProductIndex>(j);
  auto vol = [&](ProductIndex j) {
    const Dims& d = catalog[j].dims;
    return d.length * d.width * d.height;
  };
  std::sort(order.begin(), order.end(), [&](ProductIndex a, ProductIndex b) {
    if (vol(a) != vol(b)) return vol(a) < vol(b);
    return a < b;
  });
  double best = std::numeric_limits<double>::infinity();
  // bit g set = a group boundary after position g
  const std::uint32_t gaps = static_cast<std::uint32_t>(n - 1);
  for (std::uint32_t mask = 0; mask < (1u << gaps); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k - 1) continue;
    double total = 0.0, top = 0.0, vel = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      top = std::max(top, vol(order[i]));
      vel += catalog[order[i]].velocity;
      if (i == n - 1 || (mask >> i) & 1u) {
        total += top * vel;
        top = 0.0;
        vel = 0.0;
      }
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace boxsize::oracle
