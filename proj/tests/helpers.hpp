#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "boxsize/model.hpp"

namespace boxsize::testing {

struct Item {
  double l, w, h, s;
};

inline std::string id_for(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%03zu", i);
  return buf;
}

/// Catalog whose index order matches `items` order (ids p000, p001, ...).
inline Catalog make_catalog(const std::vector<Item>& items, bool canonicalize = false) {
  std::vector<Product> ps;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ps.push_back({id_for(i), {items[i].l, items[i].w, items[i].h}, items[i].s});
  }
  return Catalog(std::move(ps), {canonicalize});
}

inline std::vector<ProductIndex> all_indices(const Catalog& c) {
  std::vector<ProductIndex> v(c.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<ProductIndex>(i);
  return v;
}

/// Deterministic integer draw in [lo, hi].
inline int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random items with integer dims in [1, max_dim] and velocities that are
/// multiples of 1/4 in [0.25, 5], so every volume is exact in double.
inline std::vector<Item> random_items(std::mt19937_64& rng, std::size_t n, int max_dim = 20) {
  std::vector<Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({static_cast<double>(draw(rng, 1, max_dim)), static_cast<double>(draw(rng, 1, max_dim)),
                     static_cast<double>(draw(rng, 1, max_dim)), draw(rng, 1, 20) / 4.0});
  }
  return items;
}

/// Random partition of the catalog into `c` non-empty groups (c <= n).
inline Solution random_solution(std::mt19937_64& rng, const Catalog& cat, std::size_t c) {
  std::vector<std::vector<ProductIndex>> groups(c);
  std::vector<ProductIndex> idx = all_indices(cat);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    groups[i < c ? i : static_cast<std::size_t>(rng() % c)].push_back(idx[i]);
  }
  return solution_from_groups(groups, cat);
}

}  // namespace boxsize::testing
