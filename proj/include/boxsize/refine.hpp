#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "boxsize/model.hpp"

namespace boxsize {

// Product reassignment ------------------------------------------------------------

namespace detail {

// One pass over all products against the current (stale) boxes. Returns the
// number of products that changed cluster.
inline std::size_t reassign_sweep(Solution& s, const Catalog& catalog) {
  const std::size_t c = s.clusters.size();
  std::vector<double> vol(c);
  std::vector<std::size_t> by_volume(c);
  for (std::size_t k = 0; k < c; ++k) {
    vol[k] = s.clusters[k].box.volume();
    by_volume[k] = k;
  }
  std::sort(by_volume.begin(), by_volume.end(), [&](std::size_t a, std::size_t b) {
    if (vol[a] != vol[b]) return vol[a] < vol[b];
    return a < b;
  });

  // Catalog dims and tight boxes are already canonical when rotation is on,
  // so plain per-dimension comparison is the right fit test here.
  std::vector<std::vector<ProductIndex>> groups(c);
  std::size_t moved = 0;
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    const auto pj = static_cast<ProductIndex>(j);
    const std::size_t current = s.assignment[j];
    const Dims& d = catalog[pj].dims;
    std::size_t target = current;
    for (std::size_t m : by_volume) {
      if (vol[m] >= vol[current]) break;
      if (fits(d, s.clusters[m].box)) {
        target = m;
        break;
      }
    }
    if (target != current) ++moved;
    groups[target].push_back(pj);
  }
  if (moved == 0) return 0;

  std::vector<Cluster> clusters;
  clusters.reserve(c);
  for (std::size_t k = 0; k < c; ++k) {
    if (groups[k].empty()) continue;
    if (groups[k].size() == s.clusters[k].members.size() && groups[k] == s.clusters[k].members) {
      clusters.push_back(std::move(s.clusters[k]));
    } else {
      clusters.push_back(make_cluster(std::move(groups[k]), catalog));
    }
  }
  s = make_solution(std::move(clusters), catalog.size());
  return moved;
}

}  // namespace detail

/// Moves every product into the smallest-volume box that fits it, staying put
/// on ties, then recomputes tight boxes and drops emptied clusters. Sweeps
/// repeat until no product moves, so the result is a fixed point and the
/// operation is idempotent.
inline Solution reassign_products(const Solution& s, const Catalog& catalog) {
  Solution cur = s;
  double v = total_volume(cur);
  while (true) {
    Solution next = cur;
    if (detail::reassign_sweep(next, catalog) == 0) break;
    const double nv = total_volume(next);
    if (nv > v) break;  // rounding only; never accept an increase
    cur = std::move(next);
    v = nv;
  }
  return cur;
}

// Iterative refinement -------------------------------------------------------------

struct MoveCandidate {
  ProductIndex product = 0;
  std::size_t from_cluster = 0;
  std::size_t to_cluster = 0;
  Axis axis = Axis::length;
  double gain = 0.0;

  friend bool operator==(const MoveCandidate&, const MoveCandidate&) = default;
};

namespace detail {

// Largest and second-largest member along one axis, ordered by value
// descending then product index ascending.
struct AxisTop {
  ProductIndex first = 0;
  double first_value = 0.0;
  bool has_second = false;
  double second_value = 0.0;
};

struct ClusterSummary {
  Dims box;
  double velocity_sum = 0.0;
  std::size_t size = 0;
  std::array<AxisTop, 3> top{};
  // Distinct movers: slot a holds the top product of axis a unless that product
  // already occupies an earlier slot.
  std::array<bool, 3> slot_used{};
  std::array<ProductIndex, 3> slot_product{};
};

inline ClusterSummary summarize(const Cluster& c, const Catalog& catalog) {
  ClusterSummary sum;
  sum.box = c.box;
  sum.velocity_sum = c.velocity_sum;
  sum.size = c.members.size();
  for (Axis a : kAxes) {
    auto& t = sum.top[static_cast<int>(a)];
    bool have = false;
    for (ProductIndex j : c.members) {
      const double v = catalog[j].dims[a];
      if (!have) {
        t.first = j;
        t.first_value = v;
        have = true;
      } else if (v > t.first_value) {
        t.has_second = true;
        t.second_value = t.first_value;
        t.first = j;
        t.first_value = v;
      } else if (!t.has_second || v > t.second_value) {
        // members ascend by index, so an equal value never displaces `first`
        t.has_second = true;
        t.second_value = v;
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    const ProductIndex p = sum.top[a].first;
    bool dup = false;
    for (int b = 0; b < a; ++b) dup = dup || (sum.slot_used[b] && sum.slot_product[b] == p);
    sum.slot_used[a] = !dup;
    sum.slot_product[a] = p;
  }
  return sum;
}

inline double move_gain(const ClusterSummary& src, const ClusterSummary& dst, ProductIndex j,
                        const Catalog& catalog) {
  const Product& p = catalog[j];
  double src_after = 0.0;
  if (src.size > 1) {
    std::array<double, 3> rest{};
    for (int a = 0; a < 3; ++a) {
      const auto& t = src.top[a];
      rest[a] = (t.first == j) ? t.second_value : t.first_value;
    }
    src_after = weighted_volume({rest[0], rest[1], rest[2]}, src.velocity_sum - p.velocity);
  }
  const double dst_after = weighted_volume(max_dims(dst.box, p.dims), dst.velocity_sum + p.velocity);
  const double before = weighted_volume(src.box, src.velocity_sum) + weighted_volume(dst.box, dst.velocity_sum);
  return before - (src_after + dst_after);
}

}  // namespace detail

/// All single-product moves of a per-axis maximal product to another cluster,
/// ordered by (source, destination, axis). At most 3(C-1)C entries.
inline std::vector<MoveCandidate> evaluate_moves(const Solution& s, const Catalog& catalog) {
  const std::size_t c = s.clusters.size();
  if (c < 2) throw Error("refinement needs at least two clusters");
  std::vector<detail::ClusterSummary> sums;
  sums.reserve(c);
  for (const auto& cl : s.clusters) sums.push_back(detail::summarize(cl, catalog));
  std::vector<MoveCandidate> out;
  out.reserve(3 * c * (c - 1));
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t m = 0; m < c; ++m) {
      if (m == k) continue;
      for (int a = 0; a < 3; ++a) {
        if (!sums[k].slot_used[a]) continue;
        const ProductIndex j = sums[k].slot_product[a];
        out.push_back({j, k, m, kAxes[a], detail::move_gain(sums[k], sums[m], j, catalog)});
      }
    }
  }
  return out;
}

enum class RefineMode {
  incremental,  // re-evaluate only candidates touching the two moved-between clusters
  full,         // re-evaluate all candidates every iteration
};

struct RefineResult {
  Solution solution;
  std::vector<MoveCandidate> moves;
};

/// Greedy one-product moves between clusters while the best move strictly
/// reduces total volume, at most `t_max` moves.
inline RefineResult iterative_refinement(const Solution& s, const Catalog& catalog, std::size_t t_max,
                                         RefineMode mode = RefineMode::incremental) {
  if (s.clusters.size() < 2) throw Error("refinement needs at least two clusters");
  RefineResult res{s, {}};
  Solution& cur = res.solution;

  std::vector<detail::ClusterSummary> sums;
  // gains[(k * C + m) * 3 + slot]; NaN marks an unused slot or k == m.
  std::vector<double> gains;
  std::size_t c = 0;
  constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

  auto eval_pair = [&](std::size_t k, std::size_t m) {
    for (int a = 0; a < 3; ++a) {
      double& g = gains[(k * c + m) * 3 + a];
      g = (k != m && sums[k].slot_used[a])
              ? detail::move_gain(sums[k], sums[m], sums[k].slot_product[a], catalog)
              : kNone;
    }
  };
  auto full_rebuild = [&] {
    c = cur.clusters.size();
    sums.clear();
    for (const auto& cl : cur.clusters) sums.push_back(detail::summarize(cl, catalog));
    gains.assign(c * c * 3, kNone);
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t m = 0; m < c; ++m) eval_pair(k, m);
  };

  full_rebuild();
  double volume = total_volume(cur);

  for (std::size_t t = 0; t < t_max && c >= 2; ++t) {
    // Scan order (source, destination, axis) with strict improvement gives the
    // documented tie rule.
    std::size_t bk = 0, bm = 0;
    int ba = -1;
    double best = 0.0;
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t m = 0; m < c; ++m)
        for (int a = 0; a < 3; ++a) {
          const double g = gains[(k * c + m) * 3 + a];
          if (g == g && g > best) {
            best = g;
            bk = k;
            bm = m;
            ba = a;
          }
        }
    if (ba < 0) break;

    const ProductIndex j = sums[bk].slot_product[ba];
    Solution next = cur;
    auto& src = next.clusters[bk].members;
    src.erase(std::lower_bound(src.begin(), src.end(), j));
    auto& dst = next.clusters[bm].members;
    dst.insert(std::lower_bound(dst.begin(), dst.end(), j), j);
    next.clusters[bm] = make_cluster(std::move(dst), catalog);
    const bool emptied = src.empty();
    if (emptied) {
      next.clusters.erase(next.clusters.begin() + static_cast<std::ptrdiff_t>(bk));
      rebuild_assignment(next, catalog.size());
    } else {
      next.clusters[bk] = make_cluster(std::move(src), catalog);
      next.assignment[j] = static_cast<std::uint32_t>(bm);
    }
    const double nv = total_volume(next);
    if (!(nv < volume)) break;  // predicted gain was a rounding artifact

    res.moves.push_back({j, bk, bm, kAxes[ba], best});
    cur = std::move(next);
    volume = nv;

    if (emptied || mode == RefineMode::full) {
      full_rebuild();
      continue;
    }
    sums[bk] = detail::summarize(cur.clusters[bk], catalog);
    sums[bm] = detail::summarize(cur.clusters[bm], catalog);
    for (std::size_t o = 0; o < c; ++o) {
      eval_pair(bk, o);
      eval_pair(bm, o);
      eval_pair(o, bk);
      eval_pair(o, bm);
    }
  }
  return res;
}

}  // namespace boxsize
