#pragma once

#include <algorithm>
#include <iterator>

#include "boxsize/model.hpp"

namespace boxsize {

struct MergeChoice {
  std::size_t first = 0;
  std::size_t second = 0;
  double delta = 0.0;  // volume increase caused by the merge
};

/// Pair whose union adds the least volume. Each pair costs O(1) from the
/// cached boxes and velocity sums; ties go to the lexicographically smallest
/// (first, second).
inline MergeChoice best_merge_pair(const Solution& s) {
  const std::size_t c = s.clusters.size();
  if (c < 2) throw Error("nothing to merge");
  MergeChoice best{0, 1, 0.0};
  bool found = false;
  for (std::size_t a = 0; a < c; ++a) {
    const Cluster& ca = s.clusters[a];
    const double va = cluster_volume(ca);
    for (std::size_t b = a + 1; b < c; ++b) {
      const Cluster& cb = s.clusters[b];
      const double merged = weighted_volume(max_dims(ca.box, cb.box), ca.velocity_sum + cb.velocity_sum);
      const double delta = merged - (va + cluster_volume(cb));
      if (!found || delta < best.delta) {
        best = {a, b, delta};
        found = true;
      }
    }
  }
  return best;
}

/// Merges the given pair; the union takes the lower index and the higher one
/// is removed.
inline Solution merge_pair(const Solution& s, std::size_t first, std::size_t second, const Catalog& catalog) {
  if (first == second || first >= s.clusters.size() || second >= s.clusters.size()) {
    throw Error("invalid merge pair");
  }
  if (first > second) std::swap(first, second);
  std::vector<ProductIndex> members;
  const auto& ma = s.clusters[first].members;
  const auto& mb = s.clusters[second].members;
  members.reserve(ma.size() + mb.size());
  std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(members));

  Solution out = s;
  out.clusters[first] = make_cluster(std::move(members), catalog);
  out.clusters.erase(out.clusters.begin() + static_cast<std::ptrdiff_t>(second));
  rebuild_assignment(out, catalog.size());
  return out;
}

/// Goes from C to C-1 clusters by merging the cheapest pair.
inline Solution combine_clusters(const Solution& s, const Catalog& catalog) {
  const MergeChoice m = best_merge_pair(s);
  return merge_pair(s, m.first, m.second, catalog);
}

}  // namespace boxsize
