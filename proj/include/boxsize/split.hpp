#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "boxsize/model.hpp"

namespace boxsize {

/// A binary axis-aligned split of one cluster. Members with axis value <= cut
/// go left, the rest go right.
struct SplitPlan {
  std::size_t cluster_index = 0;
  Axis axis = Axis::length;
  double cut = 0.0;
  double gain = 0.0;
  std::vector<ProductIndex> left_members;
  std::vector<ProductIndex> right_members;
};

/// Best cut of `c` along `axis`, or nullopt when every member shares the same
/// axis value.
///
/// Members are sorted along the axis and the N_k - 1 cut positions are swept
/// left to right. Running maxima of all three dimensions and the running
/// velocity sum describe the left child; suffix maxima precomputed in one
/// backward pass describe the right child. Only positions between distinct
/// axis values are valid cuts, and among equal gains the smallest cut wins.
inline std::optional<SplitPlan> best_split_for_axis(const Cluster& c, const Catalog& catalog,
                                                    Axis axis) {
  const std::size_t n = c.members.size();
  if (n < 2) return std::nullopt;

  // Sort compact (value, index) keys, then gather dims and velocities into
  // contiguous arrays so both sweeps stream through memory.
  struct Key {
    double value;
    ProductIndex index;
  };
  std::vector<Key> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = {catalog[c.members[i]].dims[axis], c.members[i]};
  std::sort(order.begin(), order.end(), [](const Key& a, const Key& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.index < b.index;
  });
  std::vector<Dims> dims(n);
  std::vector<double> vel(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Product& p = catalog[order[i].index];
    dims[i] = p.dims;
    vel[i] = p.velocity;
  }

  // right[i]: weighted volume of the right child holding positions i..n-1
  std::vector<double> right(n);
  Dims suffix_box = dims[n - 1];
  double suffix_vel = vel[n - 1];
  right[n - 1] = weighted_volume(suffix_box, suffix_vel);
  for (std::size_t i = n - 1; i-- > 1;) {
    suffix_box = max_dims(suffix_box, dims[i]);
    suffix_vel += vel[i];
    right[i] = weighted_volume(suffix_box, suffix_vel);
  }

  const double parent = cluster_volume(c);
  Dims left_box = dims[0];
  double left_vel = 0.0;
  bool found = false;
  double best_gain = 0.0;
  std::size_t best_pos = 0;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_box = max_dims(left_box, dims[i]);
    left_vel += vel[i];
    if (order[i].value == order[i + 1].value) continue;
    const double gain = parent - (weighted_volume(left_box, left_vel) + right[i + 1]);
    if (!found || gain > best_gain) {
      found = true;
      best_gain = gain;
      best_pos = i;
    }
  }
  if (!found) return std::nullopt;

  SplitPlan plan;
  plan.axis = axis;
  plan.cut = order[best_pos].value;
  plan.gain = best_gain;
  plan.left_members.reserve(best_pos + 1);
  plan.right_members.reserve(n - best_pos - 1);
  for (std::size_t i = 0; i < n; ++i) {
    (i <= best_pos ? plan.left_members : plan.right_members).push_back(order[i].index);
  }
  std::sort(plan.left_members.begin(), plan.left_members.end());
  std::sort(plan.right_members.begin(), plan.right_members.end());
  return plan;
}

/// Best split over the three axes; ties go to length, then width, then height.
inline std::optional<SplitPlan> best_split(const Cluster& c, const Catalog& catalog) {
  std::optional<SplitPlan> best;
  for (Axis a : kAxes) {
    auto plan = best_split_for_axis(c, catalog, a);
    if (plan && (!best || plan->gain > best->gain)) best = std::move(plan);
  }
  return best;
}

/// Best split over all clusters of `s`, lowest cluster index on ties.
inline std::optional<SplitPlan> global_best_split(const Solution& s, const Catalog& catalog) {
  std::optional<SplitPlan> best;
  for (std::size_t k = 0; k < s.clusters.size(); ++k) {
    auto plan = best_split(s.clusters[k], catalog);
    if (!plan) continue;
    plan->cluster_index = k;
    if (!best || plan->gain > best->gain) best = std::move(plan);
  }
  return best;
}

/// Replaces cluster `plan.cluster_index` by its left child and appends the
/// right child at the end.
inline Solution apply_split(const Solution& s, const SplitPlan& plan, const Catalog& catalog) {
  Solution out = s;
  out.clusters[plan.cluster_index] = make_cluster(plan.left_members, catalog);
  out.clusters.push_back(make_cluster(plan.right_members, catalog));
  const auto right_index = static_cast<std::uint32_t>(out.clusters.size() - 1);
  for (ProductIndex j : plan.right_members) out.assignment[j] = right_index;
  return out;
}

/// Splits the cluster with the globally largest gain.
inline Solution apply_best_split(const Solution& s, const Catalog& catalog) {
  auto plan = global_best_split(s, catalog);
  if (!plan) throw Error("no splittable cluster");
  return apply_split(s, *plan, catalog);
}

}  // namespace boxsize
