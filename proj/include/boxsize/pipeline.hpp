#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boxsize/eval.hpp"
#include "boxsize/merge.hpp"
#include "boxsize/model.hpp"
#include "boxsize/refine.hpp"
#include "boxsize/split.hpp"

namespace boxsize {

struct StageRecord {
  std::string stage;  // init, split, reassign, refine, merge
  std::size_t clusters = 0;
  double volume = 0.0;
};

using StageLog = std::vector<StageRecord>;

/// Knobs shared by the forward and backward passes. `refine` and `reassign`
/// switch off the corresponding step everywhere (ablations).
struct PassOptions {
  std::size_t t_max = 50;
  bool refine = true;
  bool reassign = true;
  RefineMode refine_mode = RefineMode::incremental;
};

inline PassOptions pass_options(const SolverConfig& cfg) {
  PassOptions o;
  o.t_max = cfg.t_max;
  o.refine = cfg.refine;
  o.reassign = cfg.reassign;
  return o;
}

namespace detail {

inline void log_stage(StageLog& log, const char* stage, const Solution& s) {
  log.push_back({stage, s.size(), total_volume(s)});
}

// reassign -> refine -> reassign, each step optional.
inline Solution polish(Solution s, const Catalog& catalog, const PassOptions& opts, StageLog& log) {
  if (opts.reassign) {
    s = reassign_products(s, catalog);
    log_stage(log, "reassign", s);
  }
  if (opts.refine && s.size() >= 2) {
    s = iterative_refinement(s, catalog, opts.t_max, opts.refine_mode).solution;
    log_stage(log, "refine", s);
  }
  if (opts.reassign) {
    s = reassign_products(s, catalog);
    log_stage(log, "reassign", s);
  }
  return s;
}

}  // namespace detail

// Forward pass ---------------------------------------------------------------------

struct ForwardResult {
  Solution solution;
  bool exhausted = false;  // no valid split left before reaching K_tilde
  StageLog log;
  // State at the end of the first step that reached each cluster count.
  SolutionLadder snapshots;
};

/// Divisive phase: from one cluster, split the best cluster and polish until
/// `k_tilde` clusters exist or no split remains.
inline ForwardResult forward_pass(const Catalog& catalog, std::size_t k_tilde, const PassOptions& opts) {
  if (catalog.empty()) throw Error("empty catalog");
  if (k_tilde < 1) throw Error("K_tilde must be >= 1");
  ForwardResult res;
  Solution s = single_cluster(catalog);
  detail::log_stage(res.log, "init", s);
  res.snapshots.emplace(s.size(), s);

  // Reassignment can empty a cluster, so a step does not always grow C; the
  // cap only guards against pathological cycling.
  const std::size_t max_steps = 4 * k_tilde + catalog.size();
  std::size_t steps = 0;
  while (s.size() < k_tilde) {
    auto plan = global_best_split(s, catalog);
    if (!plan || ++steps > max_steps) {
      res.exhausted = true;
      break;
    }
    s = apply_split(s, *plan, catalog);
    detail::log_stage(res.log, "split", s);
    s = detail::polish(std::move(s), catalog, opts, res.log);
    res.snapshots.emplace(s.size(), s);
  }
  res.solution = std::move(s);
  return res;
}

// Backward pass --------------------------------------------------------------------

struct BackwardResult {
  SolutionLadder ladder;
  StageLog log;
};

/// Agglomerative phase: merge the cheapest pair and polish, recording the
/// solution at every cluster count from the input's C down to `k_min`. The
/// input itself is recorded unmodified at K = C.
///
/// If reassignment empties a cluster and C drops below the step's target,
/// best splits restore it, so every K in [k_min, C] gets a rung.
inline BackwardResult backward_pass(const Solution& start, const Catalog& catalog, std::size_t k_min,
                                    const PassOptions& opts) {
  if (k_min < 1) throw Error("K_min must be >= 1");
  if (start.size() < k_min) throw Error("solution has fewer clusters than K_min");
  BackwardResult res;
  Solution s = start;
  res.ladder.emplace(s.size(), s);
  while (s.size() > k_min) {
    const std::size_t target = s.size() - 1;
    s = combine_clusters(s, catalog);
    detail::log_stage(res.log, "merge", s);
    s = detail::polish(std::move(s), catalog, opts, res.log);
    while (s.size() < target) {
      auto plan = global_best_split(s, catalog);
      if (!plan) break;
      s = apply_split(s, *plan, catalog);
      detail::log_stage(res.log, "split", s);
    }
    res.ladder.insert_or_assign(s.size(), s);
    if (s.size() < target) break;  // dimension-homogeneous clusters only
  }
  return res;
}

// Full solver ----------------------------------------------------------------------

struct SolveResult {
  std::vector<Dims> boxes;
  Solution solution;
  bool exhausted = false;
  std::size_t reached_k_tilde = 0;
  StageLog log;
  SolutionLadder ladder;  // backward-pass rungs, K..reached_k_tilde
};

/// Forward pass to K_tilde, then backward pass down to K.
inline SolveResult solve(const Catalog& catalog, const SolverConfig& cfg) {
  cfg.check();
  const PassOptions opts = pass_options(cfg);
  const std::size_t k_tilde = cfg.forward_only ? cfg.k : cfg.k_tilde;
  ForwardResult fwd = forward_pass(catalog, k_tilde, opts);
  SolveResult res;
  res.exhausted = fwd.exhausted;
  res.reached_k_tilde = fwd.solution.size();
  res.log = std::move(fwd.log);
  const std::size_t k = std::min(cfg.k, fwd.solution.size());
  BackwardResult bwd = backward_pass(fwd.solution, catalog, k, opts);
  res.log.insert(res.log.end(), bwd.log.begin(), bwd.log.end());
  res.solution = bwd.ladder.begin()->second;
  res.ladder = std::move(bwd.ladder);
  res.boxes = res.solution.boxes();
  return res;
}

// Start-point tuning ---------------------------------------------------------------

struct TuneResult {
  std::size_t k_tilde = 0;
  /// xi on the validation shipments per (start K', target K).
  std::map<std::size_t, std::map<std::size_t, double>> grid;
};

/// For every candidate start K' runs one backward pass from the shared
/// forward pass's K'-cluster snapshot down to min(ks), evaluating every
/// target K along the way.
inline TuneResult tuning_grid(const Catalog& train, const std::vector<ShipmentRecord>& validation,
                              const Catalog& validation_catalog, const std::vector<std::size_t>& ks,
                              const std::vector<std::size_t>& candidates, const PassOptions& opts) {
  if (validation.empty()) throw Error("empty validation set");
  if (ks.empty() || candidates.empty()) throw Error("no K or no candidate start points");
  const std::size_t k_lo = *std::min_element(ks.begin(), ks.end());
  const std::size_t k_hi = *std::max_element(ks.begin(), ks.end());
  const std::size_t c_hi = *std::max_element(candidates.begin(), candidates.end());
  for (std::size_t c : candidates) {
    if (c < k_hi) throw Error("candidate start " + std::to_string(c) + " is below K");
  }
  const ForwardResult fwd = forward_pass(train, c_hi, opts);

  TuneResult res;
  std::vector<std::size_t> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t start : sorted) {
    // Largest snapshot not above the candidate (exhausted passes stop early).
    auto it = fwd.snapshots.upper_bound(start);
    --it;
    const Solution& snap = it->second;
    const BackwardResult bwd = backward_pass(snap, train, std::min(k_lo, snap.size()), opts);
    for (std::size_t k : ks) {
      auto rung = bwd.ladder.find(std::min(k, snap.size()));
      if (rung == bwd.ladder.end()) rung = bwd.ladder.begin();
      res.grid[start][k] = evaluate(rung->second.boxes(), validation, validation_catalog).xi;
    }
  }
  return res;
}

/// Start point K' minimizing validation xi for target K; ties go to the
/// smaller K'.
inline TuneResult tune_start(const Catalog& train, const std::vector<ShipmentRecord>& validation,
                             const Catalog& validation_catalog, std::size_t k,
                             const std::vector<std::size_t>& candidates, const PassOptions& opts) {
  TuneResult res = tuning_grid(train, validation, validation_catalog, {k}, candidates, opts);
  bool found = false;
  double best = 0.0;
  for (const auto& [start, row] : res.grid) {  // ascending K'
    const double xi = row.at(k);
    if (!found || xi < best) {
      found = true;
      best = xi;
      res.k_tilde = start;
    }
  }
  return res;
}

// Elbow ------------------------------------------------------------------------------

/// K maximizing the discrete second difference
/// [V(K-1) - V(K)] - [V(K) - V(K+1)] over interior points; smaller K on ties.
inline std::size_t elbow(const KCurve& curve) {
  if (curve.size() < 3) throw Error("elbow needs at least three points");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].k != curve[i - 1].k + 1) throw Error("elbow needs consecutive K values");
  }
  std::size_t best_k = curve[1].k;
  double best = 0.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double d2 = (curve[i - 1].total_volume - curve[i].total_volume) -
                      (curve[i].total_volume - curve[i + 1].total_volume);
    if (i == 1 || d2 > best) {
      best = d2;
      best_k = curve[i].k;
    }
  }
  return best_k;
}

/// V(K) straight from the ladder's training objective.
inline KCurve volume_curve(const SolutionLadder& ladder) {
  KCurve c;
  for (const auto& [k, s] : ladder) c.push_back({k, total_volume(s), 0.0});
  return c;
}

}  // namespace boxsize
