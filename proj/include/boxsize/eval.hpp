#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "boxsize/model.hpp"

namespace boxsize {

struct ShipmentRecord {
  std::string product_id;
  std::uint64_t count = 1;
};

struct BoxShare {
  Dims box;
  double shipments = 0.0;       // shipments assigned to this box
  double product_volume = 0.0;  // sum of product volumes shipped in it
  double box_volume = 0.0;      // box volume times shipments
  double shipment_share = 0.0;  // percent of fitted shipments
  double volume_share = 0.0;    // percent of total box volume V
};

struct EvalReport {
  double product_volume = 0.0;  // P
  double box_volume = 0.0;      // V
  double xi = 0.0;              // percent air in box
  double fitted_shipments = 0.0;
  std::vector<BoxShare> per_box;
  std::vector<std::pair<std::string, double>> unfittable;
  double oversize_shipments = 0.0;
};

struct EvalOptions {
  // Collapse unfittable shipments into one virtual oversize bucket instead
  // of listing them per product. Either way they are excluded from P, V, xi.
  bool oversize_box = false;
};

/// Smallest-volume box that fits `d`, lowest index on ties; -1 if none fits.
inline int snug_box(const Dims& d, const std::vector<Dims>& boxes) {
  int best = -1;
  double best_vol = 0.0;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    if (!fits(d, boxes[b])) continue;
    const double v = boxes[b].volume();
    if (best < 0 || v < best_vol) {
      best = static_cast<int>(b);
      best_vol = v;
    }
  }
  return best;
}

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Core evaluation over a per-product weight vector (shipment counts or
// velocities). Products are visited in catalog order, so the result does not
// depend on how the weights were grouped into records.
inline EvalReport evaluate_weights(std::vector<Dims> boxes, const std::vector<double>& weight,
                                   const Catalog& catalog, const EvalOptions& opts) {
  if (boxes.empty()) throw Error("empty box suite");
  for (auto& b : boxes) {
    if (!is_valid(b)) throw Error("invalid box dimensions");
    if (catalog.canonicalize()) b = canonical(b);
  }
  EvalReport r;
  r.per_box.resize(boxes.size());
  std::vector<CompensatedSum> pv(boxes.size());
  std::vector<double> count(boxes.size(), 0.0);
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    const double w = weight[j];
    if (w <= 0.0) continue;
    const Product& p = catalog[static_cast<ProductIndex>(j)];
    const int b = snug_box(p.dims, boxes);
    if (b < 0) {
      if (opts.oversize_box) {
        r.oversize_shipments += w;
      } else {
        r.unfittable.emplace_back(p.id, w);
      }
      continue;
    }
    pv[b].add(p.dims.volume() * w);
    count[b] += w;
  }
  CompensatedSum p_total, v_total, n_total;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    auto& s = r.per_box[b];
    s.box = boxes[b];
    s.shipments = count[b];
    s.product_volume = pv[b].value();
    s.box_volume = boxes[b].volume() * count[b];
    p_total.add(s.product_volume);
    v_total.add(s.box_volume);
    n_total.add(s.shipments);
  }
  r.product_volume = p_total.value();
  r.box_volume = v_total.value();
  r.fitted_shipments = n_total.value();
  if (!(r.fitted_shipments > 0.0) || !(r.box_volume > 0.0)) throw Error("no fitted shipments");
  r.xi = 100.0 * (1.0 - r.product_volume / r.box_volume);
  for (auto& s : r.per_box) {
    s.shipment_share = 100.0 * s.shipments / r.fitted_shipments;
    s.volume_share = 100.0 * s.box_volume / r.box_volume;
  }
  return r;
}

}  // namespace detail

/// Ships every record in its snug box and reports product volume P, box
/// volume V and air-in-box xi = 100 (1 - P/V). Shipments that fit no box are
/// reported separately and excluded from all three.
inline EvalReport evaluate(const std::vector<Dims>& boxes, const std::vector<ShipmentRecord>& shipments,
                           const Catalog& catalog, const EvalOptions& opts = {}) {
  std::vector<double> weight(catalog.size(), 0.0);
  std::vector<std::uint64_t> counts(catalog.size(), 0);
  for (const auto& rec : shipments) {
    if (rec.count < 1) throw Error("shipment count must be >= 1 for '" + rec.product_id + "'");
    counts[catalog.index_of(rec.product_id)] += rec.count;
  }
  for (std::size_t j = 0; j < counts.size(); ++j) weight[j] = static_cast<double>(counts[j]);
  return detail::evaluate_weights(boxes, weight, catalog, opts);
}

/// Same metric with catalog velocities as shipment weights.
inline EvalReport evaluate_velocities(const std::vector<Dims>& boxes, const Catalog& catalog,
                                      const EvalOptions& opts = {}) {
  std::vector<double> weight(catalog.size());
  for (std::size_t j = 0; j < catalog.size(); ++j) weight[j] = catalog[static_cast<ProductIndex>(j)].velocity;
  return detail::evaluate_weights(boxes, weight, catalog, opts);
}

// K curve ---------------------------------------------------------------------------

struct KCurveEntry {
  std::size_t k = 0;
  double total_volume = 0.0;
  double xi = 0.0;
};

/// Sorted by K ascending, distinct K.
using KCurve = std::vector<KCurveEntry>;

/// One solution per cluster count, all from a single backward pass.
using SolutionLadder = std::map<std::size_t, Solution>;

/// Evaluates every rung of the ladder on the shipments.
inline KCurve k_sweep(const SolutionLadder& ladder, const std::vector<ShipmentRecord>& shipments,
                      const Catalog& catalog) {
  if (ladder.empty()) throw Error("empty ladder");
  KCurve curve;
  for (const auto& [k, sol] : ladder) {
    const EvalReport r = evaluate(sol.boxes(), shipments, catalog);
    curve.push_back({k, r.box_volume, r.xi});
  }
  return curve;
}

}  // namespace boxsize
