#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace boxsize {

// Error -----------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis ------------------------------------------------------------------------

enum class Axis : std::uint8_t { length = 0, width = 1, height = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::length, Axis::width, Axis::height};

inline constexpr const char* axis_name(Axis a) {
  switch (a) {
    case Axis::length: return "length";
    case Axis::width: return "width";
    case Axis::height: return "height";
  }
  return "?";
}

// Dims ------------------------------------------------------------------------

/// Length/width/height triple in centimeters.
struct Dims {
  double length{0.0};
  double width{0.0};
  double height{0.0};

  constexpr double operator[](Axis a) const {
    switch (a) {
      case Axis::length: return length;
      case Axis::width: return width;
      case Axis::height: return height;
    }
    return 0.0;
  }

  constexpr double volume() const { return length * width * height; }

  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

inline bool is_valid(const Dims& d) {
  return std::isfinite(d.length) && std::isfinite(d.width) && std::isfinite(d.height) &&
         d.length > 0.0 && d.width > 0.0 && d.height > 0.0;
}

/// Sorts the components so that length >= width >= height.
inline Dims canonical(Dims d) {
  std::array<double, 3> v{d.length, d.width, d.height};
  std::sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
  return {v[0], v[1], v[2]};
}

/// Component-wise maximum.
inline constexpr Dims max_dims(const Dims& a, const Dims& b) {
  return {std::max(a.length, b.length), std::max(a.width, b.width), std::max(a.height, b.height)};
}

/// True iff `p` fits inside `box` per dimension. With `canonicalize` both
/// operands are sorted first, i.e. the product may be rotated.
inline bool fits(const Dims& p, const Dims& box, bool canonicalize = false) {
  if (canonicalize) {
    const Dims cp = canonical(p);
    const Dims cb = canonical(box);
    return cp.length <= cb.length && cp.width <= cb.width && cp.height <= cb.height;
  }
  return p.length <= box.length && p.width <= box.width && p.height <= box.height;
}

// Product / Catalog -------------------------------------------------------------

struct Product {
  std::string id;
  Dims dims;
  double velocity{0.0};
};

/// Index of a product inside a Catalog. Catalog order is ascending id order,
/// so comparing indices is the same as comparing ids.
using ProductIndex = std::uint32_t;

struct CatalogOptions {
  bool canonicalize = false;
};

/// Immutable, validated product set sorted by id.
class Catalog {
 public:
  Catalog() = default;

  explicit Catalog(std::vector<Product> products, CatalogOptions opts = {}) : opts_(opts) {
    std::sort(products.begin(), products.end(),
              [](const Product& a, const Product& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < products.size(); ++i) {
      auto& p = products[i];
      if (i > 0 && products[i - 1].id == p.id) {
        throw Error("duplicate product id '" + p.id + "'");
      }
      if (!is_valid(p.dims)) {
        throw Error("non-positive or non-finite dimension for product '" + p.id + "'");
      }
      if (!std::isfinite(p.velocity) || p.velocity < 0.0) {
        throw Error("negative or non-finite velocity for product '" + p.id + "'");
      }
      if (opts_.canonicalize) p.dims = canonical(p.dims);
    }
    if (products.size() > static_cast<std::size_t>(UINT32_MAX)) {
      throw Error("catalog too large");
    }
    products_ = std::move(products);
    index_.reserve(products_.size());
    for (std::size_t i = 0; i < products_.size(); ++i) {
      index_.emplace(products_[i].id, static_cast<ProductIndex>(i));
    }
  }

  std::size_t size() const { return products_.size(); }
  bool empty() const { return products_.empty(); }
  const Product& operator[](ProductIndex i) const { return products_[i]; }
  const std::vector<Product>& products() const { return products_; }
  const CatalogOptions& options() const { return opts_; }
  bool canonicalize() const { return opts_.canonicalize; }

  /// Returns the index of `id` or throws naming the id.
  ProductIndex index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown product id '" + id + "'");
    return it->second;
  }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  double total_velocity() const {
    double s = 0.0;
    for (const auto& p : products_) s += p.velocity;
    return s;
  }

 private:
  CatalogOptions opts_{};
  std::vector<Product> products_;
  std::unordered_map<std::string, ProductIndex> index_;
};

// Cluster ---------------------------------------------------------------------

/// A group of products shipped in one box size. `members` is sorted ascending;
/// `box` is the tight box and `velocity_sum` the member velocity total summed
/// in member order.
struct Cluster {
  std::vector<ProductIndex> members;
  Dims box;
  double velocity_sum{0.0};

  std::size_t size() const { return members.size(); }
};

/// Per-dimension maxima over a non-empty product list.
inline Dims tight_box(const std::vector<Dims>& dims) {
  if (dims.empty()) throw Error("empty cluster");
  Dims b = dims.front();
  for (const auto& d : dims) b = max_dims(b, d);
  return b;
}

inline Dims tight_box(const std::vector<Product>& products) {
  if (products.empty()) throw Error("empty cluster");
  Dims b = products.front().dims;
  for (const auto& p : products) b = max_dims(b, p.dims);
  return b;
}

/// Volume of a box times a velocity. Single place where the multiplication
/// order is fixed, so every caller rounds identically.
inline constexpr double weighted_volume(const Dims& box, double velocity) {
  return box.length * box.width * box.height * velocity;
}

inline double cluster_volume(const Cluster& c) { return weighted_volume(c.box, c.velocity_sum); }

/// Builds a cluster with its cached tight box and velocity sum.
inline Cluster make_cluster(std::vector<ProductIndex> members, const Catalog& catalog) {
  if (members.empty()) throw Error("empty cluster");
  std::sort(members.begin(), members.end());
  Cluster c;
  c.box = catalog[members.front()].dims;
  for (ProductIndex j : members) {
    c.box = max_dims(c.box, catalog[j].dims);
    c.velocity_sum += catalog[j].velocity;
  }
  c.members = std::move(members);
  return c;
}

// Solution --------------------------------------------------------------------

/// A partition of the catalog into clusters plus the inverse map
/// product index -> cluster index.
struct Solution {
  std::vector<Cluster> clusters;
  std::vector<std::uint32_t> assignment;

  std::size_t size() const { return clusters.size(); }

  std::vector<Dims> boxes() const {
    std::vector<Dims> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back(c.box);
    return out;
  }
};

inline void rebuild_assignment(Solution& s, std::size_t n_products) {
  s.assignment.assign(n_products, UINT32_MAX);
  for (std::size_t k = 0; k < s.clusters.size(); ++k) {
    for (ProductIndex j : s.clusters[k].members) s.assignment[j] = static_cast<std::uint32_t>(k);
  }
}

inline Solution make_solution(std::vector<Cluster> clusters, std::size_t n_products) {
  Solution s;
  s.clusters = std::move(clusters);
  rebuild_assignment(s, n_products);
  return s;
}

/// Builds a solution from groups of product indices; empty groups are dropped.
inline Solution solution_from_groups(const std::vector<std::vector<ProductIndex>>& groups,
                                     const Catalog& catalog) {
  std::vector<Cluster> clusters;
  for (const auto& g : groups) {
    if (!g.empty()) clusters.push_back(make_cluster(g, catalog));
  }
  return make_solution(std::move(clusters), catalog.size());
}

/// Every product in one cluster.
inline Solution single_cluster(const Catalog& catalog) {
  if (catalog.empty()) throw Error("empty catalog");
  std::vector<ProductIndex> all(catalog.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<ProductIndex>(j);
  return solution_from_groups({all}, catalog);
}

inline double total_volume(const Solution& s) {
  double v = 0.0;
  for (const auto& c : s.clusters) v += cluster_volume(c);
  return v;
}

/// Throws if the solution is not a consistent partition with tight caches.
inline void validate(const Solution& s, const Catalog& catalog) {
  if (s.assignment.size() != catalog.size()) throw Error("assignment size mismatch");
  std::vector<int> seen(catalog.size(), 0);
  for (std::size_t k = 0; k < s.clusters.size(); ++k) {
    const Cluster& c = s.clusters[k];
    if (c.members.empty()) throw Error("empty cluster " + std::to_string(k));
    if (!std::is_sorted(c.members.begin(), c.members.end())) throw Error("unsorted members");
    Dims box = catalog[c.members.front()].dims;
    double vs = 0.0;
    for (ProductIndex j : c.members) {
      if (j >= catalog.size()) throw Error("member out of range");
      if (seen[j]++) throw Error("product in two clusters: " + catalog[j].id);
      if (s.assignment[j] != k) throw Error("assignment mismatch for " + catalog[j].id);
      box = max_dims(box, catalog[j].dims);
      vs += catalog[j].velocity;
    }
    if (!(box == c.box)) throw Error("stale box in cluster " + std::to_string(k));
    const double tol = 1e-9 * std::max(1.0, std::abs(vs));
    if (std::abs(vs - c.velocity_sum) > tol) throw Error("stale velocity sum in cluster " + std::to_string(k));
  }
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (!seen[j]) throw Error("unassigned product " + catalog[static_cast<ProductIndex>(j)].id);
  }
}

// SolverConfig ------------------------------------------------------------------

struct SolverConfig {
  std::size_t k = 1;
  std::size_t k_tilde = 1;
  std::size_t t_max = 50;
  bool canonicalize = false;
  std::uint64_t seed = 0;
  // Ablation switches.
  bool forward_only = false;
  bool refine = true;
  bool reassign = true;

  void check() const {
    if (k < 1) throw Error("K must be >= 1");
    if (k_tilde < k) throw Error("K_tilde must be >= K");
    if (t_max < 1) throw Error("T_max must be >= 1");
  }
};

}  // namespace boxsize
