#pragma once

// Reproducible synthetic catalogs and shipment histories.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed
// by the standard; the distributions are implemented here (the std::
// distribution classes are implementation-defined), so output depends only
// on (n, seed, profile) and the platform's libm.
//
// Profiles
//   skewed   three log-normal size modes (small 55%, medium 30%, large 15%);
//            velocity = Pareto(alpha 1.2) * (median volume / volume)^0.9,
//            so small products dominate shipments.
//   uniform  one broad log-normal size mode; velocity = Pareto(alpha 1.5),
//            independent of size.
// Dimensions are rounded to 0.1 cm (minimum 0.5 cm), velocities to 1e-4.
// Period shipments draw `total` single-product shipments with probability
// proportional to velocity times log-normal period noise (sigma 0.3).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "boxsize/eval.hpp"
#include "boxsize/model.hpp"

namespace boxsize::synthetic {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  double lognormal(double median, double sigma) { return median * std::exp(sigma * normal()); }

  // Pareto with scale 1.
  double pareto(double alpha) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::pow(u, -1.0 / alpha);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline double round_dim(double x) { return std::max(0.5, std::round(x * 10.0) / 10.0); }

inline double round_velocity(double x) { return std::round(x * 10000.0) / 10000.0; }

struct Mode {
  double weight;
  std::array<double, 3> median;
  double sigma;
};

}  // namespace detail

inline const std::vector<std::string>& profiles() {
  static const std::vector<std::string> names{"skewed", "uniform"};
  return names;
}

inline std::string product_id(std::size_t i, std::size_t n) {
  int width = 1;
  for (std::size_t m = n; m >= 10; m /= 10) ++width;
  std::string digits = std::to_string(i + 1);
  if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), '0');
  return "p" + digits;
}

/// `n` products with dimensions and expected velocities.
inline std::vector<Product> generate_products(std::size_t n, std::uint64_t seed, const std::string& profile) {
  if (n < 1) throw Error("n must be >= 1");
  std::vector<detail::Mode> modes;
  double alpha = 1.5;
  double size_exponent = 0.0;
  if (profile == "skewed") {
    modes = {{0.55, {20.0, 15.0, 8.0}, 0.35}, {0.30, {40.0, 30.0, 18.0}, 0.30}, {0.15, {80.0, 55.0, 40.0}, 0.30}};
    alpha = 1.2;
    size_exponent = 0.9;
  } else if (profile == "uniform") {
    modes = {{1.0, {30.0, 22.0, 12.0}, 0.5}};
  } else {
    throw Error("unknown profile '" + profile + "'");
  }
  const double median_volume = modes.front().median[0] * modes.front().median[1] * modes.front().median[2];

  detail::Rng rng(seed);
  std::vector<Product> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    std::size_t m = 0;
    while (m + 1 < modes.size() && u >= modes[m].weight) u -= modes[m++].weight;
    const auto& mode = modes[m];
    Dims d{detail::round_dim(rng.lognormal(mode.median[0], mode.sigma)),
           detail::round_dim(rng.lognormal(mode.median[1], mode.sigma)),
           detail::round_dim(rng.lognormal(mode.median[2], mode.sigma))};
    double v = rng.pareto(alpha);
    if (size_exponent != 0.0) v *= std::pow(median_volume / d.volume(), size_exponent);
    v = std::max(0.0001, detail::round_velocity(v));
    out.push_back({product_id(i, n), d, v});
  }
  return out;
}

/// Shipment counts for one period; different `period` values give
/// independent draws from the same products.
inline std::vector<ShipmentRecord> generate_shipments(const std::vector<Product>& products, std::size_t total,
                                                      std::uint64_t seed, std::uint64_t period) {
  if (products.empty()) throw Error("no products");
  detail::Rng rng(detail::splitmix64(seed ^ detail::splitmix64(period + 0x5151)));
  std::vector<double> cumulative(products.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < products.size(); ++j) {
    acc += products[j].velocity * rng.lognormal(1.0, 0.3);
    cumulative[j] = acc;
  }
  std::vector<std::uint64_t> counts(products.size(), 0);
  for (std::size_t s = 0; s < total; ++s) {
    const double x = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) --it;
    ++counts[static_cast<std::size_t>(it - cumulative.begin())];
  }
  std::vector<ShipmentRecord> out;
  for (std::size_t j = 0; j < products.size(); ++j) {
    if (counts[j] > 0) out.push_back({products[j].id, counts[j]});
  }
  return out;
}

/// Products with velocity replaced by observed shipment counts (0 if unseen).
inline std::vector<Product> with_observed_velocity(std::vector<Product> products,
                                                   const std::vector<ShipmentRecord>& shipments) {
  std::unordered_map<std::string, double> seen;
  for (const auto& r : shipments) seen[r.product_id] += static_cast<double>(r.count);
  for (auto& p : products) {
    auto it = seen.find(p.id);
    p.velocity = it == seen.end() ? 0.0 : it->second;
  }
  return products;
}

}  // namespace boxsize::synthetic
