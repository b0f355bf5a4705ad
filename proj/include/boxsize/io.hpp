#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "boxsize/eval.hpp"
#include "boxsize/model.hpp"

namespace boxsize::io {

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_count(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string at_row(std::size_t row) { return " at row " + std::to_string(row); }

// Calls `row_fn(fields, row_number)` for every non-blank data line after
// checking the header. Row numbers are 1-based file line numbers.
template <typename RowFn>
void read_csv(std::istream& in, std::string_view header, RowFn&& row_fn) {
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = line;
    if (row == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    if (!have_header) {
      std::string normalized;
      for (auto f : split_row(view)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized != header) {
        throw Error("missing or wrong header" + at_row(row) + ": expected '" + std::string(header) + "'");
      }
      have_header = true;
      continue;
    }
    row_fn(split_row(view), row);
  }
  if (!have_header) throw Error("missing header: expected '" + std::string(header) + "'");
}

inline std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline constexpr std::string_view kCatalogHeader = "id,length,width,height,velocity";
inline constexpr std::string_view kShipmentsHeader = "product_id,count";
inline constexpr std::string_view kBoxesHeader = "length,width,height";

inline std::vector<Product> read_products(std::istream& in) {
  std::vector<Product> out;
  std::unordered_set<std::string> ids;
  detail::read_csv(in, kCatalogHeader, [&](const std::vector<std::string_view>& f, std::size_t row) {
    if (f.size() != 5 || f[0].empty()) throw Error("malformed row" + detail::at_row(row));
    Product p;
    p.id = std::string(f[0]);
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!detail::parse_double(f[i + 1], v[i]) || !std::isfinite(v[i])) {
        throw Error("malformed number '" + std::string(f[i + 1]) + "'" + detail::at_row(row));
      }
    }
    if (v[0] <= 0.0 || v[1] <= 0.0 || v[2] <= 0.0) throw Error("non-positive dimension" + detail::at_row(row));
    if (v[3] < 0.0) throw Error("negative velocity" + detail::at_row(row));
    if (!ids.insert(p.id).second) throw Error("duplicate id '" + p.id + "'" + detail::at_row(row));
    p.dims = {v[0], v[1], v[2]};
    p.velocity = v[3];
    out.push_back(std::move(p));
  });
  return out;
}

inline Catalog load_catalog(const std::string& path, CatalogOptions opts = {}) {
  auto in = detail::open_file(path);
  try {
    return Catalog(read_products(in), opts);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

inline std::vector<ShipmentRecord> read_shipments(std::istream& in) {
  std::vector<ShipmentRecord> out;
  detail::read_csv(in, kShipmentsHeader, [&](const std::vector<std::string_view>& f, std::size_t row) {
    if (f.size() != 2 || f[0].empty()) throw Error("malformed row" + detail::at_row(row));
    ShipmentRecord r;
    r.product_id = std::string(f[0]);
    if (!detail::parse_count(f[1], r.count) || r.count < 1) {
      throw Error("count must be a positive integer" + detail::at_row(row));
    }
    out.push_back(std::move(r));
  });
  return out;
}

inline std::vector<ShipmentRecord> load_shipments(const std::string& path) {
  auto in = detail::open_file(path);
  try {
    return read_shipments(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Checks that every shipment names a catalog product.
inline void check_shipments(const std::vector<ShipmentRecord>& shipments, const Catalog& catalog) {
  for (std::size_t i = 0; i < shipments.size(); ++i) {
    if (!catalog.contains(shipments[i].product_id)) {
      throw Error("unknown product id '" + shipments[i].product_id + "' in shipment row " + std::to_string(i + 2));
    }
  }
}

inline std::vector<Dims> read_boxes(std::istream& in) {
  std::vector<Dims> out;
  detail::read_csv(in, kBoxesHeader, [&](const std::vector<std::string_view>& f, std::size_t row) {
    if (f.size() != 3) throw Error("malformed row" + detail::at_row(row));
    double v[3];
    for (int i = 0; i < 3; ++i) {
      if (!detail::parse_double(f[i], v[i]) || !std::isfinite(v[i])) {
        throw Error("malformed number '" + std::string(f[i]) + "'" + detail::at_row(row));
      }
      if (v[i] <= 0.0) throw Error("non-positive dimension" + detail::at_row(row));
    }
    out.push_back({v[0], v[1], v[2]});
  });
  return out;
}

inline void write_products(std::ostream& out, const std::vector<Product>& products) {
  out << kCatalogHeader << '\n';
  for (const auto& p : products) {
    out << p.id << ',' << format_number(p.dims.length) << ',' << format_number(p.dims.width) << ','
        << format_number(p.dims.height) << ',' << format_number(p.velocity) << '\n';
  }
}

inline void write_shipments(std::ostream& out, const std::vector<ShipmentRecord>& shipments) {
  out << kShipmentsHeader << '\n';
  for (const auto& r : shipments) out << r.product_id << ',' << r.count << '\n';
}

inline void write_boxes(std::ostream& out, const std::vector<Dims>& boxes) {
  out << kBoxesHeader << '\n';
  for (const auto& b : boxes) {
    out << format_number(b.length) << ',' << format_number(b.width) << ',' << format_number(b.height) << '\n';
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace boxsize::io
