#pragma once

// Command layer behind the `boxsize` CLI. Every command is a pure function of
// its input files and options and returns one JSON report; the CLI only parses
// flags, writes the report, and prints a short human summary.

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "boxsize/baseline.hpp"
#include "boxsize/eval.hpp"
#include "boxsize/io.hpp"
#include "boxsize/pipeline.hpp"
#include "boxsize/synthetic.hpp"

namespace boxsize::cmd {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Helpers -------------------------------------------------------------------------

/// Ascending volume, then length, width, height.
inline std::vector<Dims> sorted_by_volume(std::vector<Dims> boxes) {
  std::stable_sort(boxes.begin(), boxes.end(), [](const Dims& a, const Dims& b) {
    if (a.volume() != b.volume()) return a.volume() < b.volume();
    if (a.length != b.length) return a.length < b.length;
    if (a.width != b.width) return a.width < b.width;
    return a.height < b.height;
  });
  return boxes;
}

inline json dims_json(const Dims& d) {
  return json{{"length", d.length}, {"width", d.width}, {"height", d.height}, {"volume", d.volume()}};
}

inline json boxes_json(const std::vector<Dims>& boxes) {
  json arr = json::array();
  for (const auto& b : boxes) arr.push_back(dims_json(b));
  return arr;
}

inline json eval_json(const EvalReport& r) {
  json per_box = json::array();
  for (std::size_t i = 0; i < r.per_box.size(); ++i) {
    const auto& s = r.per_box[i];
    per_box.push_back({{"box", i + 1},
                       {"dims", dims_json(s.box)},
                       {"shipments", s.shipments},
                       {"product_volume", s.product_volume},
                       {"box_volume", s.box_volume},
                       {"shipment_share", s.shipment_share},
                       {"volume_share", s.volume_share}});
  }
  json unfit = json::array();
  for (const auto& [id, n] : r.unfittable) unfit.push_back({{"product_id", id}, {"count", n}});
  return json{{"product_volume", r.product_volume},
              {"box_volume", r.box_volume},
              {"xi", r.xi},
              {"fitted_shipments", r.fitted_shipments},
              {"per_box", per_box},
              {"unfittable", unfit},
              {"oversize_shipments", r.oversize_shipments}};
}

inline json stage_log_json(const StageLog& log) {
  json arr = json::array();
  for (const auto& s : log) arr.push_back({{"stage", s.stage}, {"clusters", s.clusters}, {"volume", s.volume}});
  return arr;
}

inline json curve_json(const KCurve& c) {
  json arr = json::array();
  for (const auto& e : c) arr.push_back({{"k", e.k}, {"total_volume", e.total_volume}, {"xi", e.xi}});
  return arr;
}

inline json header(const std::string& command) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"units", "cm"}};
}

inline json solver_config_json(const SolverConfig& c) {
  return json{{"k", c.k},
              {"k_tilde", c.k_tilde},
              {"t_max", c.t_max},
              {"forward_only", c.forward_only},
              {"no_refine", !c.refine},
              {"no_reassign", !c.reassign},
              {"canonicalize_dims", c.canonicalize}};
}

/// Velocity-weighted evaluation, or null when every velocity is zero.
inline json training_json(const std::vector<Dims>& boxes, const Catalog& catalog) {
  try {
    return eval_json(evaluate_velocities(boxes, catalog));
  } catch (const Error&) {
    return nullptr;
  }
}

/// Boxes from a `length,width,height` CSV or from a report's result.boxes.
inline std::vector<Dims> load_boxes(const std::string& path) {
  auto in = io::detail::open_file(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') {
      const json doc = json::parse(text);
      std::vector<Dims> boxes;
      for (const auto& b : doc.at("result").at("boxes")) {
        boxes.push_back({b.at("length").get<double>(), b.at("width").get<double>(), b.at("height").get<double>()});
      }
      if (boxes.empty()) throw Error("report has no boxes");
      return boxes;
    }
    std::istringstream is(text);
    auto boxes = io::read_boxes(is);
    if (boxes.empty()) throw Error("no boxes");
    return boxes;
  } catch (const json::exception& e) {
    throw Error(path + ": bad report: " + e.what());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

// optimize ------------------------------------------------------------------------

struct OptimizeArgs {
  std::string catalog;
  std::optional<std::string> shipments;       // evaluated against the final boxes
  std::optional<std::string> velocity_from;   // replace velocities by these shipment counts
  SolverConfig config;
};

inline Catalog load_training_catalog(const std::string& path, const std::optional<std::string>& velocity_from,
                                     bool canonicalize) {
  if (!velocity_from) return io::load_catalog(path, {canonicalize});
  auto in = io::detail::open_file(path);
  auto products = io::read_products(in);
  const auto ships = io::load_shipments(*velocity_from);
  return Catalog(synthetic::with_observed_velocity(std::move(products), ships), {canonicalize});
}

inline json cmd_optimize(const OptimizeArgs& a) {
  a.config.check();
  const Catalog catalog = load_training_catalog(a.catalog, a.velocity_from, a.config.canonicalize);
  const SolveResult res = solve(catalog, a.config);
  const auto boxes = sorted_by_volume(res.boxes);

  json result;
  result["k_requested"] = a.config.k;
  result["k_achieved"] = boxes.size();
  result["exhausted"] = res.exhausted;
  result["reached_k_tilde"] = res.reached_k_tilde;
  result["total_volume"] = total_volume(res.solution);
  result["boxes"] = boxes_json(boxes);
  result["training"] = training_json(boxes, catalog);
  if (a.shipments) {
    const auto ships = io::load_shipments(*a.shipments);
    io::check_shipments(ships, catalog);
    result["evaluation"] = eval_json(evaluate(boxes, ships, catalog));
  }
  KCurve curve;
  for (const auto& [k, s] : res.ladder) {
    double xi = 0.0;
    try {
      xi = evaluate_velocities(s.boxes(), catalog).xi;
    } catch (const Error&) {
    }
    curve.push_back({k, total_volume(s), xi});
  }
  result["k_curve"] = curve_json(curve);
  if (curve.size() >= 3) result["elbow_k"] = elbow(curve);
  result["stage_log"] = stage_log_json(res.log);

  json doc = header("optimize");
  doc["config"] = solver_config_json(a.config);
  doc["result"] = std::move(result);
  return doc;
}

// evaluate ------------------------------------------------------------------------

struct EvaluateArgs {
  std::string boxes;
  std::string shipments;
  std::string catalog;
  bool canonicalize = false;
  bool oversize_box = false;
};

inline json cmd_evaluate(const EvaluateArgs& a) {
  const Catalog catalog = io::load_catalog(a.catalog, {a.canonicalize});
  const auto ships = io::load_shipments(a.shipments);
  io::check_shipments(ships, catalog);
  const auto boxes = sorted_by_volume(load_boxes(a.boxes));
  json doc = header("evaluate");
  doc["config"] = {{"canonicalize_dims", a.canonicalize}, {"oversize_box", a.oversize_box}};
  json result;
  result["boxes"] = boxes_json(boxes);
  result["evaluation"] = eval_json(evaluate(boxes, ships, catalog, {a.oversize_box}));
  doc["result"] = std::move(result);
  return doc;
}

// tune ----------------------------------------------------------------------------

struct TuneArgs {
  std::string train;
  std::string validation;                     // validation shipments
  std::optional<std::string> validation_catalog;
  std::vector<std::size_t> ks;
  std::vector<std::size_t> candidates;
  SolverConfig config;                        // t_max and ablation switches
};

inline json cmd_tune(const TuneArgs& a) {
  const Catalog train = io::load_catalog(a.train, {a.config.canonicalize});
  const Catalog valid_cat =
      a.validation_catalog ? io::load_catalog(*a.validation_catalog, {a.config.canonicalize}) : train;
  const auto ships = io::load_shipments(a.validation);
  io::check_shipments(ships, valid_cat);
  const PassOptions opts = pass_options(a.config);
  const TuneResult grid = tuning_grid(train, ships, valid_cat, a.ks, a.candidates, opts);

  json per_k = json::array();
  for (std::size_t k : a.ks) {
    std::size_t best_start = 0;
    double best = 0.0;
    bool found = false;
    for (const auto& [start, row] : grid.grid) {
      const double xi = row.at(k);
      if (!found || xi < best) {
        found = true;
        best = xi;
        best_start = start;
      }
    }
    per_k.push_back({{"k", k}, {"k_tilde", best_start}, {"xi", best}});
  }
  json cells = json::array();
  for (const auto& [start, row] : grid.grid)
    for (const auto& [k, xi] : row) cells.push_back({{"start", start}, {"k", k}, {"xi", xi}});

  json doc = header("tune");
  doc["config"] = {{"ks", a.ks}, {"candidates", a.candidates}, {"t_max", a.config.t_max},
                   {"no_refine", !a.config.refine}, {"no_reassign", !a.config.reassign},
                   {"canonicalize_dims", a.config.canonicalize}};
  doc["result"] = {{"per_k", per_k}, {"grid", cells}};
  return doc;
}

inline std::string tune_csv(const json& report) {
  std::ostringstream out;
  out << "start,k,xi\n";
  for (const auto& c : report.at("result").at("grid")) {
    out << c.at("start").get<std::size_t>() << ',' << c.at("k").get<std::size_t>() << ','
        << io::format_number(c.at("xi").get<double>()) << '\n';
  }
  return out.str();
}

// sweep ---------------------------------------------------------------------------

inline const std::vector<std::string>& sweep_methods() {
  static const std::vector<std::string> m{"full", "forward_only", "no_refine", "no_reassign", "baseline"};
  return m;
}

struct SweepArgs {
  std::string train;
  std::string test;                           // test shipments
  std::optional<std::string> test_catalog;
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  SolverConfig config;                        // k_tilde, t_max, canonicalize
  std::vector<std::string> methods = sweep_methods();
  std::map<std::string, std::string> external;  // name -> CSV `k,xi`
};

/// Boxes for every K in [k_min, k_max] for one method on one training catalog.
inline std::map<std::size_t, std::vector<Dims>> method_suites(const Catalog& train, const std::string& method,
                                                              std::size_t k_min, std::size_t k_max,
                                                              const SolverConfig& cfg) {
  std::map<std::size_t, std::vector<Dims>> out;
  if (method == "baseline") {
    const auto all = dp_1d_all(train, std::min(k_max, train.size()));
    for (std::size_t k = k_min; k <= k_max && k <= all.size(); ++k) out[k] = all[k - 1].boxes;
    return out;
  }
  PassOptions opts = pass_options(cfg);
  if (method == "forward_only") {
    const ForwardResult fwd = forward_pass(train, k_max, opts);
    for (const auto& [k, s] : fwd.snapshots)
      if (k >= k_min && k <= k_max) out[k] = s.boxes();
    return out;
  }
  if (method == "no_refine") {
    opts.refine = false;
  } else if (method == "no_reassign") {
    opts.reassign = false;
  } else if (method != "full") {
    throw Error("unknown method '" + method + "'");
  }
  const ForwardResult fwd = forward_pass(train, std::max(cfg.k_tilde, k_max), opts);
  const BackwardResult bwd = backward_pass(fwd.solution, train, std::min(k_min, fwd.solution.size()), opts);
  for (const auto& [k, s] : bwd.ladder)
    if (k >= k_min && k <= k_max) out[k] = s.boxes();
  return out;
}

inline KCurve read_external_curve(const std::string& path) {
  auto in = io::detail::open_file(path);
  KCurve c;
  io::detail::read_csv(in, "k,xi", [&](const std::vector<std::string_view>& f, std::size_t row) {
    std::uint64_t k = 0;
    double xi = 0.0;
    if (f.size() != 2 || !io::detail::parse_count(f[0], k) || !io::detail::parse_double(f[1], xi)) {
      throw Error(path + ": malformed row" + io::detail::at_row(row));
    }
    c.push_back({static_cast<std::size_t>(k), 0.0, xi});
  });
  std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  return c;
}

inline json cmd_sweep(const SweepArgs& a) {
  if (a.k_min < 1 || a.k_max < a.k_min) throw Error("need 1 <= k-min <= k-max");
  if (a.config.k_tilde < a.k_max) throw Error("K_tilde must be >= k-max");
  const Catalog train = io::load_catalog(a.train, {a.config.canonicalize});
  const Catalog test_cat = a.test_catalog ? io::load_catalog(*a.test_catalog, {a.config.canonicalize}) : train;
  const auto ships = io::load_shipments(a.test);
  io::check_shipments(ships, test_cat);

  json curves;
  json boxes_by_method;
  std::optional<std::size_t> full_elbow;
  for (const auto& m : a.methods) {
    const auto suites = method_suites(train, m, a.k_min, a.k_max, a.config);
    KCurve curve;
    json suite_boxes = json::array();
    for (const auto& [k, boxes] : suites) {
      const auto sorted = sorted_by_volume(boxes);
      const EvalReport r = evaluate(sorted, ships, test_cat);
      curve.push_back({k, r.box_volume, r.xi});
      suite_boxes.push_back({{"k", k}, {"boxes", boxes_json(sorted)}});
    }
    curves[m] = curve_json(curve);
    boxes_by_method[m] = std::move(suite_boxes);
    if (m == "full" && curve.size() >= 3) full_elbow = elbow(curve);
  }
  for (const auto& [name, path] : a.external) curves[name] = curve_json(read_external_curve(path));

  json doc = header("sweep");
  doc["config"] = {{"k_min", a.k_min}, {"k_max", a.k_max}, {"k_tilde", a.config.k_tilde},
                   {"t_max", a.config.t_max}, {"canonicalize_dims", a.config.canonicalize},
                   {"methods", a.methods}};
  json result;
  result["curves"] = std::move(curves);
  if (full_elbow) result["elbow_k"] = *full_elbow;
  result["suites"] = std::move(boxes_by_method);
  doc["result"] = std::move(result);
  return doc;
}

/// Plot-ready rows `method,k,total_volume,xi`.
inline std::string sweep_csv(const json& report) {
  std::ostringstream out;
  out << "method,k,total_volume,xi\n";
  for (const auto& [method, curve] : report.at("result").at("curves").items()) {
    for (const auto& e : curve) {
      out << method << ',' << e.at("k").get<std::size_t>() << ','
          << io::format_number(e.at("total_volume").get<double>()) << ','
          << io::format_number(e.at("xi").get<double>()) << '\n';
    }
  }
  return out.str();
}

// baseline ------------------------------------------------------------------------

struct BaselineArgs {
  std::string catalog;
  std::optional<std::string> shipments;
  std::size_t k = 1;
  bool canonicalize = false;
};

inline json cmd_baseline(const BaselineArgs& a) {
  const Catalog catalog = io::load_catalog(a.catalog, {a.canonicalize});
  const BaselineResult r = dp_1d(catalog, a.k);
  const auto boxes = sorted_by_volume(r.boxes);
  json result;
  result["k"] = a.k;
  result["v_tilde"] = r.v_tilde;
  result["total_volume"] = total_volume(r.solution);
  result["boxes"] = boxes_json(boxes);
  result["training"] = training_json(boxes, catalog);
  if (a.shipments) {
    const auto ships = io::load_shipments(*a.shipments);
    io::check_shipments(ships, catalog);
    result["evaluation"] = eval_json(evaluate(boxes, ships, catalog));
  }
  json doc = header("baseline");
  doc["config"] = {{"k", a.k}, {"canonicalize_dims", a.canonicalize}};
  doc["result"] = std::move(result);
  return doc;
}

// generate ------------------------------------------------------------------------

struct GenerateArgs {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string profile = "skewed";
  std::size_t shipments = 0;  // per period; 0 means 10 * n
  std::size_t periods = 1;
  std::string out_dir = ".";
};

struct GeneratedFiles {
  std::string catalog_csv;
  std::vector<std::string> shipment_csvs;
  json summary;
};

/// Share (percent) of shipments whose product lies in the bottom half of
/// products by volume.
inline double bottom_half_share(const std::vector<Product>& products, const std::vector<ShipmentRecord>& ships) {
  std::vector<double> vols;
  for (const auto& p : products) vols.push_back(p.dims.volume());
  std::vector<double> sorted = vols;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(sorted.size() - 1) / 2];
  std::unordered_map<std::string, double> vol_of;
  for (std::size_t i = 0; i < products.size(); ++i) vol_of[products[i].id] = vols[i];
  double low = 0.0, all = 0.0;
  for (const auto& r : ships) {
    all += static_cast<double>(r.count);
    if (vol_of.at(r.product_id) <= median) low += static_cast<double>(r.count);
  }
  return all > 0.0 ? 100.0 * low / all : 0.0;
}

inline GeneratedFiles generate(const GenerateArgs& a) {
  if (a.periods < 1) throw Error("periods must be >= 1");
  const auto products = synthetic::generate_products(a.n, a.seed, a.profile);
  const std::size_t total = a.shipments ? a.shipments : 10 * a.n;
  GeneratedFiles g;
  std::ostringstream cat;
  io::write_products(cat, products);
  g.catalog_csv = cat.str();
  json periods = json::array();
  for (std::size_t p = 0; p < a.periods; ++p) {
    const auto ships = synthetic::generate_shipments(products, total, a.seed, p);
    std::ostringstream s;
    io::write_shipments(s, ships);
    g.shipment_csvs.push_back(s.str());
    periods.push_back({{"period", p},
                       {"file", "shipments_" + std::to_string(p) + ".csv"},
                       {"rows", ships.size()},
                       {"bottom_half_volume_share", bottom_half_share(products, ships)}});
  }
  g.summary = header("generate");
  g.summary["config"] = {{"n", a.n}, {"seed", a.seed}, {"profile", a.profile},
                         {"shipments_per_period", total}, {"periods", a.periods}};
  g.summary["result"] = {{"catalog", "catalog.csv"}, {"periods", periods}};
  return g;
}

inline json cmd_generate(const GenerateArgs& a) {
  const GeneratedFiles g = generate(a);
  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  io::write_file((fs::path(a.out_dir) / "catalog.csv").string(), g.catalog_csv);
  for (std::size_t p = 0; p < g.shipment_csvs.size(); ++p) {
    io::write_file((fs::path(a.out_dir) / ("shipments_" + std::to_string(p) + ".csv")).string(), g.shipment_csvs[p]);
  }
  return g.summary;
}

}  // namespace boxsize::cmd
