#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "boxsize/commands.hpp"

namespace {

using boxsize::cmd::json;

void add_solver_flags(CLI::App* app, boxsize::SolverConfig& cfg, bool with_k) {
  if (with_k) app->add_option("--k", cfg.k, "number of box sizes")->required()->check(CLI::PositiveNumber);
  app->add_option("--k-tilde", cfg.k_tilde, "cluster count where the backward pass starts");
  app->add_option("--t-max", cfg.t_max, "refinement iteration cap")->check(CLI::PositiveNumber);
  app->add_flag("--canonicalize-dims", cfg.canonicalize, "allow rotating products into boxes");
}

void add_ablation_flags(CLI::App* app, boxsize::SolverConfig& cfg, bool& no_refine, bool& no_reassign) {
  app->add_flag("--forward-only", cfg.forward_only, "skip the backward pass");
  app->add_flag("--no-refine", no_refine, "disable iterative refinement");
  app->add_flag("--no-reassign", no_reassign, "disable product reassignment");
}

std::string fmt1(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

void print_boxes(const json& boxes) {
  std::size_t i = 0;
  for (const auto& b : boxes) {
    std::cout << "  box " << ++i << ": " << boxsize::io::format_number(b["length"].get<double>()) << " x "
              << boxsize::io::format_number(b["width"].get<double>()) << " x "
              << boxsize::io::format_number(b["height"].get<double>()) << '\n';
  }
}

void print_summary(const json& doc) {
  const std::string command = doc["command"];
  const json& r = doc["result"];
  if (command == "optimize" || command == "baseline" || command == "evaluate") {
    if (r.contains("boxes")) print_boxes(r["boxes"]);
    if (r.contains("total_volume")) {
      std::cout << "total volume (velocity-weighted): " << boxsize::io::format_number(r["total_volume"].get<double>())
                << '\n';
    }
    if (r.contains("v_tilde")) std::cout << "1D objective: " << boxsize::io::format_number(r["v_tilde"].get<double>()) << '\n';
    if (r.contains("training") && !r["training"].is_null()) {
      std::cout << "training air-in-box: " << fmt1(r["training"]["xi"].get<double>()) << "%\n";
    }
    if (r.contains("evaluation")) {
      const auto& e = r["evaluation"];
      std::cout << "air-in-box: " << fmt1(e["xi"].get<double>()) << "%  (P "
                << boxsize::io::format_number(e["product_volume"].get<double>()) << ", V "
                << boxsize::io::format_number(e["box_volume"].get<double>()) << ")\n";
      if (!e["unfittable"].empty()) std::cout << "unfittable products: " << e["unfittable"].size() << '\n';
    }
    if (r.value("exhausted", false)) {
      std::cout << "note: splits exhausted at C=" << r["reached_k_tilde"].get<std::size_t>() << '\n';
    }
    if (r.contains("elbow_k")) std::cout << "elbow K: " << r["elbow_k"].get<std::size_t>() << '\n';
  } else if (command == "tune") {
    for (const auto& row : r["per_k"]) {
      std::cout << "K=" << row["k"].get<std::size_t>() << "  K_tilde=" << row["k_tilde"].get<std::size_t>()
                << "  validation air-in-box " << fmt1(row["xi"].get<double>()) << "%\n";
    }
  } else if (command == "sweep") {
    for (const auto& [method, curve] : r["curves"].items()) {
      std::cout << method << ":";
      for (const auto& e : curve) std::cout << "  K" << e["k"].get<std::size_t>() << "=" << fmt1(e["xi"].get<double>());
      std::cout << '\n';
    }
    if (r.contains("elbow_k")) std::cout << "elbow K (full): " << r["elbow_k"].get<std::size_t>() << '\n';
  } else if (command == "generate") {
    std::cout << "wrote catalog.csv";
    for (const auto& p : r["periods"]) std::cout << ", " << p["file"].get<std::string>();
    std::cout << '\n';
  }
}

void emit(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out == "-") {
    std::cout << text;
    return;
  }
  if (!out.empty()) boxsize::io::write_file(out, text);
  print_summary(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shipping box size selection"};
  app.require_subcommand(1);
  std::string out;
  std::string csv_out;

  // optimize
  boxsize::cmd::OptimizeArgs opt;
  bool opt_no_refine = false, opt_no_reassign = false;
  std::string opt_shipments, opt_velocity_from;
  auto* optimize = app.add_subcommand("optimize", "compute K box sizes for a catalog");
  optimize->add_option("--catalog", opt.catalog, "catalog CSV")->required();
  optimize->add_option("--shipments", opt_shipments, "shipments CSV to evaluate the suite on");
  optimize->add_option("--velocity-from", opt_velocity_from, "use counts from this shipments CSV as velocities");
  add_solver_flags(optimize, opt.config, true);
  add_ablation_flags(optimize, opt.config, opt_no_refine, opt_no_reassign);
  optimize->add_option("--out", out, "report path ('-' for stdout)");

  // evaluate
  boxsize::cmd::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "air-in-box of a box suite on shipments");
  evaluate->add_option("--boxes", ev.boxes, "boxes CSV or report JSON")->required();
  evaluate->add_option("--shipments", ev.shipments, "shipments CSV")->required();
  evaluate->add_option("--catalog", ev.catalog, "catalog CSV")->required();
  evaluate->add_flag("--canonicalize-dims", ev.canonicalize, "allow rotating products into boxes");
  evaluate->add_flag("--oversize-box", ev.oversize_box, "pool unfittable shipments into a virtual oversize box");
  evaluate->add_option("--out", out, "report path ('-' for stdout)");

  // tune
  boxsize::cmd::TuneArgs tu;
  bool tu_no_refine = false, tu_no_reassign = false;
  std::string tu_valid_catalog;
  auto* tune = app.add_subcommand("tune", "choose the backward-pass start on validation shipments");
  tune->add_option("--catalog", tu.train, "training catalog CSV")->required();
  tune->add_option("--validation", tu.validation, "validation shipments CSV")->required();
  tune->add_option("--validation-catalog", tu_valid_catalog, "catalog for validation products (default: training)");
  tune->add_option("--k", tu.ks, "target K values")->required()->expected(1, -1);
  tune->add_option("--candidates", tu.candidates, "candidate start points")->required()->expected(1, -1);
  tune->add_option("--t-max", tu.config.t_max, "refinement iteration cap")->check(CLI::PositiveNumber);
  tune->add_flag("--canonicalize-dims", tu.config.canonicalize, "allow rotating products into boxes");
  tune->add_flag("--no-refine", tu_no_refine, "disable iterative refinement");
  tune->add_flag("--no-reassign", tu_no_reassign, "disable product reassignment");
  tune->add_option("--out", out, "report path ('-' for stdout)");
  tune->add_option("--csv", csv_out, "plot-ready CSV of the tuning grid");

  // sweep
  boxsize::cmd::SweepArgs sw;
  std::string sw_test_catalog;
  std::vector<std::string> sw_external;
  auto* sweep = app.add_subcommand("sweep", "air-in-box over a K range for each method");
  sweep->add_option("--catalog", sw.train, "training catalog CSV")->required();
  sweep->add_option("--test", sw.test, "test shipments CSV")->required();
  sweep->add_option("--test-catalog", sw_test_catalog, "catalog for test products (default: training)");
  sweep->add_option("--k-min", sw.k_min, "smallest K")->required();
  sweep->add_option("--k-max", sw.k_max, "largest K")->required();
  sweep->add_option("--k-tilde", sw.config.k_tilde, "backward-pass start")->required();
  sweep->add_option("--t-max", sw.config.t_max, "refinement iteration cap")->check(CLI::PositiveNumber);
  sweep->add_flag("--canonicalize-dims", sw.config.canonicalize, "allow rotating products into boxes");
  sweep->add_option("--methods", sw.methods, "subset of full,forward_only,no_refine,no_reassign,baseline");
  sweep->add_option("--external", sw_external, "NAME=FILE curve (CSV k,xi) from another method");
  sweep->add_option("--out", out, "report path ('-' for stdout)");
  sweep->add_option("--csv", csv_out, "plot-ready CSV of all curves");

  // baseline
  boxsize::cmd::BaselineArgs bl;
  std::string bl_shipments;
  auto* baseline = app.add_subcommand("baseline", "exact 1D clustering on product volumes");
  baseline->add_option("--catalog", bl.catalog, "catalog CSV")->required();
  baseline->add_option("--k", bl.k, "number of box sizes")->required()->check(CLI::PositiveNumber);
  baseline->add_option("--shipments", bl_shipments, "shipments CSV to evaluate the suite on");
  baseline->add_flag("--canonicalize-dims", bl.canonicalize, "allow rotating products into boxes");
  baseline->add_option("--out", out, "report path ('-' for stdout)");

  // generate
  boxsize::cmd::GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic catalog and shipment periods");
  generate->add_option("--n", gen.n, "number of products")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("--profile", gen.profile, "skewed or uniform");
  generate->add_option("--shipments", gen.shipments, "shipments per period (default 10 n)");
  generate->add_option("--periods", gen.periods, "number of shipment periods")->check(CLI::PositiveNumber);
  generate->add_option("--dir", gen.out_dir, "output directory");
  generate->add_option("--out", out, "summary report path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    json doc;
    if (*optimize) {
      opt.config.refine = !opt_no_refine;
      opt.config.reassign = !opt_no_reassign;
      if (opt.config.k_tilde < opt.config.k) opt.config.k_tilde = opt.config.k;
      if (!opt_shipments.empty()) opt.shipments = opt_shipments;
      if (!opt_velocity_from.empty()) opt.velocity_from = opt_velocity_from;
      doc = boxsize::cmd::cmd_optimize(opt);
    } else if (*evaluate) {
      doc = boxsize::cmd::cmd_evaluate(ev);
    } else if (*tune) {
      tu.config.refine = !tu_no_refine;
      tu.config.reassign = !tu_no_reassign;
      if (!tu_valid_catalog.empty()) tu.validation_catalog = tu_valid_catalog;
      doc = boxsize::cmd::cmd_tune(tu);
      if (!csv_out.empty()) boxsize::io::write_file(csv_out, boxsize::cmd::tune_csv(doc));
    } else if (*sweep) {
      if (!sw_test_catalog.empty()) sw.test_catalog = sw_test_catalog;
      for (const auto& e : sw_external) {
        const auto eq = e.find('=');
        if (eq == std::string::npos || eq == 0) throw boxsize::Error("--external expects NAME=FILE");
        sw.external[e.substr(0, eq)] = e.substr(eq + 1);
      }
      doc = boxsize::cmd::cmd_sweep(sw);
      if (!csv_out.empty()) boxsize::io::write_file(csv_out, boxsize::cmd::sweep_csv(doc));
    } else if (*baseline) {
      if (!bl_shipments.empty()) bl.shipments = bl_shipments;
      doc = boxsize::cmd::cmd_baseline(bl);
    } else if (*generate) {
      doc = boxsize::cmd::cmd_generate(gen);
    }
    emit(doc, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
