// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance and fixture seed is pinned below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "boxsize/baseline.hpp"
#include "boxsize/commands.hpp"
#include "boxsize/oracle.hpp"
#include "boxsize/pipeline.hpp"
#include "boxsize/synthetic.hpp"

using namespace boxsize;

namespace {

// Pinned tolerances and fixtures -------------------------------------------------

constexpr double kSplitTimeRatio = 2.4;        // C1: 2N vs N sweep time
constexpr double kOracleGap = 1.25;            // C2: V <= 1.25 V*
constexpr int kOracleGapMinCount = 90;         // C2: on at least 90 of 100
constexpr int kForwardOnlyMinWins = 7;         // C5: full <= forward-only on >= 7 of 9 K
constexpr double kScalingSeconds = 300.0;      // C7
constexpr double kSensitivityPoints = 2.0;     // C10: pairwise xi gap in percentage points
constexpr std::uint64_t kFixtureSeed = 20240;  // C5, C10 synthetic fixture
constexpr std::size_t kTuneFrom = 20;          // C5 K~ candidates 20, 24, ..., 64
constexpr std::size_t kTuneTo = 64;
constexpr std::size_t kSensitivityKTilde = 40; // C10

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Integer dims and quarter velocities keep every volume exact in double.
Catalog random_catalog(std::mt19937_64& rng, std::size_t n, int max_dim, bool zero_velocities = false) {
  std::vector<Product> ps;
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%05zu", i);
    double s = draw(1, 200) / 4.0;
    if (zero_velocities && rng() % 8 == 0) s = 0.0;
    ps.push_back({id, {double(draw(1, max_dim)), double(draw(1, max_dim)), double(draw(1, max_dim))}, s});
  }
  return Catalog(std::move(ps));
}

// Every solve in this binary feeds the monotonicity audit of criterion 4.
struct MonotoneAudit {
  std::size_t runs = 0;
  std::size_t log_violations = 0;
  std::size_t ladder_violations = 0;

  void record(const StageLog& log, const SolutionLadder& ladder) {
    ++runs;
    for (std::size_t i = 1; i < log.size(); ++i) {
      if (log[i].stage != "merge" && log[i].volume > log[i - 1].volume) ++log_violations;
    }
    double prev = 0.0;
    bool first = true;
    for (const auto& [k, s] : ladder) {
      const double v = total_volume(s);
      if (!first && v > prev) ++ladder_violations;
      prev = v;
      first = false;
    }
  }
};

MonotoneAudit audit;

SolveResult audited_solve(const Catalog& cat, const SolverConfig& cfg) {
  SolveResult r = solve(cat, cfg);
  audit.record(r.log, r.ladder);
  return r;
}

// 1 ------------------------------------------------------------------------------

Outcome split_oracle() {
  std::mt19937_64 rng(101);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 200;
    const Catalog cat = random_catalog(rng, n, 1 + static_cast<int>(rng() % 40), true);
    std::vector<ProductIndex> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<ProductIndex>(i);
    const Cluster c = make_cluster(all, cat);
    const auto fast = best_split(c, cat);
    const auto slow = oracle::exhaustive_split(c, cat);
    if (fast.has_value() != slow.has_value() || (fast && fast->gain != slow->gain)) ++mismatches;
  }

  // Seconds per best_split call, from batches of at least 50 ms; the two
  // sizes are measured alternately and the median ratio is kept so drift on
  // a shared machine cancels out.
  auto make_cluster_of = [](std::size_t n) {
    std::mt19937_64 g(102 + n);
    std::vector<Product> ps;
    std::uniform_real_distribution<double> d(1.0, 100.0);
    for (std::size_t i = 0; i < n; ++i) ps.push_back({synthetic::product_id(i, n), {d(g), d(g), d(g)}, d(g)});
    return Catalog(std::move(ps));
  };
  auto time_batch = [](const Catalog& cat) {
    std::vector<ProductIndex> all(cat.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ProductIndex>(i);
    const Cluster c = make_cluster(all, cat);
    std::size_t calls = 0;
    const auto t0 = Clock::now();
    double gain_sink = 0.0;
    do {
      gain_sink += best_split(c, cat)->gain;
      ++calls;
    } while (seconds_since(t0) < 0.05);
    return gain_sink > -1.0 ? seconds_since(t0) / static_cast<double>(calls) : 0.0;
  };
  const Catalog small = make_cluster_of(10000);
  const Catalog large = make_cluster_of(20000);
  std::vector<double> ratios;
  for (int round = 0; round < 7; ++round) {
    const double t1 = time_batch(small);
    const double t2 = time_batch(large);
    ratios.push_back(t2 / t1);
  }
  std::sort(ratios.begin(), ratios.end());
  const double ratio = ratios[ratios.size() / 2];
  return {mismatches == 0 && ratio < kSplitTimeRatio,
          std::to_string(mismatches) + " mismatches in 200; median time ratio 2e4/1e4 = " + fmt("%.2f", ratio)};
}

// 2 ------------------------------------------------------------------------------

Outcome global_oracle() {
  std::mt19937_64 rng(201);
  int below = 0, within = 0;
  std::vector<double> gaps;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 7;
    const Catalog cat = random_catalog(rng, n, 20);
    SolverConfig cfg;
    cfg.k = 2;
    cfg.k_tilde = 4;
    const double v = total_volume(audited_solve(cat, cfg).solution);
    const double vstar = oracle::exhaustive_partition(cat, 2).volume;
    if (v < vstar) ++below;
    if (v <= kOracleGap * vstar) ++within;
    gaps.push_back(vstar > 0 ? v / vstar : 1.0);
  }
  std::sort(gaps.begin(), gaps.end());
  const int exact = static_cast<int>(std::count(gaps.begin(), gaps.end(), 1.0));
  std::string d = std::to_string(within) + "/100 within " + fmt("%.2f", kOracleGap) + " V*, " +
                  std::to_string(exact) + " exact, median ratio " + fmt("%.4f", gaps[49]) + ", p90 " +
                  fmt("%.4f", gaps[89]) + ", max " + fmt("%.4f", gaps.back());
  if (below) d += ", " + std::to_string(below) + " below V*";
  return {below == 0 && within >= kOracleGapMinCount, d};
}

// 3 ------------------------------------------------------------------------------

Outcome dp_exactness() {
  std::mt19937_64 rng(301);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(4, n);
    const Catalog cat = random_catalog(rng, n, 8);
    if (dp_1d(cat, k).v_tilde != oracle::exhaustive_1d(cat, k)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 500"};
}

// 4 (evaluated last, over every solve run by this binary) ---------------------------

void monotone_batch() {
  std::mt19937_64 rng(401);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 5 + rng() % 300;
    const Catalog cat = random_catalog(rng, n, 2 + static_cast<int>(rng() % 60));
    SolverConfig cfg;
    cfg.k = 1 + rng() % 6;
    cfg.k_tilde = cfg.k + rng() % 20;
    cfg.refine = rng() % 4 != 0;
    cfg.reassign = rng() % 4 != 0;
    audited_solve(cat, cfg);
  }
}

Outcome monotone() {
  return {audit.log_violations == 0 && audit.ladder_violations == 0,
          std::to_string(audit.runs) + " runs; " + std::to_string(audit.log_violations) + " stage-log and " +
              std::to_string(audit.ladder_violations) + " ladder increases"};
}

// 5 ------------------------------------------------------------------------------

struct Fixture {
  std::vector<Product> products;
  Catalog catalog;
  std::vector<std::vector<ShipmentRecord>> periods;
};

Fixture make_fixture(std::size_t n, std::size_t shipments, std::size_t periods) {
  Fixture f;
  f.products = synthetic::generate_products(n, kFixtureSeed, "skewed");
  f.catalog = Catalog(f.products);
  for (std::size_t p = 0; p < periods; ++p) {
    f.periods.push_back(synthetic::generate_shipments(f.products, shipments, kFixtureSeed, p));
  }
  return f;
}

Outcome ablation() {
  // period 1 picks K~ for the full method (lowest mean xi over K=12..20),
  // period 0 is the test set every method is compared on
  const Fixture f = make_fixture(5000, 50000, 2);
  const auto& test = f.periods[0];
  const auto& validation = f.periods[1];
  std::vector<std::size_t> ks, candidates;
  for (std::size_t k = 12; k <= 20; ++k) ks.push_back(k);
  for (std::size_t c = kTuneFrom; c <= kTuneTo; c += 4) candidates.push_back(c);
  const TuneResult grid = tuning_grid(f.catalog, validation, f.catalog, ks, candidates, pass_options(SolverConfig{}));
  std::size_t k_tilde = 0;
  double best = 0.0;
  for (const auto& [start, row] : grid.grid) {
    double sum = 0.0;
    for (const auto& [k, x] : row) sum += x;
    if (k_tilde == 0 || sum / 9 < best) {
      k_tilde = start;
      best = sum / 9;
    }
  }

  SolverConfig cfg;
  cfg.k_tilde = k_tilde;
  std::map<std::string, std::map<std::size_t, double>> xi;
  for (const std::string m : {"full", "forward_only", "no_reassign", "baseline"}) {
    for (const auto& [k, boxes] : cmd::method_suites(f.catalog, m, 12, 20, cfg)) {
      xi[m][k] = evaluate(boxes, test, f.catalog).xi;
    }
  }
  int reassign_ok = 0, baseline_ok = 0, forward_ok = 0;
  std::string worst;
  for (std::size_t k = 12; k <= 20; ++k) {
    const double full = xi["full"].at(k);
    if (full <= xi["no_reassign"].at(k)) ++reassign_ok;
    else worst += " K" + std::to_string(k) + ":no_reassign";
    if (full <= xi["baseline"].at(k)) ++baseline_ok;
    else worst += " K" + std::to_string(k) + ":baseline";
    if (full <= xi["forward_only"].at(k)) ++forward_ok;
  }
  std::string d = "K~=" + std::to_string(k_tilde) + " (validation); full<=no_reassign " + std::to_string(reassign_ok) + "/9, full<=baseline " +
                  std::to_string(baseline_ok) + "/9, full<=forward_only " + std::to_string(forward_ok) +
                  "/9; xi(K=12) full " + fmt("%.2f", xi["full"].at(12)) + " baseline " +
                  fmt("%.2f", xi["baseline"].at(12)) + ", xi(K=20) full " + fmt("%.2f", xi["full"].at(20)) +
                  " baseline " + fmt("%.2f", xi["baseline"].at(20));
  if (!worst.empty()) d += "; failing:" + worst;
  return {reassign_ok == 9 && baseline_ok == 9 && forward_ok >= kForwardOnlyMinWins, d};
}

// 6 ------------------------------------------------------------------------------

Outcome xi_identities() {
  bool ok = true;
  std::string d;
  {
    Catalog cat({{"p", {1, 1, 1}, 1}});
    const auto r = evaluate({{2, 2, 2}}, {{"p", 1}}, cat);
    if (r.product_volume != 1.0 || r.box_volume != 8.0 || r.xi != 87.5) ok = false;
    d += "87.5 example " + std::string(r.xi == 87.5 ? "exact" : "WRONG");
  }
  std::mt19937_64 rng(601);
  int zero_fail = 0, range_fail = 0;
  for (int t = 0; t < 40; ++t) {
    const Catalog cat = random_catalog(rng, 20 + rng() % 40, 3);
    std::vector<Dims> triples;
    for (const auto& p : cat.products()) triples.push_back(p.dims);
    std::sort(triples.begin(), triples.end(), [](const Dims& a, const Dims& b) {
      return std::tie(a.length, a.width, a.height) < std::tie(b.length, b.width, b.height);
    });
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    SolverConfig cfg;
    cfg.k = triples.size();
    cfg.k_tilde = triples.size();
    const auto r = audited_solve(cat, cfg);
    if (evaluate_velocities(r.boxes, cat).xi != 0.0) ++zero_fail;
    for (std::size_t k = 1; k < 6; ++k) {
      cfg.k = k;
      cfg.k_tilde = k + 4;
      const double x = evaluate_velocities(solve(cat, cfg).boxes, cat).xi;
      if (!(x >= 0.0 && x < 100.0)) ++range_fail;
    }
  }
  ok = ok && zero_fail == 0 && range_fail == 0;
  d += "; K=#distinct triples xi!=0 in " + std::to_string(zero_fail) + "/40; out-of-range xi " +
       std::to_string(range_fail) + "/200";
  return {ok, d};
}

// 7 ------------------------------------------------------------------------------

Outcome scaling() {
  const auto products = synthetic::generate_products(100000, kFixtureSeed + 7, "skewed");
  const Catalog cat(products);
  SolverConfig cfg;
  cfg.k = 20;
  cfg.k_tilde = 60;
  cfg.t_max = 50;
  const auto t0 = Clock::now();
  const auto r = audited_solve(cat, cfg);
  const double s = seconds_since(t0);
  return {s < kScalingSeconds && r.boxes.size() == 20,
          "N=100000 K=20 K~=60: " + fmt("%.1f", s) + " s, " + std::to_string(r.boxes.size()) + " boxes"};
}

// 8 ------------------------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "boxsize_acceptance_determinism";
  fs::remove_all(dir);
  auto at = [&](const char* f) { return (dir / f).string(); };

  std::vector<std::function<std::string()>> runs;
  runs.push_back([&] {
    cmd::GenerateArgs g;
    g.n = 600;
    g.seed = 8;
    g.periods = 2;
    g.out_dir = dir.string();
    const auto out = cmd::generate(g);
    std::string all = out.catalog_csv + out.summary.dump();
    for (const auto& s : out.shipment_csvs) all += s;
    cmd::cmd_generate(g);
    return all;
  });
  runs.push_back([&] {
    cmd::OptimizeArgs a;
    a.catalog = at("catalog.csv");
    a.shipments = at("shipments_1.csv");
    a.config.k = 8;
    a.config.k_tilde = 20;
    const auto doc = cmd::cmd_optimize(a);
    io::write_file(at("report.json"), doc.dump(2));
    return doc.dump(2);
  });
  runs.push_back([&] {
    cmd::EvaluateArgs a;
    a.boxes = at("report.json");
    a.shipments = at("shipments_0.csv");
    a.catalog = at("catalog.csv");
    return cmd::cmd_evaluate(a).dump(2);
  });
  runs.push_back([&] {
    cmd::TuneArgs a;
    a.train = at("catalog.csv");
    a.validation = at("shipments_0.csv");
    a.ks = {6, 8};
    a.candidates = {8, 12, 16};
    const auto doc = cmd::cmd_tune(a);
    return doc.dump(2) + cmd::tune_csv(doc);
  });
  runs.push_back([&] {
    cmd::SweepArgs a;
    a.train = at("catalog.csv");
    a.test = at("shipments_1.csv");
    a.k_min = 4;
    a.k_max = 8;
    a.config.k_tilde = 16;
    const auto doc = cmd::cmd_sweep(a);
    return doc.dump(2) + cmd::sweep_csv(doc);
  });
  runs.push_back([&] {
    cmd::BaselineArgs a;
    a.catalog = at("catalog.csv");
    a.k = 8;
    a.shipments = at("shipments_1.csv");
    return cmd::cmd_baseline(a).dump(2);
  });

  const char* names[] = {"generate", "optimize", "evaluate", "tune", "sweep", "baseline"};
  std::string differing;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string first = runs[i]();
    const std::string second = runs[i]();
    if (first != second) differing += std::string(" ") + names[i];
  }
  fs::remove_all(dir);
  return {differing.empty(), differing.empty() ? "6 commands byte-identical across two runs"
                                               : "differs:" + differing};
}

// 9 ------------------------------------------------------------------------------

Outcome incremental_refinement() {
  std::mt19937_64 rng(901);
  int mismatches = 0;
  std::size_t moves = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng() % 47;
    const std::size_t c = 2 + rng() % std::min<std::size_t>(5, n - 1);
    const Catalog cat = random_catalog(rng, n, 25);
    std::vector<std::vector<ProductIndex>> groups(c);
    for (std::size_t i = 0; i < n; ++i) groups[i < c ? i : rng() % c].push_back(static_cast<ProductIndex>(i));
    const Solution s = solution_from_groups(groups, cat);
    const auto inc = iterative_refinement(s, cat, 200, RefineMode::incremental);
    const auto full = iterative_refinement(s, cat, 200, RefineMode::full);
    if (!(inc.moves == full.moves) || inc.solution.assignment != full.solution.assignment) ++mismatches;
    moves += inc.moves.size();
  }
  return {mismatches == 0,
          std::to_string(mismatches) + " differing move sequences in 100 (" + std::to_string(moves) + " moves)"};
}

// 10 -----------------------------------------------------------------------------

Outcome sensitivity() {
  // periods 0..2 are three training draws, period 3 the common test set
  const Fixture f = make_fixture(5000, 50000, 4);
  const auto& test = f.periods[3];
  std::vector<double> xi;
  for (std::size_t p = 0; p < 3; ++p) {
    const Catalog train(synthetic::with_observed_velocity(f.products, f.periods[p]));
    SolverConfig cfg;
    cfg.k = 14;
    cfg.k_tilde = kSensitivityKTilde;
    xi.push_back(evaluate(audited_solve(train, cfg).boxes, test, f.catalog).xi);
  }
  double gap = 0.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) gap = std::max(gap, std::abs(xi[a] - xi[b]));
  return {gap < kSensitivityPoints, "K=14 xi " + fmt("%.2f", xi[0]) + " / " + fmt("%.2f", xi[1]) + " / " +
                                        fmt("%.2f", xi[2]) + ", max pairwise gap " + fmt("%.3f", gap) + " pp"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "split oracle equivalence and sweep scaling", split_oracle},
      {2, "global oracle bound (N<=8, K=2, K~=4)", global_oracle},
      {3, "1D DP exactness", dp_exactness},
      {5, "ablation dominance (N=5000, K=12..20)", ablation},
      {6, "air-in-box identities", xi_identities},
      {7, "scaling (N=100000)", scaling},
      {8, "determinism of every command", determinism},
      {9, "incremental refinement equivalence", incremental_refinement},
      {10, "sensitivity to the training draw (K=14)", sensitivity},
      {4, "monotone stage log and ladder", [] {
         monotone_batch();
         return monotone();
       }},
  };

  std::vector<std::pair<int, std::string>> lines;
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    char head[160];
    std::snprintf(head, sizeof head, "%s  %2d  %-46s %7.1fs  ", o.pass ? "PASS" : "FAIL", c.id, c.name,
                  seconds_since(t0));
    lines.emplace_back(c.id, head + o.detail);
    std::printf("%s\n", lines.back().second.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
