// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "fairflow/assignment.hpp"
#include "fairflow/cso.hpp"
#include "fairflow/errors.hpp"
#include "fairflow/fixtures.hpp"
#include "fairflow/latency.hpp"
#include "fairflow/tntp_io.hpp"
#include "fairflow/unfairness.hpp"
#include "suites.hpp"

using namespace fairflow;

namespace {

int failures = 0;

void report(const std::string& id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  [%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void skip(const std::string& id, const std::string& name, const std::string& detail) {
  std::printf("SKIP  [%s] %s: %s\n", id.c_str(), name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

NashBaseline baseline_of(const fixtures::FixtureOracle& fx, double theta = 1e-6) {
  return baseline_from_flow(fx.instance, fx.nash_flow, theta);
}

SolveOptions tight(double theta = 1e-6) {
  SolveOptions o;
  o.gap_tol = 1e-8;
  o.theta = theta;
  return o;
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Worked examples on closed-form flows (tolerance 1e-9)
// ---------------------------------------------------------------------------

void exact_examples() {
  constexpr double tol = 1e-9;
  {
    const auto fx = fixtures::pigou_series(1.0);
    const auto nash = baseline_of(fx);
    const double a = measure(fx.instance, fx.flows.at("decomposition_a"), nash, 1e-6).loaded;
    const double b = measure(fx.instance, fx.flows.at("decomposition_b"), nash, 1e-6).loaded;
    report("1a", "series Pigou, two decompositions of one edge flow", near(a, 2, tol) && near(b, 1, tol),
           "U^L = " + num(a) + " and " + num(b) + " (expected 2 and 1)");
  }
  {
    const auto fx = fixtures::pigou_series(1.0);
    const auto r = measure(fx.instance, fx.system_flow, baseline_of(fx), 1e-6);
    report("1b", "series Pigou optimal split", near(r.loaded, 2, tol) && near(r.ue, 1, tol),
           "U^L = " + num(r.loaded) + ", U^UE = " + num(r.ue) + " (expected 2, 1)");
  }
  {
    const auto fx = fixtures::braess(1.0);
    PathFlow f(1);
    f.add(0, {0, 2}, 0.5);
    f.add(0, {1, 3}, 0.5);
    const auto r = measure(fx.instance, f, baseline_of(fx), 1e-6);
    report("1c", "Braess r=1, outer paths", near(r.loaded, 1, tol) && near(r.ue, 0.75, tol),
           "U^L = " + num(r.loaded) + ", U^UE = " + num(r.ue) + " (expected 1, 0.75)");
  }
  {
    const auto fx = fixtures::multi_commodity();
    const auto r = measure(fx.instance, fx.system_flow, baseline_of(fx), 1e-6);
    report("1d", "two-commodity optimum", near(r.ue, 1.5, tol) && near(r.loaded, 1, tol),
           "U^UE = " + num(r.ue) + ", U^L = " + num(r.loaded) + " (expected 1.5, 1)");
  }
  {
    // Pigou x / 1.5: alpha-flows in closed form, x(alpha) = min(1, 1.5 / (1 + alpha)).
    const auto fx = fixtures::pigou(LatencyFn::affine(1, 0), 1.5, 1.0);
    const NashBaseline nash = baseline_of(fx);
    const double c_star = total_cost(fx.instance, fx.system_flow);
    std::vector<FrontierPoint> points;
    for (double alpha : alpha_grid(0.01)) {
      const double x = std::min(1.0, 1.5 / (1.0 + alpha));
      PathFlow f(1);
      f.add(0, {0}, x);
      if (x < 1.0) f.add(0, {1}, 1.0 - x);
      points.push_back(evaluate_flow(fx.instance, f, nash, c_star, 1e-6, alpha));
    }
    const auto so = measure(fx.instance, fx.system_flow, nash, 1e-6);
    const double cl = cso_cost(points, {Measure::kLoaded, 0.5}).cost;
    const double ca = cso_cost(points, {Measure::kAverage, 0.5}).cost;
    const bool pass = near(cl, 1.0, tol) && near(c_star, 0.9375, tol) && near(so.average, 1.25, tol) &&
                      ca <= 0.9375 + tol && ca < 1.0;
    report("1e", "Pigou x / 1.5, beta = 0.5", pass,
           "C^L = " + num(cl) + ", C* = " + num(c_star) + " with U^A = " + num(so.average) + ", C^A = " + num(ca));
  }
  {
    const auto fx = fixtures::braess(0.75);
    const Frontier f = sweep(fx.instance, alpha_grid(0.01), tight());
    const CsoQuery loaded{Measure::kLoaded, 0.05}, average{Measure::kAverage, 0.05};
    const double sweep_l = cso_cost(f.points, loaded).cost;
    const double sweep_a = cso_cost(f.points, average).cost;
    std::vector<FrontierPoint> candidates = f.points;
    candidates.push_back(
        evaluate_flow(fx.instance, fx.flows.at("outer_paths"), f.baseline, f.system_cost, 1e-6, std::nan("")));
    const double cl = cso_cost(candidates, loaded).cost;
    const double ca = cso_cost(candidates, average).cost;
    const double target = 33.0 / 32.0;
    const bool pass = near(cl, target, tol) && near(ca, target, tol) && sweep_l >= target - tol && sweep_a >= target - tol;
    report("1f", "Braess r=3/4, beta = 0.05", pass,
           "C^L = " + num(cl) + ", C^A = " + num(ca) + " (expected 33/32); cheapest feasible swept flow " + num(sweep_l) +
               " / " + num(sweep_a));
  }
}

// ---------------------------------------------------------------------------
// 2. Solver against closed forms (gap 1e-8)
// ---------------------------------------------------------------------------

void solver_examples() {
  {
    const auto fx = fixtures::pigou(LatencyFn::affine(1, 0), 1.0, 1.0);
    SolveResult so, ne;
    const double t = seconds([&] {
      so = solve(fx.instance, Objective::system(), tight());
      ne = solve(fx.instance, Objective::nash(), tight());
    });
    const bool pass = so.converged && ne.converged && near(so.edge_flow[0], 0.5, 1e-5) &&
                      near(so.edge_flow[1], 0.5, 1e-5) && near(ne.edge_flow[0], 1.0, 1e-5) &&
                      near(ne.edge_flow[1], 0.0, 1e-5) && near(so.cost, 0.75, 1e-6) && near(ne.cost, 1.0, 1e-6) && t < 1;
    report("2a", "Pigou x / 1 optimum and equilibrium", pass,
           "SO (" + num(so.edge_flow[0]) + ", " + num(so.edge_flow[1]) + ") cost " + num(so.cost) + "; NE (" +
               num(ne.edge_flow[0]) + ", " + num(ne.edge_flow[1]) + ") cost " + num(ne.cost) + "; " + num(t) + " s");
  }
  {
    const auto fx = fixtures::braess(0.75);
    SolveResult so;
    const double t = seconds([&] { so = solve(fx.instance, Objective::system(), tight()); });
    const EdgeFlow expected{0.5, 0.25, 0.25, 0.5, 0.25};
    double dev = 0.0;
    for (std::size_t e = 0; e < expected.size(); ++e) dev = std::max(dev, std::abs(so.edge_flow[e] - expected[e]));
    report("2b", "Braess r=3/4 optimum", so.converged && near(so.cost, 1.0, 1e-6) && dev <= 1e-5 && t < 1,
           "cost " + num(so.cost) + ", max edge deviation " + num(dev) + "; " + num(t) + " s");
  }
  for (int n : {1, 2, 4}) {
    const double eps = 1e-6;
    const auto fx = fixtures::pigou(LatencyFn::monomial(1.0, n), eps, 1.0);
    // The n = 1 optimum puts 5e-7 on the upper link, below the default used-path threshold.
    const double theta = 1e-9;
    SolveResult so;
    const double t = seconds([&] { so = solve(fx.instance, Objective::system(), tight(theta)); });
    const double x = std::pow(eps / (n + 1), 1.0 / n);
    const double rel = std::abs(so.edge_flow[0] - x) / x;
    const double ua = measure(fx.instance, so.path_flow, nash_baseline(fx.instance, tight(theta)), theta).average;
    const bool pass = so.converged && rel <= 1e-4 && ua >= n + 1 - 0.1 && ua <= n + 1 + 1e-3 && t < 1;
    report("2c", "x^" + std::to_string(n) + " / eps Pigou optimum", pass,
           "upper flow " + num(so.edge_flow[0]) + " vs " + num(x) + " (rel " + num(rel) + "), U^A = " + num(ua) +
               " in [" + num(n + 1 - 0.1) + ", " + num(n + 1 + 1e-3) + "]; " + num(t) + " s");
  }
}

// ---------------------------------------------------------------------------
// 3. Seeded property suites
// ---------------------------------------------------------------------------

void property_suites() {
  double total = 0.0;
  suites::Outcome a, b, c, d;
  total += seconds([&] { a = suites::average_below_loaded(); });
  report("3a", "U^A <= U^L and equality only when fair", a.ok(), a.summary());
  total += seconds([&] { b = suites::loaded_above_ue(); });
  report("3b", "single-commodity optimum: U^L >= U^UE", b.ok() && b.checked > 0, b.summary());
  total += seconds([&] { c = suites::steepness_bound(); });
  report("3c", "optimum unfairness <= n + 1 for degree-n polynomials", c.ok() && c.checked > 0, c.summary());
  total += seconds([&] { d = suites::parallel_link_prefix(); });
  report("3d", "parallel links: feasible swept flows fill cheapest links first", d.ok() && d.checked > 0, d.summary());
  report("3e", "property suites runtime", total < 30.0, num(total) + " s (budget 30 s)");
}

// ---------------------------------------------------------------------------
// 4. Benchmark network
// ---------------------------------------------------------------------------

struct Reference {
  const char* name;
  const char* dir;
  const char* stem;
  int nodes;
  int links;
  int commodities;
};

constexpr Reference kNetworks[] = {
    {"Sioux Falls", "siouxfalls", "SiouxFalls", 24, 76, 528},
    {"Anaheim", "anaheim", "Anaheim", 416, 914, 1406},
    {"Eastern Massachusetts", "ema", "EMA", 74, 258, 1113},
    {"Berlin Friedrichshain", "friedrichshain", "friedrichshain-center", 224, 523, 506},
};

unsigned thread_count() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FAIRFLOW_THREADS")) threads = std::max(1, std::atoi(env));
  return threads;
}

void benchmark(const std::string& data_dir) {
  const Reference& sf = kNetworks[0];
  const std::string base = data_dir + "/" + sf.dir + "/" + sf.stem;
  TntpNet net;
  TntpTrips trips;
  try {
    net = parse_net(read_file(base + "_net.tntp"), base + "_net.tntp");
    trips = parse_trips(read_file(base + "_trips.tntp"), base + "_trips.tntp");
  } catch (const Error& e) {
    report("4", "Sioux Falls benchmark", false, e.what());
    return;
  }
  const bool sizes = net.nodes == sf.nodes && static_cast<int>(net.links.size()) == sf.links &&
                     static_cast<int>(trips.demands.size()) == sf.commodities;
  report("4a", "Sioux Falls parsed sizes", sizes,
         std::to_string(net.nodes) + " / " + std::to_string(net.links.size()) + " / " +
             std::to_string(trips.demands.size()) + " (expected 24 / 76 / 528)");

  for (std::size_t k = 1; k < std::size(kNetworks); ++k) {
    const Reference& r = kNetworks[k];
    const std::string stem = data_dir + "/" + r.dir + "/" + r.stem;
    if (!std::filesystem::exists(stem + "_net.tntp") || !std::filesystem::exists(stem + "_trips.tntp")) {
      skip("4b", std::string(r.name) + " parsed sizes", "no TNTP files under data/" + std::string(r.dir) + "; reference " +
                                                              std::to_string(r.nodes) + " / " + std::to_string(r.links) +
                                                              " / " + std::to_string(r.commodities));
      continue;
    }
    const TntpNet n = parse_net(read_file(stem + "_net.tntp"), stem + "_net.tntp");
    const TntpTrips t = parse_trips(read_file(stem + "_trips.tntp"), stem + "_trips.tntp");
    const std::string counts = std::to_string(n.nodes) + " / " + std::to_string(n.links.size()) + " / " +
                               std::to_string(t.demands.size());
    std::printf("INFO  [4b] %s: file %s, reference %d / %d / %d\n", r.name, counts.c_str(), r.nodes, r.links,
                r.commodities);
    report("4b", std::string(r.name) + " parsed sizes",
           n.nodes == r.nodes && static_cast<int>(n.links.size()) == r.links &&
               static_cast<int>(t.demands.size()) == r.commodities,
           counts);
  }

  const Instance inst = build_instance(net, trips);
  SolveOptions options;
  options.gap_tol = 1e-4;
  options.record_log = false;
  const unsigned threads = thread_count();
  Frontier frontier;
  const double t = seconds([&] { frontier = sweep(inst, alpha_grid(0.01), options, threads); });
  const auto& pts = frontier.points;

  int converged = 0;
  int max_iters = 0;
  for (const FrontierPoint& p : pts) {
    converged += p.converged && p.error.empty();
    max_iters = std::max(max_iters, p.iterations);
  }
  report("4c", "Sioux Falls sweep converges at every alpha", converged == static_cast<int>(pts.size()) && pts.size() == 101,
         std::to_string(converged) + " / " + std::to_string(pts.size()) + " converged (gap 1e-4, max " +
             std::to_string(max_iters) + " iterations), " + num(t) + " s on " + std::to_string(threads) + " thread(s)");

  report("4d", "rho at alpha = 1", near(pts.back().rho, 1.0, 1e-3), "rho(1) = " + num(pts.back().rho));

  double worst_rise = 0.0;
  double at = 0.0;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double rise = pts[j].rho - pts[j - 1].rho;
    if (rise > worst_rise) worst_rise = rise, at = pts[j].alpha;
  }
  report("4e", "rho nonincreasing in alpha", worst_rise <= 1e-3,
         "rho(0) = " + num(pts.front().rho) + ", largest increase " + num(worst_rise) +
             (worst_rise > 0 ? " at alpha " + num(at) : std::string()));

  int violations = 0, finite_average = 0, finite_loaded = 0;
  std::string first;
  for (int k = 1; k <= 50; ++k) {
    const double beta = 0.01 * k;
    const double ca = cso_cost(pts, {Measure::kAverage, beta}).cost;
    const double cl = cso_cost(pts, {Measure::kLoaded, beta}).cost;
    finite_average += std::isfinite(ca);
    finite_loaded += std::isfinite(cl);
    if (!(ca <= cl)) {
      if (violations++ == 0) first = " first at beta " + num(beta) + ": " + num(ca) + " > " + num(cl);
    }
  }
  report("4f", "average-constrained cost <= loaded-constrained cost, beta = 0.01..0.5", violations == 0,
         std::to_string(50 - violations) + " / 50 hold; feasible betas: average " + std::to_string(finite_average) +
             ", loaded " + std::to_string(finite_loaded) + first);

  const std::string out = "siouxfalls_frontier.csv";
  std::string csv = "alpha,cost,rho,u_loaded,u_average,u_ue,gap,iters,converged\n";
  for (const FrontierPoint& p : pts) {
    csv += format_number(p.alpha) + "," + format_number(p.cost) + "," + format_number(p.rho) + "," +
           format_number(p.u_loaded) + "," + format_number(p.u_average) + "," + format_number(p.u_ue) + "," +
           format_number(p.gap) + "," + std::to_string(p.iterations) + "," + (p.converged ? "1" : "0") + "\n";
  }
  write_file(out, csv);
  std::printf("INFO  [4] frontier written to %s\n", std::filesystem::absolute(out).string().c_str());
}

// ---------------------------------------------------------------------------
// 5. Numerical hygiene
// ---------------------------------------------------------------------------

void hygiene() {
  const std::vector<LatencyFn> kinds{
      LatencyFn::constant(2.0),         LatencyFn::affine(0.7, 1.3),          LatencyFn::monomial(1.5, 3),
      LatencyFn::polynomial({1, 0, 2}), LatencyFn::bpr(6.0, 4900.0, 0.15, 4), LatencyFn::bpr(1.0, 2.0, 0.5, 2.5),
  };
  // Relative agreement, with an absolute floor of 1e-9 where both sides vanish.
  double worst = 0.0;
  int bad = 0;
  std::string where;
  for (const LatencyFn& l : kinds) {
    double hi = 3.0;
    if (const auto* b = std::get_if<Bpr>(&l.params())) hi = 2.0 * b->capacity;
    for (int k = 0; k < 50; ++k) {
      const double x = hi * k / 49.0;
      const double h = 1e-5 * std::max(1.0, x);
      const auto total = [&](double y) { return y * l.evaluate(y); };
      const double fd = x < h ? (-3 * total(x) + 4 * total(x + h) - total(x + 2 * h)) / (2 * h)
                              : (total(x + h) - total(x - h)) / (2 * h);
      const double m = l.marginal(x);
      const double scale = std::max(std::abs(m), std::abs(fd));
      if (std::abs(m - fd) > 1e-6 * scale + 1e-9) ++bad;
      if (scale >= 1e-9 && std::abs(m - fd) / scale > worst) {
        worst = std::abs(m - fd) / scale;
        where = std::string(l.kind()) + " at " + num(x);
      }
    }
  }
  report("5a", "marginal cost vs finite difference", bad == 0,
         std::to_string(bad) + " of 300 points off; worst relative error " + num(worst) + " (" + where + ")");

  int runs = 0, rises = 0;
  for (const std::string& name : fixtures::fixture_names()) {
    const auto fx = fixtures::by_name(name);
    for (double alpha : {0.0, 0.5, 1.0}) {
      const SolveResult r = solve(fx.instance, Objective::interpolated(alpha), tight());
      ++runs;
      for (std::size_t k = 1; k < r.log.size(); ++k) {
        const double prev = r.log[k - 1].objective;
        if (r.log[k].objective > prev + 1e-12 * std::max(1.0, std::abs(prev))) ++rises;
      }
    }
  }
  report("5b", "objective nonincreasing across iterations", rises == 0,
         std::to_string(runs) + " fixture solves, " + std::to_string(rises) + " increases");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : FAIRFLOW_DATA_DIR;
  exact_examples();
  solver_examples();
  property_suites();
  hygiene();
  benchmark(data_dir);
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
