#include "fairflow/cso.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace fairflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PointSolve {
  SolveResult result;
  std::string error;
};

}  // namespace

std::vector<double> alpha_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("alpha step must lie in (0, 1]");
  const double count = 1.0 / step;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-9 * rounded || rounded > 1e6) {
    throw std::invalid_argument("alpha step must divide 1 evenly");
  }
  const auto n = static_cast<std::size_t>(rounded);
  std::vector<double> grid(n + 1);
  for (std::size_t j = 0; j <= n; ++j) grid[j] = static_cast<double>(j) / static_cast<double>(n);
  return grid;
}

FrontierPoint evaluate_flow(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline,
                            double system_cost, double theta, double alpha) {
  FrontierPoint point;
  point.alpha = alpha;
  point.cost = total_cost(inst, flow);
  point.rho = unfairness_ratio(point.cost, system_cost);
  const UnfairnessReport report = measure(inst, flow, baseline, theta);
  point.u_loaded = report.loaded;
  point.u_average = report.average;
  point.u_ue = report.ue;
  return point;
}

Frontier sweep(const Instance& inst, std::span<const double> grid, const SolveOptions& options, unsigned threads) {
  if (grid.empty()) throw std::invalid_argument("empty alpha grid");
  std::optional<std::size_t> nash_index;
  std::optional<std::size_t> system_index;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] >= 0.0 && grid[j] <= 1.0)) throw std::invalid_argument("alpha grid must lie in [0, 1]");
    if (grid[j] == 0.0 && !nash_index) nash_index = j;
    if (grid[j] == 1.0 && !system_index) system_index = j;
  }
  if (!nash_index || !system_index) throw std::invalid_argument("alpha grid must contain 0 and 1");

  std::vector<PointSolve> solves(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next.fetch_add(1); j < grid.size(); j = next.fetch_add(1)) {
      try {
        SolveOptions local = options;
        local.record_log = false;
        solves[j].result = solve(inst, Objective::interpolated(grid[j]), local);
      } catch (const std::exception& e) {
        solves[j].error = e.what();
      }
    }
  };
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(grid.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t idx : {*nash_index, *system_index}) {
    if (!solves[idx].error.empty()) throw std::runtime_error("anchor solve failed: " + solves[idx].error);
  }

  Frontier frontier;
  frontier.system_cost = solves[*system_index].result.cost;
  frontier.baseline = baseline_from_flow(inst, solves[*nash_index].result.path_flow, options.theta);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    PointSolve& s = solves[j];
    FrontierPoint point;
    if (s.error.empty()) {
      point = evaluate_flow(inst, s.result.path_flow, frontier.baseline, frontier.system_cost, options.theta, grid[j]);
      point.gap = s.result.relative_gap;
      point.iterations = s.result.iterations;
      point.converged = s.result.converged;
      frontier.flows.push_back(std::move(s.result.path_flow));
    } else {
      point.alpha = grid[j];
      point.cost = kInf;
      point.rho = kInf;
      point.u_loaded = point.u_average = point.u_ue = kInf;
      point.converged = false;
      point.error = s.error;
      frontier.flows.emplace_back();
    }
    frontier.points.push_back(point);
  }
  return frontier;
}

Measure parse_measure(const std::string& text) {
  if (text == "loaded") return Measure::kLoaded;
  if (text == "average") return Measure::kAverage;
  if (text == "ue") return Measure::kUe;
  throw std::invalid_argument("measure must be loaded, average or ue, got '" + text + "'");
}

std::string to_string(Measure measure) {
  switch (measure) {
    case Measure::kLoaded:
      return "loaded";
    case Measure::kAverage:
      return "average";
    case Measure::kUe:
      return "ue";
  }
  return "?";
}

double measure_of(const FrontierPoint& point, Measure measure) {
  switch (measure) {
    case Measure::kLoaded:
      return point.u_loaded;
    case Measure::kAverage:
      return point.u_average;
    case Measure::kUe:
      return point.u_ue;
  }
  return kInf;
}

CsoResult cso_cost(std::span<const FrontierPoint> points, const CsoQuery& query) {
  if (!(query.beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  CsoResult best{kInf, std::nullopt};
  const double limit = 1.0 + query.beta;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const FrontierPoint& p = points[j];
    if (!p.error.empty() || !(measure_of(p, query.measure) <= limit)) continue;
    if (p.cost < best.cost) best = CsoResult{p.cost, j};
  }
  return best;
}

std::vector<FrontierPoint> pareto_filter(std::span<const FrontierPoint> points, Measure measure) {
  std::vector<FrontierPoint> sorted;
  for (const auto& p : points) {
    if (p.error.empty()) sorted.push_back(p);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [measure](const FrontierPoint& a, const FrontierPoint& b) {
    const double ua = measure_of(a, measure);
    const double ub = measure_of(b, measure);
    return ua != ub ? ua < ub : a.cost < b.cost;
  });
  std::vector<FrontierPoint> front;
  double best_cost = kInf;
  for (const auto& p : sorted) {
    if (p.cost < best_cost) {
      front.push_back(p);
      best_cost = p.cost;
    }
  }
  return front;
}

ImprovementCheck improvement_condition(const Instance& inst, const PathFlow& flow, double theta) {
  const EdgeFlow f = flow.edge_flow(inst);
  std::vector<double> latencies(inst.num_edges());
  for (std::size_t e = 0; e < latencies.size(); ++e) latencies[e] = inst.edge(e).latency.evaluate(f[e]);

  ImprovementCheck check;
  for (std::size_t i = 0; i < inst.num_commodities(); ++i) {
    const Path best = shortest_path(inst, latencies, i);
    const double min_latency = path_latency(inst, f, std::span<const int>(best.edges));
    bool hit = false;
    for (const Path& p : used_paths(inst, flow, i, theta)) {
      const double l = path_latency(inst, f, std::span<const int>(p.edges));
      if (l <= min_latency + 1e-6 * std::max(std::abs(min_latency), 1e-300)) {
        hit = true;
        break;
      }
    }
    check.per_commodity.push_back(hit);
    check.all = check.all && hit;
  }
  return check;
}

bool is_parallel_link(const Instance& inst) {
  if (inst.num_commodities() != 1) return false;
  const Commodity& c = inst.commodity(0);
  return std::all_of(inst.edges().begin(), inst.edges().end(),
                     [&c](const Edge& e) { return e.tail == c.source && e.head == c.sink; });
}

bool parallel_link_check(const Instance& inst, const PathFlow& flow, double theta, double tol) {
  if (!is_parallel_link(inst)) throw std::invalid_argument("parallel_link_check needs a parallel-link instance");
  const EdgeFlow f = flow.edge_flow(inst);
  const double threshold = theta * inst.commodity(0).rate;
  double max_used = -kInf;
  double min_unused_free = kInf;
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const LatencyFn& latency = inst.edge(e).latency;
    if (f[e] > threshold) {
      max_used = std::max(max_used, latency.evaluate(f[e]));
    } else {
      min_unused_free = std::min(min_unused_free, latency.evaluate(0.0));
    }
  }
  return max_used <= min_unused_free + tol;
}

}  // namespace fairflow
