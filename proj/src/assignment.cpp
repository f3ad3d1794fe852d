#include "fairflow/assignment.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "fairflow/errors.hpp"

namespace fairflow {

Objective Objective::interpolated(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  return Objective(Kind::kInterpolated, alpha);
}

Objective Objective::parse(const std::string& text) {
  if (text == "nash") return nash();
  if (text == "system") return system();
  if (text.rfind("alpha=", 0) == 0) {
    const std::string value = text.substr(6);
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw std::invalid_argument("bad objective '" + text + "'");
    return interpolated(alpha);
  }
  throw std::invalid_argument("objective must be nash, system or alpha=<v>, got '" + text + "'");
}

std::string Objective::to_string() const {
  switch (kind_) {
    case Kind::kNash:
      return "nash";
    case Kind::kSystem:
      return "system";
    case Kind::kInterpolated:
      break;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "alpha=%.12g", alpha_);
  return buf;
}

double Objective::edge_cost(const LatencyFn& latency, double flow) const {
  switch (kind_) {
    case Kind::kNash:
      return latency.evaluate(flow);
    case Kind::kSystem:
      return latency.marginal(flow);
    case Kind::kInterpolated:
      break;
  }
  return alpha_ * latency.marginal(flow) + (1.0 - alpha_) * latency.evaluate(flow);
}

double Objective::edge_value(const LatencyFn& latency, double flow) const {
  switch (kind_) {
    case Kind::kNash:
      return latency.integral(flow);
    case Kind::kSystem:
      return flow * latency.evaluate(flow);
    case Kind::kInterpolated:
      break;
  }
  return alpha_ * flow * latency.evaluate(flow) + (1.0 - alpha_) * latency.integral(flow);
}

std::vector<double> edge_costs(const Instance& inst, const EdgeFlow& flow, const Objective& objective) {
  std::vector<double> costs(inst.num_edges());
  for (std::size_t e = 0; e < costs.size(); ++e) costs[e] = objective.edge_cost(inst.edge(e).latency, flow.at(e));
  return costs;
}

double objective_value(const Instance& inst, const EdgeFlow& flow, const Objective& objective) {
  double total = 0.0;
  for (std::size_t e = 0; e < inst.num_edges(); ++e) total += objective.edge_value(inst.edge(e).latency, flow.at(e));
  return total;
}

namespace {

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> pred_edge;
};

ShortestPathTree build_tree(const Instance& inst, std::span<const double> costs, int source) {
  const int n = inst.num_nodes();
  ShortestPathTree tree{std::vector<double>(n, std::numeric_limits<double>::infinity()), std::vector<int>(n, -1)};
  std::vector<char> settled(n, 0);
  using Label = std::pair<double, int>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  tree.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (int e : inst.out_edges()[u]) {
      const int v = inst.edge(e).head;
      if (settled[v]) continue;
      const double nd = d + costs[e];
      if (nd < tree.dist[v]) {
        tree.dist[v] = nd;
        tree.pred_edge[v] = e;
        heap.emplace(nd, v);
      } else if (nd == tree.dist[v] && e < tree.pred_edge[v]) {
        tree.pred_edge[v] = e;
      }
    }
  }
  return tree;
}

std::vector<int> extract_path(const Instance& inst, const ShortestPathTree& tree, int source, int sink) {
  std::vector<int> edges;
  int at = sink;
  while (at != source) {
    const int e = tree.pred_edge[at];
    if (e < 0) throw StructuralError("sink " + std::to_string(sink) + " unreachable from " + std::to_string(source));
    edges.push_back(e);
    at = inst.edge(e).tail;
  }
  std::reverse(edges.begin(), edges.end());
  return edges;
}

// Commodity indices grouped by source so each source needs one tree.
std::map<int, std::vector<std::size_t>> group_by_source(const Instance& inst) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < inst.num_commodities(); ++i) groups[inst.commodity(i).source].push_back(i);
  return groups;
}

void all_or_nothing(const Instance& inst, const std::map<int, std::vector<std::size_t>>& groups,
                    std::span<const double> costs, std::vector<std::vector<int>>& paths,
                    std::vector<double>& path_costs) {
  for (const auto& [source, members] : groups) {
    const ShortestPathTree tree = build_tree(inst, costs, source);
    for (std::size_t i : members) {
      const int sink = inst.commodity(i).sink;
      paths[i] = extract_path(inst, tree, source, sink);
      path_costs[i] = tree.dist[sink];
    }
  }
}

// argmin over [0, 1] of the objective along f + step * (y - f), found by
// bisection on the directional derivative until the bracket stops shrinking.
double line_search(const Instance& inst, const Objective& objective, const EdgeFlow& f, const EdgeFlow& y) {
  std::vector<std::size_t> moving;
  for (std::size_t e = 0; e < f.size(); ++e) {
    if (y[e] != f[e]) moving.push_back(e);
  }
  if (moving.empty()) return 0.0;
  auto slope = [&](double step) {
    double total = 0.0;
    for (std::size_t e : moving) {
      const double d = y[e] - f[e];
      const double x = std::max(0.0, f[e] + step * d);
      total += objective.edge_cost(inst.edge(e).latency, x) * d;
    }
    return total;
  };
  if (slope(1.0) <= 0.0) return 1.0;
  if (slope(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (slope(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

// Removes paths below theta * r_i (except the current all-or-nothing column)
// and spreads their mass proportionally over the remaining paths.
void prune(std::vector<PathFlow::Entry>& entries, const std::vector<int>& keep, double threshold) {
  double removed = 0.0;
  double kept = 0.0;
  std::vector<PathFlow::Entry> survivors;
  survivors.reserve(entries.size());
  for (auto& entry : entries) {
    const bool drop = (entry.flow < threshold || entry.flow <= 0.0) && entry.edges != keep;
    if (drop) {
      removed += entry.flow;
    } else {
      kept += entry.flow;
      survivors.push_back(std::move(entry));
    }
  }
  if (removed > 0.0 && kept > 0.0) {
    const double scale = (kept + removed) / kept;
    for (auto& entry : survivors) entry.flow *= scale;
  }
  entries = std::move(survivors);
}

double relative_gap(double absolute, double objective) {
  absolute = std::max(0.0, absolute);
  if (objective != 0.0) return absolute / std::abs(objective);
  return absolute > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

Path shortest_path(const Instance& inst, std::span<const double> costs, std::size_t commodity) {
  if (costs.size() != inst.num_edges()) throw StructuralError("cost vector size does not match the instance");
  const Commodity& c = inst.commodity(commodity);
  const ShortestPathTree tree = build_tree(inst, costs, c.source);
  return Path{static_cast<int>(commodity), extract_path(inst, tree, c.source, c.sink)};
}

SolveResult solve(const Instance& inst, const Objective& objective, const SolveOptions& options) {
  if (!(options.gap_tol >= 0.0)) throw std::invalid_argument("gap_tol must be nonnegative");
  if (!(options.theta >= 0.0 && options.theta < 1.0)) throw std::invalid_argument("theta must lie in [0, 1)");
  if (options.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");

  const std::size_t k = inst.num_commodities();
  const auto groups = group_by_source(inst);
  std::vector<std::vector<int>> aon_paths(k);
  std::vector<double> aon_costs(k);

  SolveResult result;
  result.path_flow = PathFlow(k);
  EdgeFlow f(inst.num_edges(), 0.0);
  all_or_nothing(inst, groups, edge_costs(inst, f, objective), aon_paths, aon_costs);
  for (std::size_t i = 0; i < k; ++i) {
    result.path_flow.add(static_cast<int>(i), aon_paths[i], inst.commodity(i).rate);
  }
  f = result.path_flow.edge_flow(inst);

  int iteration = 0;
  for (;; ++iteration) {
    const std::vector<double> costs = edge_costs(inst, f, objective);
    all_or_nothing(inst, groups, costs, aon_paths, aon_costs);
    const double value = objective_value(inst, f, objective);
    double linear_current = 0.0;
    for (std::size_t e = 0; e < f.size(); ++e) linear_current += costs[e] * f[e];
    double linear_aon = 0.0;
    for (std::size_t i = 0; i < k; ++i) linear_aon += inst.commodity(i).rate * aon_costs[i];
    const double gap = relative_gap(linear_current - linear_aon, value);

    result.objective_value = value;
    result.relative_gap = gap;
    if (options.record_log) result.log.push_back(IterationRecord{iteration, value, gap, 0.0});
    if (gap <= options.gap_tol) {
      result.converged = true;
      break;
    }
    if (iteration >= options.max_iters) break;

    EdgeFlow y(inst.num_edges(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (int e : aon_paths[i]) y[e] += inst.commodity(i).rate;
    }
    const double step = line_search(inst, objective, f, y);
    if (options.record_log) result.log.back().step = step;
    if (step <= 0.0) break;

    for (std::size_t i = 0; i < k; ++i) {
      auto& entries = result.path_flow.mutable_paths(i);
      for (auto& entry : entries) entry.flow *= (1.0 - step);
      const double rate = inst.commodity(i).rate;
      result.path_flow.add(static_cast<int>(i), aon_paths[i], step * rate);
      prune(entries, aon_paths[i], options.theta * rate);
    }
    f = result.path_flow.edge_flow(inst);
  }

  result.iterations = iteration;
  result.edge_flow = std::move(f);
  result.cost = total_cost(inst, result.edge_flow);
  return result;
}

NashBaseline baseline_from_flow(const Instance& inst, const PathFlow& nash_flow, double theta) {
  const EdgeFlow f = nash_flow.edge_flow(inst);
  NashBaseline baseline;
  baseline.latency.resize(inst.num_commodities());
  baseline.spread.resize(inst.num_commodities());
  for (std::size_t i = 0; i < inst.num_commodities(); ++i) {
    const double threshold = theta * inst.commodity(i).rate;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& entry : nash_flow.paths(i)) {
      if (entry.flow <= threshold) continue;
      const double latency = path_latency(inst, f, std::span<const int>(entry.edges));
      lo = std::min(lo, latency);
      hi = std::max(hi, latency);
    }
    if (!std::isfinite(lo)) throw FeasibilityError("Nash flow has no used path for commodity " + std::to_string(i));
    baseline.latency[i] = lo;
    baseline.spread[i] = hi - lo;
  }
  return baseline;
}

NashBaseline nash_baseline(const Instance& inst, const SolveOptions& options) {
  const SolveResult nash = solve(inst, Objective::nash(), options);
  return baseline_from_flow(inst, nash.path_flow, options.theta);
}

}  // namespace fairflow
