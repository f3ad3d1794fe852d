#include "fairflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "fairflow/errors.hpp"

namespace fairflow {
namespace {

bool reachable(const std::vector<std::vector<int>>& out, const std::vector<Edge>& edges, int from, int to) {
  std::vector<char> seen(out.size(), 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == to) return true;
    for (int e : out[u]) {
      int v = edges[e].head;
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

Instance::Instance(int num_nodes, std::vector<Edge> edges, std::vector<Commodity> commodities)
    : num_nodes_(num_nodes), edges_(std::move(edges)), commodities_(std::move(commodities)) {
  if (num_nodes_ <= 0) throw StructuralError("instance needs at least one node");
  if (commodities_.empty()) throw StructuralError("instance has no commodities (all rates must be positive)");
  out_edges_.assign(num_nodes_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.tail < 0 || edge.tail >= num_nodes_ || edge.head < 0 || edge.head >= num_nodes_) {
      throw StructuralError("edge " + std::to_string(e) + " references an unknown node");
    }
    if (edge.tail == edge.head) throw StructuralError("edge " + std::to_string(e) + " is a self-loop");
    out_edges_[edge.tail].push_back(static_cast<int>(e));
  }
  for (std::size_t i = 0; i < commodities_.size(); ++i) {
    const Commodity& c = commodities_[i];
    const std::string tag = "commodity " + std::to_string(i);
    if (c.source < 0 || c.source >= num_nodes_ || c.sink < 0 || c.sink >= num_nodes_) {
      throw StructuralError(tag + " references an unknown node");
    }
    if (c.source == c.sink) throw StructuralError(tag + " has identical source and sink");
    if (!std::isfinite(c.rate) || c.rate <= 0.0) throw StructuralError(tag + " must have a finite positive rate");
    if (!reachable(out_edges_, edges_, c.source, c.sink)) {
      throw StructuralError(tag + ": no s-t path from node " + std::to_string(c.source) + " to node " +
                            std::to_string(c.sink));
    }
  }
}

void PathFlow::add(const Path& path, double flow) {
  auto& entries = paths_.at(path.commodity);
  for (auto& entry : entries) {
    if (entry.edges == path.edges) {
      entry.flow += flow;
      return;
    }
  }
  entries.push_back(Entry{path.edges, flow});
}

double PathFlow::routed(std::size_t commodity) const {
  double total = 0.0;
  for (const auto& entry : paths_.at(commodity)) total += entry.flow;
  return total;
}

EdgeFlow PathFlow::edge_flow(const Instance& inst) const {
  EdgeFlow flow(inst.num_edges(), 0.0);
  for (const auto& entries : paths_) {
    for (const auto& entry : entries) {
      for (int e : entry.edges) flow.at(e) += entry.flow;
    }
  }
  return flow;
}

void PathFlow::validate(const Instance& inst) const {
  if (paths_.size() != inst.num_commodities()) {
    throw StructuralError("path flow has " + std::to_string(paths_.size()) + " commodities, instance has " +
                          std::to_string(inst.num_commodities()));
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    for (const auto& entry : paths_[i]) validate_path(inst, Path{static_cast<int>(i), entry.edges});
  }
}

void PathFlow::check_feasible(const Instance& inst, double rel_tol) const {
  if (paths_.size() != inst.num_commodities()) {
    throw FeasibilityError("path flow commodity count does not match the instance");
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    for (const auto& entry : paths_[i]) {
      if (!(entry.flow >= 0.0)) throw FeasibilityError("negative path flow for commodity " + std::to_string(i));
    }
    const double rate = inst.commodity(i).rate;
    const double routed_i = routed(i);
    if (std::abs(routed_i - rate) > rel_tol * rate) {
      throw FeasibilityError("commodity " + std::to_string(i) + " routes " + std::to_string(routed_i) +
                             " but its rate is " + std::to_string(rate));
    }
  }
}

bool PathFlow::is_feasible(const Instance& inst, double rel_tol) const {
  try {
    check_feasible(inst, rel_tol);
    return true;
  } catch (const FeasibilityError&) {
    return false;
  }
}

void validate_path(const Instance& inst, const Path& path) {
  if (path.commodity < 0 || static_cast<std::size_t>(path.commodity) >= inst.num_commodities()) {
    throw StructuralError("path references unknown commodity " + std::to_string(path.commodity));
  }
  if (path.edges.empty()) throw StructuralError("empty path");
  const Commodity& c = inst.commodity(path.commodity);
  std::vector<char> visited(inst.num_nodes(), 0);
  int at = c.source;
  visited[at] = 1;
  for (int e : path.edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= inst.num_edges()) {
      throw StructuralError("path references unknown edge " + std::to_string(e));
    }
    const Edge& edge = inst.edge(e);
    if (edge.tail != at) throw StructuralError("path is not contiguous at edge " + std::to_string(e));
    at = edge.head;
    if (visited[at]) throw StructuralError("path revisits node " + std::to_string(at));
    visited[at] = 1;
  }
  if (at != c.sink) throw StructuralError("path does not end at the sink of commodity " + std::to_string(path.commodity));
}

double path_latency(const Instance& inst, const EdgeFlow& flow, std::span<const int> edges) {
  double total = 0.0;
  for (int e : edges) total += inst.edge(e).latency.evaluate(flow.at(e));
  return total;
}

double path_latency(const Instance& inst, const EdgeFlow& flow, const Path& path) {
  validate_path(inst, path);
  return path_latency(inst, flow, std::span<const int>(path.edges));
}

double path_latency(const Instance& inst, const PathFlow& flow, const Path& path) {
  return path_latency(inst, flow.edge_flow(inst), path);
}

double total_cost(const Instance& inst, const EdgeFlow& flow) {
  if (flow.size() != inst.num_edges()) throw StructuralError("edge flow size does not match the instance");
  double total = 0.0;
  for (std::size_t e = 0; e < flow.size(); ++e) total += inst.edge(e).latency.evaluate(flow[e]) * flow[e];
  return total;
}

double total_cost(const Instance& inst, const PathFlow& flow) {
  flow.check_feasible(inst);
  return total_cost(inst, flow.edge_flow(inst));
}

double commodity_cost(const Instance& inst, const PathFlow& flow, std::size_t commodity) {
  if (commodity >= inst.num_commodities() || commodity >= flow.num_commodities()) {
    throw StructuralError("unknown commodity " + std::to_string(commodity));
  }
  const EdgeFlow edge_flow = flow.edge_flow(inst);
  double total = 0.0;
  for (const auto& entry : flow.paths(commodity)) {
    total += entry.flow * path_latency(inst, edge_flow, std::span<const int>(entry.edges));
  }
  return total;
}

std::vector<Path> used_paths(const Instance& inst, const PathFlow& flow, std::size_t commodity, double theta) {
  const double threshold = theta * inst.commodity(commodity).rate;
  std::vector<Path> used;
  for (const auto& entry : flow.paths(commodity)) {
    if (entry.flow > threshold) used.push_back(Path{static_cast<int>(commodity), entry.edges});
  }
  return used;
}

}  // namespace fairflow
