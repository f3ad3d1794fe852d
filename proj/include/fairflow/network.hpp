#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairflow/latency.hpp"

namespace fairflow {

struct Edge {
  int tail = 0;
  int head = 0;
  LatencyFn latency = LatencyFn::constant(0.0);
  bool operator==(const Edge&) const = default;
};

/// One source-sink pair with demand rate r_i > 0.
struct Commodity {
  int source = 0;
  int sink = 0;
  double rate = 1.0;
  bool operator==(const Commodity&) const = default;
};

/// A routing game instance: directed graph, commodities and per-edge
/// latencies. Nodes are 0..num_nodes-1. Immutable after construction.
class Instance {
 public:
  /// Validates node references and rates, and that every commodity has at
  /// least one source-sink path. Throws StructuralError otherwise.
  Instance(int num_nodes, std::vector<Edge> edges, std::vector<Commodity> commodities);

  int num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_commodities() const { return commodities_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<Commodity>& commodities() const { return commodities_; }
  const Commodity& commodity(std::size_t i) const { return commodities_.at(i); }
  /// Outgoing edge indices per node, in increasing edge order.
  const std::vector<std::vector<int>>& out_edges() const { return out_edges_; }

  bool operator==(const Instance& other) const {
    return num_nodes_ == other.num_nodes_ && edges_ == other.edges_ && commodities_ == other.commodities_;
  }

 private:
  int num_nodes_;
  std::vector<Edge> edges_;
  std::vector<Commodity> commodities_;
  std::vector<std::vector<int>> out_edges_;
};

/// A simple s_i -> t_i path given as an ordered edge sequence.
struct Path {
  int commodity = 0;
  std::vector<int> edges;
  auto operator<=>(const Path&) const = default;
};

/// Per-edge flow values f_e.
using EdgeFlow = std::vector<double>;

/// Sparse assignment of flow to commodity-tagged paths. This is the primary
/// flow representation; edge flows are derived from it.
class PathFlow {
 public:
  struct Entry {
    std::vector<int> edges;
    double flow = 0.0;
    bool operator==(const Entry&) const = default;
  };

  PathFlow() = default;
  explicit PathFlow(std::size_t num_commodities) : paths_(num_commodities) {}

  /// Adds flow to a path, merging with an existing identical path.
  void add(const Path& path, double flow);
  void add(int commodity, std::vector<int> edges, double flow) { add(Path{commodity, std::move(edges)}, flow); }

  std::size_t num_commodities() const { return paths_.size(); }
  std::span<const Entry> paths(std::size_t commodity) const { return paths_.at(commodity); }
  std::vector<Entry>& mutable_paths(std::size_t commodity) { return paths_.at(commodity); }

  /// Sum of path flows of one commodity.
  double routed(std::size_t commodity) const;

  /// f_e = sum of f_P over paths containing e.
  EdgeFlow edge_flow(const Instance& inst) const;

  /// Every path is a valid simple path of its commodity. Throws StructuralError.
  void validate(const Instance& inst) const;

  /// Throws FeasibilityError if some commodity routes a total differing
  /// from r_i by more than rel_tol * r_i, or a path carries negative flow.
  void check_feasible(const Instance& inst, double rel_tol = 1e-9) const;
  bool is_feasible(const Instance& inst, double rel_tol = 1e-9) const;

  bool operator==(const PathFlow&) const = default;

 private:
  std::vector<std::vector<Entry>> paths_;
};

/// Throws StructuralError unless `path` is a simple s_i -> t_i path in `inst`.
void validate_path(const Instance& inst, const Path& path);

/// Sum of edge latencies along `edges` at the given edge flows.
double path_latency(const Instance& inst, const EdgeFlow& flow, std::span<const int> edges);
/// Validates the path first.
double path_latency(const Instance& inst, const EdgeFlow& flow, const Path& path);
double path_latency(const Instance& inst, const PathFlow& flow, const Path& path);

/// C(f) = sum_e l_e(f_e) f_e.
double total_cost(const Instance& inst, const EdgeFlow& flow);
/// Checks feasibility, then evaluates the edge form.
double total_cost(const Instance& inst, const PathFlow& flow);

/// C_i(f) = sum over P in P_i of l_P(f) f_P.
double commodity_cost(const Instance& inst, const PathFlow& flow, std::size_t commodity);

/// Paths of a commodity with f_P > theta * r_i, in stored order.
std::vector<Path> used_paths(const Instance& inst, const PathFlow& flow, std::size_t commodity, double theta);

}  // namespace fairflow
