#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairflow/network.hpp"

namespace fairflow {

/// Objective minimized by the assignment solver.
///
///   alpha * C(f) + (1 - alpha) * sum_e integral_0^{f_e} l_e
///
/// Nash is alpha = 0 (Beckmann potential), System is alpha = 1 (total cost).
class Objective {
 public:
  enum class Kind { kNash, kSystem, kInterpolated };

  static Objective nash() { return Objective(Kind::kNash, 0.0); }
  static Objective system() { return Objective(Kind::kSystem, 1.0); }
  /// Throws std::invalid_argument unless alpha is in [0, 1].
  static Objective interpolated(double alpha);
  /// Accepts "nash", "system" or "alpha=<v>".
  static Objective parse(const std::string& text);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  std::string to_string() const;

  /// Gradient component for one edge: alpha * marginal + (1 - alpha) * latency.
  double edge_cost(const LatencyFn& latency, double flow) const;
  /// Objective contribution of one edge.
  double edge_value(const LatencyFn& latency, double flow) const;

 private:
  Objective(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  Kind kind_;
  double alpha_;
};

std::vector<double> edge_costs(const Instance& inst, const EdgeFlow& flow, const Objective& objective);
double objective_value(const Instance& inst, const EdgeFlow& flow, const Objective& objective);

/// Minimum-cost s_i -> t_i path under nonnegative edge costs. Equal-cost
/// labels keep the lower incoming edge index. Throws StructuralError when the
/// sink is unreachable.
Path shortest_path(const Instance& inst, std::span<const double> costs, std::size_t commodity);

struct SolveOptions {
  int max_iters = 20000;
  double gap_tol = 1e-8;
  /// Relative used-path threshold: paths below theta * r_i are pruned.
  double theta = 1e-6;
  bool record_log = true;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double relative_gap = 0.0;
  double step = 0.0;
};

struct SolveResult {
  PathFlow path_flow;
  EdgeFlow edge_flow;
  double objective_value = 0.0;
  /// Total latency C(f), whatever the objective.
  double cost = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> log;
};

/// Frank-Wolfe with exact line search and path bookkeeping. The path
/// decomposition it maintains is the one unfairness measures are evaluated
/// on. Returns converged = false when max_iters is exhausted.
SolveResult solve(const Instance& inst, const Objective& objective, const SolveOptions& options = {});

/// Per-commodity equilibrium latency L_i of a Nash flow.
struct NashBaseline {
  std::vector<double> latency;
  /// max - min latency over used paths; zero for an exact equilibrium.
  std::vector<double> spread;
};

/// L_i = minimum latency over theta-used paths of `nash_flow`.
NashBaseline baseline_from_flow(const Instance& inst, const PathFlow& nash_flow, double theta);

/// Solves the Nash objective and extracts the baseline from its flow.
NashBaseline nash_baseline(const Instance& inst, const SolveOptions& options = {});

}  // namespace fairflow
