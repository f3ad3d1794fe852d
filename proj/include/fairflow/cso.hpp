#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairflow/assignment.hpp"
#include "fairflow/network.hpp"
#include "fairflow/unfairness.hpp"

namespace fairflow {

/// One flow on the fairness-efficiency frontier.
struct FrontierPoint {
  /// Interpolation weight that produced the flow; NaN for externally supplied candidates.
  double alpha = 0.0;
  double cost = 0.0;
  /// Inefficiency ratio C(f) / C(f*).
  double rho = 1.0;
  double u_loaded = 1.0;
  double u_average = 1.0;
  double u_ue = 1.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = true;
  /// Non-empty when the solve failed; such points never witness a CSO query.
  std::string error;
};

struct Frontier {
  std::vector<FrontierPoint> points;
  /// Path flows matching `points` (empty for failed points).
  std::vector<PathFlow> flows;
  /// C(f*) from the alpha = 1 solve.
  double system_cost = 0.0;
  NashBaseline baseline;
};

/// 0, step, 2*step, ..., 1. Throws std::invalid_argument unless 1/step is
/// (numerically) an integer in [1, 1e6].
std::vector<double> alpha_grid(double step);

/// Solves the interpolated objective for every alpha in `grid` and measures
/// each flow. The grid must lie in [0, 1] and contain both 0 and 1: the
/// alpha = 0 flow defines the UE baseline and the alpha = 1 flow defines
/// C(f*). Up to `threads` solves run concurrently; point order follows the grid.
Frontier sweep(const Instance& inst, std::span<const double> grid, const SolveOptions& options, unsigned threads = 1);

/// Builds a frontier point for an arbitrary feasible flow.
FrontierPoint evaluate_flow(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline,
                            double system_cost, double theta, double alpha);

enum class Measure { kLoaded, kAverage, kUe };

/// "loaded", "average", "ue". Throws std::invalid_argument otherwise.
Measure parse_measure(const std::string& text);
std::string to_string(Measure measure);
double measure_of(const FrontierPoint& point, Measure measure);

struct CsoQuery {
  Measure measure = Measure::kLoaded;
  double beta = 0.0;
};

struct CsoResult {
  /// +inf when no point satisfies the constraint.
  double cost = 0.0;
  /// Index of the witnessing point in the queried list.
  std::optional<std::size_t> witness;
};

/// Cheapest point whose selected unfairness is at most 1 + beta. Over a
/// sweep this is an upper bound on the true constrained optimum.
CsoResult cso_cost(std::span<const FrontierPoint> points, const CsoQuery& query);

/// Points not dominated in (unfairness, cost), sorted by unfairness.
std::vector<FrontierPoint> pareto_filter(std::span<const FrontierPoint> points, Measure measure);

struct ImprovementCheck {
  std::vector<bool> per_commodity;
  bool all = true;
};

/// For every commodity: does some theta-used path attain the minimum latency
/// over all of its paths (within 1e-6 relative)?
ImprovementCheck improvement_condition(const Instance& inst, const PathFlow& flow, double theta);

/// True when the instance has one commodity and every edge joins its source to its sink.
bool is_parallel_link(const Instance& inst);

/// On a parallel-link instance, checks that the largest latency of a used
/// link is at most the smallest zero-load latency of an unused link, plus
/// `tol`. Throws std::invalid_argument on other instances.
bool parallel_link_check(const Instance& inst, const PathFlow& flow, double theta, double tol = 1e-6);

}  // namespace fairflow
