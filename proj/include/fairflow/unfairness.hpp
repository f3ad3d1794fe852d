#pragma once

#include <cstddef>
#include <vector>

#include "fairflow/assignment.hpp"
#include "fairflow/network.hpp"

namespace fairflow {

/// a / b with 0/0 := 1 and positive/0 := +inf.
double unfairness_ratio(double numerator, double denominator);

/// One unfairness measure, per commodity and aggregated.
struct MeasureValues {
  std::vector<double> per_commodity;
  /// Max over commodities.
  double aggregate = 1.0;
  /// Mean over commodities (alternative aggregate; not used for CSO).
  double mean = 1.0;
};

/// Loaded unfairness: max over used P, Q of l_P(f) / l_Q(f), per commodity.
MeasureValues loaded_unfairness(const Instance& inst, const PathFlow& flow, double theta);

/// Average unfairness: average latency of the commodity over its used
/// paths divided by its minimum used-path latency.
MeasureValues average_unfairness(const Instance& inst, const PathFlow& flow, double theta);

/// UE unfairness: max used-path latency divided by the Nash latency L_i.
/// Throws std::invalid_argument if the baseline does not cover every commodity.
MeasureValues ue_unfairness(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline, double theta);

struct CommodityReport {
  double loaded = 1.0;
  double average = 1.0;
  double ue = 1.0;
  double min_latency = 0.0;
  double max_latency = 0.0;
  double baseline = 0.0;
  std::size_t used_paths = 0;
};

struct UnfairnessReport {
  std::vector<CommodityReport> commodities;
  double loaded = 1.0;
  double average = 1.0;
  double ue = 1.0;
  double mean_loaded = 1.0;
  double mean_average = 1.0;
  double mean_ue = 1.0;
};

/// All three measures of one flow in a single pass.
UnfairnessReport measure(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline, double theta);

/// Comparison of a report against the worst-case value n + 1 for
/// polynomial latencies of degree at most n.
struct BoundCheck {
  int degree = 0;
  double bound = 1.0;
  double slack = 1e-3;
  double margin_loaded = 0.0;
  double margin_average = 0.0;
  double margin_ue = 0.0;
  /// Every edge latency is a nonnegative-coefficient polynomial of degree <= n.
  bool latencies_in_class = false;
  bool within_bound = false;
};

BoundCheck bound_check(const Instance& inst, const UnfairnessReport& report, int degree, double slack = 1e-3);

}  // namespace fairflow
