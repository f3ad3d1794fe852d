#include "fairflow/unfairness.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fairflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Latency statistics over the theta-used paths of one commodity.
struct UsedStats {
  double min_latency = kInf;
  double max_latency = -kInf;
  double weighted = 0.0;  // sum f_P * l_P
  double volume = 0.0;    // sum f_P
  std::size_t count = 0;
};

std::vector<UsedStats> used_stats(const Instance& inst, const PathFlow& flow, double theta) {
  if (flow.num_commodities() != inst.num_commodities()) {
    throw std::invalid_argument("flow and instance disagree on the number of commodities");
  }
  const EdgeFlow f = flow.edge_flow(inst);
  std::vector<UsedStats> stats(inst.num_commodities());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double threshold = theta * inst.commodity(i).rate;
    UsedStats& s = stats[i];
    for (const auto& entry : flow.paths(i)) {
      if (entry.flow <= threshold) continue;
      const double latency = path_latency(inst, f, std::span<const int>(entry.edges));
      s.min_latency = std::min(s.min_latency, latency);
      s.max_latency = std::max(s.max_latency, latency);
      s.weighted += entry.flow * latency;
      s.volume += entry.flow;
      ++s.count;
    }
    if (s.count == 0) throw std::invalid_argument("commodity " + std::to_string(i) + " has no used path");
  }
  return stats;
}

MeasureValues aggregate(std::vector<double> values) {
  MeasureValues out;
  out.aggregate = 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.aggregate = i == 0 ? values[i] : std::max(out.aggregate, values[i]);
    sum += values[i];
  }
  out.mean = values.empty() ? 1.0 : sum / static_cast<double>(values.size());
  out.per_commodity = std::move(values);
  return out;
}

double average_of(const UsedStats& s) {
  // sum f_P l_P / (sum f_P * min l) without dividing by a possibly zero volume
  return unfairness_ratio(s.weighted, s.volume * s.min_latency);
}

void check_baseline(const Instance& inst, const NashBaseline& baseline) {
  if (baseline.latency.size() != inst.num_commodities()) {
    throw std::invalid_argument("Nash baseline missing or sized for a different instance");
  }
}

}  // namespace

double unfairness_ratio(double numerator, double denominator) {
  if (denominator == 0.0) return numerator == 0.0 ? 1.0 : kInf;
  return numerator / denominator;
}

MeasureValues loaded_unfairness(const Instance& inst, const PathFlow& flow, double theta) {
  std::vector<double> values;
  for (const UsedStats& s : used_stats(inst, flow, theta)) values.push_back(unfairness_ratio(s.max_latency, s.min_latency));
  return aggregate(std::move(values));
}

MeasureValues average_unfairness(const Instance& inst, const PathFlow& flow, double theta) {
  std::vector<double> values;
  for (const UsedStats& s : used_stats(inst, flow, theta)) values.push_back(average_of(s));
  return aggregate(std::move(values));
}

MeasureValues ue_unfairness(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline, double theta) {
  check_baseline(inst, baseline);
  const auto stats = used_stats(inst, flow, theta);
  std::vector<double> values;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    values.push_back(unfairness_ratio(stats[i].max_latency, baseline.latency[i]));
  }
  return aggregate(std::move(values));
}

UnfairnessReport measure(const Instance& inst, const PathFlow& flow, const NashBaseline& baseline, double theta) {
  check_baseline(inst, baseline);
  const auto stats = used_stats(inst, flow, theta);
  UnfairnessReport report;
  std::vector<double> l, a, u;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const UsedStats& s = stats[i];
    CommodityReport row;
    row.loaded = unfairness_ratio(s.max_latency, s.min_latency);
    row.average = average_of(s);
    row.ue = unfairness_ratio(s.max_latency, baseline.latency[i]);
    row.min_latency = s.min_latency;
    row.max_latency = s.max_latency;
    row.baseline = baseline.latency[i];
    row.used_paths = s.count;
    l.push_back(row.loaded);
    a.push_back(row.average);
    u.push_back(row.ue);
    report.commodities.push_back(row);
  }
  const MeasureValues ml = aggregate(std::move(l));
  const MeasureValues ma = aggregate(std::move(a));
  const MeasureValues mu = aggregate(std::move(u));
  report.loaded = ml.aggregate;
  report.average = ma.aggregate;
  report.ue = mu.aggregate;
  report.mean_loaded = ml.mean;
  report.mean_average = ma.mean;
  report.mean_ue = mu.mean;
  return report;
}

BoundCheck bound_check(const Instance& inst, const UnfairnessReport& report, int degree, double slack) {
  BoundCheck check;
  check.degree = degree;
  check.bound = degree + 1.0;
  check.slack = slack;
  check.latencies_in_class = std::all_of(inst.edges().begin(), inst.edges().end(), [degree](const Edge& e) {
    const auto d = e.latency.polynomial_degree();
    return d.has_value() && *d <= degree;
  });
  check.margin_loaded = check.bound - report.loaded;
  check.margin_average = check.bound - report.average;
  check.margin_ue = check.bound - report.ue;
  check.within_bound = check.margin_loaded >= -slack && check.margin_average >= -slack && check.margin_ue >= -slack;
  return check;
}

}  // namespace fairflow
