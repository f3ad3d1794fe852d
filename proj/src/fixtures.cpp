#include "fairflow/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fairflow::fixtures {
namespace {

// Root of an increasing function g on [0, hi] with g(0) < target < g(hi).
template <class F>
double bisect_increasing(F g, double target, double hi) {
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Upper-edge flow x in [0, rate] solving g(x) = c, with g = l (Nash) or the
// marginal cost (system). Closed form for affine and monomial latencies.
double pigou_split(const LatencyFn& upper, double c, double rate, bool system) {
  auto g = [&](double x) { return system ? upper.marginal(x) : upper.evaluate(x); };
  if (g(rate) <= c) return rate;
  if (g(0.0) >= c) return 0.0;
  const double factor = system ? 2.0 : 1.0;
  if (const auto* a = std::get_if<Affine>(&upper.params())) {
    return (c - a->intercept) / (factor * a->slope);
  }
  if (const auto* m = std::get_if<Monomial>(&upper.params())) {
    const double scale = system ? (m->degree + 1.0) : 1.0;
    return std::pow(c / (scale * m->coef), 1.0 / m->degree);
  }
  return bisect_increasing(g, c, rate);
}

double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

OracleValue closed(double v) { return {v, Provenance::kClosedForm}; }
OracleValue hand(double v) { return {v, Provenance::kHandDerived}; }

}  // namespace

FixtureOracle pigou(const LatencyFn& upper, double c, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("pigou needs a positive rate");
  Instance inst(2, {Edge{0, 1, upper}, Edge{0, 1, LatencyFn::constant(c)}}, {Commodity{0, 1, rate}});
  const double xs = pigou_split(upper, c, rate, true);
  const double xn = pigou_split(upper, c, rate, false);

  auto two_path = [&](double x) {
    PathFlow f(1);
    if (x > 0.0) f.add(0, {0}, x);
    if (rate - x > 0.0) f.add(0, {1}, rate - x);
    return f;
  };
  FixtureOracle o{.name = "pigou", .instance = inst, .system_flow = two_path(xs), .nash_flow = two_path(xn)};
  o.system_edge_flow = {xs, rate - xs};
  o.system_decompositions = {o.system_flow};
  PathFlow all_upper(1);
  all_upper.add(0, {0}, rate);
  o.flows["all_upper"] = all_upper;

  const double cost_s = xs * upper.evaluate(xs) + (rate - xs) * c;
  const double cost_n = xn * upper.evaluate(xn) + (rate - xn) * c;
  // Used-path latencies of the system flow.
  const double lu = upper.evaluate(xs);
  const double hi = xs < rate ? (xs > 0.0 ? std::max(lu, c) : c) : lu;
  const double lo = xs < rate ? (xs > 0.0 ? std::min(lu, c) : c) : lu;
  const double nash_latency = xn > 0.0 ? (xn < rate ? std::min(upper.evaluate(xn), c) : upper.evaluate(xn)) : c;

  o.values["system_upper"] = closed(xs);
  o.values["nash_upper"] = closed(xn);
  o.values["system_cost"] = closed(cost_s);
  o.values["nash_cost"] = closed(cost_n);
  o.values["system_loaded"] = closed(ratio(hi, lo));
  o.values["system_average"] = closed(ratio(cost_s, rate * lo));
  o.values["nash_latency"] = closed(nash_latency);
  o.values["system_ue"] = closed(ratio(hi, nash_latency));
  o.values["all_upper_cost"] = closed(rate * upper.evaluate(rate));
  return o;
}

FixtureOracle pigou_series(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("pigou_series needs a positive rate");
  const LatencyFn x = LatencyFn::affine(1.0, 0.0);
  const LatencyFn one = LatencyFn::constant(1.0);
  Instance inst(3, {Edge{0, 1, x}, Edge{0, 1, one}, Edge{1, 2, x}, Edge{1, 2, one}}, {Commodity{0, 2, rate}});
  const std::vector<int> p1{0, 2}, p2{1, 3}, p3{0, 3}, p4{1, 2};

  // Each stage is an independent Pigou: 2u = 1 on the x edge.
  const double u = std::min(rate, 0.5);
  auto add = [](PathFlow& f, const std::vector<int>& p, double v) {
    if (v > 0.0) f.add(0, p, v);
  };
  PathFlow a(1);
  add(a, p1, u);
  add(a, p2, rate - u);
  const double cross = std::min(u, rate - u);
  PathFlow b(1);
  add(b, p3, cross);
  add(b, p4, cross);
  add(b, p1, u - cross);
  add(b, p2, rate - u - cross);
  const double w = std::min(rate, 1.0);
  PathFlow nash(1);
  add(nash, p1, w);
  add(nash, p2, rate - w);

  FixtureOracle o{.name = "pigou-series", .instance = inst, .system_flow = a, .nash_flow = nash};
  o.system_edge_flow = {u, rate - u, u, rate - u};
  o.system_decompositions = {a, b};
  o.flows["decomposition_a"] = a;
  o.flows["decomposition_b"] = b;
  o.values["system_cost"] = closed(2.0 * (u * u + (rate - u)));
  o.values["nash_latency"] = closed(2.0 * w);
  if (rate == 1.0) {
    // Decomposition A uses (x,x) at latency 1 and (1,1) at latency 2;
    // decomposition B uses the two mixed paths, both at latency 1.5.
    o.values["decomposition_a_loaded"] = hand(2.0);
    o.values["decomposition_b_loaded"] = hand(1.0);
    o.values["decomposition_a_ue"] = hand(1.0);
    o.values["decomposition_b_ue"] = hand(0.75);
  }
  return o;
}

FixtureOracle braess(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("braess needs a positive rate");
  const LatencyFn x = LatencyFn::affine(1.0, 0.0);
  const LatencyFn one = LatencyFn::constant(1.0);
  const LatencyFn zero = LatencyFn::constant(0.0);
  Instance inst(4, {Edge{0, 1, x}, Edge{0, 2, one}, Edge{1, 3, one}, Edge{2, 3, x}, Edge{1, 2, zero}},
                {Commodity{0, 3, rate}});
  const std::vector<int> p1{0, 2}, p2{0, 4, 3}, p3{1, 3};

  // Symmetric flows: a on P1 and P3, b on P2. Marginal costs are 2s + 1 on
  // P1/P3 and 4s on P2 where s = a + b is the load of each x edge.
  double a = 0.0, b = 0.0;
  if (rate <= 0.5) {
    b = rate;
  } else if (rate <= 1.0) {
    a = rate - 0.5;
    b = 1.0 - rate;
  } else {
    a = 0.5 * rate;
  }
  // Nash: latencies s + 1 on P1/P3, 2s on P2.
  double an = 0.0, bn = 0.0;
  if (rate <= 1.0) {
    bn = rate;
  } else if (rate <= 2.0) {
    an = rate - 1.0;
    bn = 2.0 - rate;
  } else {
    an = 0.5 * rate;
  }
  auto flow = [&](double pa, double pb) {
    PathFlow f(1);
    if (pa > 0.0) f.add(0, p1, pa);
    if (pb > 0.0) f.add(0, p2, pb);
    if (pa > 0.0) f.add(0, p3, pa);
    return f;
  };
  auto cost = [](double pa, double pb) {
    const double s = pa + pb;
    return 2.0 * s * s + 2.0 * pa;
  };

  FixtureOracle o{.name = "braess", .instance = inst, .system_flow = flow(a, b), .nash_flow = flow(an, bn)};
  o.system_edge_flow = {a + b, a, a, a + b, b};
  o.system_decompositions = {o.system_flow};
  o.values["system_cost"] = closed(cost(a, b));
  o.values["nash_cost"] = closed(cost(an, bn));
  o.values["nash_latency"] = closed(bn > 0.0 ? 2.0 * (an + bn) : an + bn + 1.0);

  // Even split over P1 and P3 only: the constrained witness f^beta at
  // r = 3/4, and the half-half optimum at r = 1.
  o.flows["outer_paths"] = flow(0.5 * rate, 0.0);
  o.values["outer_paths_cost"] = hand(cost(0.5 * rate, 0.0));
  o.values["outer_paths_latency"] = hand(0.5 * rate + 1.0);
  o.values["middle_path_latency_at_outer"] = hand(rate);
  return o;
}

FixtureOracle multi_commodity() {
  const LatencyFn x = LatencyFn::affine(1.0, 0.0);
  Instance inst(3, {Edge{0, 2, LatencyFn::constant(1.5)}, Edge{1, 2, x}, Edge{0, 1, LatencyFn::constant(0.0)}},
                {Commodity{0, 2, 0.25}, Commodity{1, 2, 0.75}});
  PathFlow system(2);
  system.add(0, {0}, 0.25);
  system.add(1, {1}, 0.75);
  PathFlow nash(2);
  nash.add(0, {2, 1}, 0.25);
  nash.add(1, {1}, 0.75);

  FixtureOracle o{.name = "multi-commodity", .instance = inst, .system_flow = system, .nash_flow = nash};
  o.system_edge_flow = {0.25, 0.75, 0.0};
  o.system_decompositions = {system};
  // The x edge carries 0.75 (marginal 1.5, matching the direct edge).
  o.values["system_cost"] = hand(0.25 * 1.5 + 0.75 * 0.75);
  o.values["commodity0_system_cost"] = hand(0.375);
  o.values["nash_cost"] = hand(1.0);
  o.values["nash_latency0"] = hand(1.0);
  o.values["nash_latency1"] = hand(1.0);
  o.values["system_loaded"] = hand(1.0);
  o.values["system_ue"] = hand(1.5);
  return o;
}

std::vector<std::string> fixture_names() {
  return {"pigou-linear", "pigou-ex6", "pigou-ex1", "pigou-series", "braess", "braess-ex7", "multi-commodity"};
}

FixtureOracle by_name(const std::string& name) {
  FixtureOracle o = [&]() {
    if (name == "pigou-linear") return pigou(LatencyFn::affine(1.0, 0.0), 1.0, 1.0);
    if (name == "pigou-ex6") return pigou(LatencyFn::affine(1.0, 0.0), 1.5, 1.0);
    if (name == "pigou-ex1") return pigou(LatencyFn::monomial(1.0, 4), 1e-6, 1.0);
    if (name == "pigou-series") return pigou_series(1.0);
    if (name == "braess") return braess(1.0);
    if (name == "braess-ex7") return braess(0.75);
    if (name == "multi-commodity") return multi_commodity();
    throw std::invalid_argument("unknown fixture '" + name + "'");
  }();
  o.name = name;
  return o;
}

Instance random_parallel_links(int n_links, std::uint64_t seed) {
  if (n_links < 2) throw std::invalid_argument("random_parallel_links needs at least two links");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  bool monomial_used = false;
  std::vector<Edge> edges;
  for (int j = 0; j < n_links; ++j) {
    const double pick = unit(rng);
    LatencyFn latency = LatencyFn::constant(1.0);
    if (pick < 0.2 && !monomial_used) {
      monomial_used = true;
      latency = LatencyFn::monomial(uniform(0.2, 2.0), 1 + static_cast<int>(rng() % 3));
    } else if (pick < 0.6) {
      latency = LatencyFn::affine(uniform(0.1, 2.0), uniform(0.1, 3.0));
    } else {
      static constexpr double kPowers[] = {1.0, 2.0, 4.0};
      latency = LatencyFn::bpr(uniform(0.5, 3.0), uniform(0.5, 3.0), uniform(0.05, 0.5), kPowers[rng() % 3]);
    }
    edges.push_back(Edge{0, 1, latency});
  }
  return Instance(2, std::move(edges), {Commodity{0, 1, uniform(0.5, 5.0)}});
}

Instance random_network(const RandomNetworkOptions& options, std::uint64_t seed) {
  if (options.layers < 1 || options.width < 1 || options.commodities < 1 || options.max_degree < 0) {
    throw std::invalid_argument("bad random network options");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto random_latency = [&]() {
    if (options.bpr) {
      return LatencyFn::bpr(uniform(0.5, 5.0), uniform(0.5, 3.0), 0.15, 4.0);
    }
    std::vector<double> coefs(options.max_degree + 1, 0.0);
    for (auto& c : coefs) c = unit(rng) < 0.6 ? uniform(0.0, 2.0) : 0.0;
    if (unit(rng) < 0.8) coefs[0] = uniform(0.1, 3.0);
    if (options.max_degree >= 1 && std::all_of(coefs.begin() + 1, coefs.end(), [](double c) { return c == 0.0; })) {
      coefs[1 + rng() % options.max_degree] = uniform(0.1, 2.0);
    }
    return LatencyFn::polynomial(coefs);
  };

  const int w = options.width;
  const int source = 0;
  const int sink = 1 + options.layers * w;
  auto node = [w](int layer, int k) { return 1 + layer * w + k; };
  std::vector<Edge> edges;
  for (int k = 0; k < w; ++k) edges.push_back(Edge{source, node(0, k), random_latency()});
  for (int layer = 0; layer + 1 < options.layers; ++layer) {
    for (int k = 0; k < w; ++k) {
      // one guaranteed forward edge plus random extras
      const int forced = static_cast<int>(rng() % w);
      for (int m = 0; m < w; ++m) {
        if (m == forced || unit(rng) < 0.35) edges.push_back(Edge{node(layer, k), node(layer + 1, m), random_latency()});
      }
      if (k + 1 < w && unit(rng) < 0.3) edges.push_back(Edge{node(layer, k), node(layer, k + 1), random_latency()});
    }
  }
  for (int k = 0; k < w; ++k) edges.push_back(Edge{node(options.layers - 1, k), sink, random_latency()});

  std::vector<Commodity> commodities{Commodity{source, sink, uniform(0.5, 3.0)}};
  while (static_cast<int>(commodities.size()) < options.commodities) {
    const int layer = static_cast<int>(rng() % options.layers);
    commodities.push_back(Commodity{node(layer, static_cast<int>(rng() % w)), sink, uniform(0.2, 2.0)});
  }
  return Instance(sink + 1, std::move(edges), std::move(commodities));
}

}  // namespace fairflow::fixtures
