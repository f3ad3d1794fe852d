#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairflow/network.hpp"

namespace fairflow::fixtures {

/// Where an oracle value comes from.
enum class Provenance {
  kClosedForm,    // formula evaluated at full precision
  kHandDerived,   // worked out by hand from the fixture's construction
  kConstruction,  // true by how the fixture is built
};

struct OracleValue {
  double value = 0.0;
  Provenance provenance = Provenance::kClosedForm;
};

/// An analytic instance with solver-independent reference flows and values.
struct FixtureOracle {
  std::string name;
  Instance instance;
  PathFlow system_flow;
  PathFlow nash_flow;
  /// The system-optimal edge flow (unique for every fixture here).
  EdgeFlow system_edge_flow;
  /// Additional path decompositions of the system edge flow worth testing.
  std::vector<PathFlow> system_decompositions;
  /// Extra named flows (e.g. constrained witnesses).
  std::map<std::string, PathFlow> flows;
  std::map<std::string, OracleValue> values;

  double value(const std::string& key) const { return values.at(key).value; }
};

/// Two parallel s->t edges: edge 0 carries `upper`, edge 1 is constant c.
FixtureOracle pigou(const LatencyFn& upper, double c, double rate);

/// Two Pigou networks (x and 1) in series; paths 1..4 are
/// (x,x), (1,1), (x,1), (1,x). Decompositions A (paths 1 and 2) and B
/// (paths 3 and 4) induce the same edge flow.
FixtureOracle pigou_series(double rate);

/// Braess network s, v, w, t with edges s->v (x), s->w (1), v->t (1),
/// w->t (x), v->w (0). Paths: P1 = s-v-t, P2 = s-v-w-t, P3 = s-w-t.
FixtureOracle braess(double rate);

/// Two commodities sharing sink t: s1->t (1.5), s2->t (x), s1->s2 (0);
/// rates 0.25 and 0.75.
FixtureOracle multi_commodity();

/// Named fixtures usable from the command line.
std::vector<std::string> fixture_names();
/// Throws std::invalid_argument for unknown names.
FixtureOracle by_name(const std::string& name);

/// Seeded parallel-link instance with affine, BPR and (at most one)
/// monomial links. Throws std::invalid_argument for n_links < 2.
Instance random_parallel_links(int n_links, std::uint64_t seed);

struct RandomNetworkOptions {
  int layers = 3;
  int width = 3;
  int commodities = 1;
  /// Polynomial latencies with nonnegative coefficients up to this degree.
  int max_degree = 2;
  /// Use BPR latencies instead of polynomials when true.
  bool bpr = false;
};

/// Seeded layered network (source layer, `layers` interior layers of
/// `width` nodes, sink layer) with random forward and lateral edges.
Instance random_network(const RandomNetworkOptions& options, std::uint64_t seed);

}  // namespace fairflow::fixtures
