#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fairflow/latency.hpp"
#include "fairflow/network.hpp"

namespace fairflow {

// ---------------------------------------------------------------------------
// TNTP benchmark files
// ---------------------------------------------------------------------------

struct TntpLink {
  int init_node = 0;  // 1-based, as in the file
  int term_node = 0;
  double capacity = 0.0;
  double length = 0.0;
  double free_flow_time = 0.0;
  double b = 0.15;
  double power = 4.0;
  double speed = 0.0;
  double toll = 0.0;
  int link_type = 0;
};

struct TntpNet {
  int zones = 0;
  int nodes = 0;
  int first_through_node = 1;
  std::vector<TntpLink> links;
};

struct TntpDemand {
  int origin = 0;  // 1-based
  int destination = 0;
  double demand = 0.0;
};

struct TntpTrips {
  int zones = 0;
  double total_flow = 0.0;
  /// Positive-demand pairs with origin != destination, in file order.
  std::vector<TntpDemand> demands;
};

/// Parses a `_net.tntp` file. Throws ParseError (with line number) on a
/// malformed header, a link count mismatch, a record with the wrong number
/// of fields, a non-numeric field, or a node outside the declared range.
TntpNet parse_net(std::string_view text, const std::string& source = "<net>");

/// Parses a `_trips.tntp` file. Zero-demand and diagonal pairs are dropped.
TntpTrips parse_trips(std::string_view text, const std::string& source = "<trips>");

struct BuildOptions {
  /// Overrides every link's BPR coefficient when set (e.g. 0.15).
  std::optional<double> bpr_a;
  double demand_scale = 1.0;
};

/// Instance with BPR latencies xi_e (1 + a (f_e / kappa_e)^p). Node k of the
/// file becomes node k - 1. Throws DomainError for non-positive capacity and
/// StructuralError for an unreachable sink or an empty demand set.
Instance build_instance(const TntpNet& net, const TntpTrips& trips, const BuildOptions& options = {});

// ---------------------------------------------------------------------------
// Native formats
// ---------------------------------------------------------------------------

inline constexpr int kInstanceFormatVersion = 1;

nlohmann::json latency_to_json(const LatencyFn& latency);
/// Throws std::invalid_argument on unknown kinds or missing fields.
LatencyFn latency_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

std::string write_instance(const Instance& inst);
/// Throws ParseError for malformed JSON or schema violations.
Instance read_instance(std::string_view text, const std::string& source = "<instance>");

/// CSV with header `path_id,commodity,edges,flow`; `edges` is a
/// space-separated list of edge indices.
std::string write_path_flow_csv(const PathFlow& flow);
/// Rows of one path id are summed. Throws ParseError.
PathFlow read_path_flow_csv(std::string_view text, std::size_t num_commodities, const std::string& source = "<flow>");

/// 12 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double value);
/// Inverse of format_number.
double parse_number(std::string_view text);

/// Whole-file read. Throws Error when the file cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace fairflow
