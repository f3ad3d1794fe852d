#include "fairflow/tntp_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fairflow/errors.hpp"

namespace fairflow {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  const auto v = to_double(s);
  if (!v || *v != std::floor(*v) || std::abs(*v) > 2e9) return std::nullopt;
  return static_cast<int>(*v);
}

// Reads the `<KEY> value` block up to `<END OF METADATA>`. Returns the index
// of the first line after the block.
std::size_t read_metadata(const std::vector<std::string_view>& lines, const std::string& source,
                          std::map<std::string, std::string>& meta) {
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '~') continue;
    if (line.front() != '<') throw ParseError(source, static_cast<int>(n + 1), "expected <KEY> metadata line");
    const auto close = line.find('>');
    if (close == std::string_view::npos) throw ParseError(source, static_cast<int>(n + 1), "unterminated metadata tag");
    const std::string key(line.substr(1, close - 1));
    if (key == "END OF METADATA") return n + 1;
    meta[key] = std::string(trim(line.substr(close + 1)));
  }
  throw ParseError(source, static_cast<int>(lines.size()), "missing <END OF METADATA>");
}

int meta_int(const std::map<std::string, std::string>& meta, const std::string& key, const std::string& source,
             std::optional<int> fallback) {
  const auto it = meta.find(key);
  if (it == meta.end()) {
    if (fallback) return *fallback;
    throw ParseError(source, 1, "missing <" + key + "> header");
  }
  const auto v = to_int(it->second);
  if (!v || *v < 0) throw ParseError(source, 1, "header <" + key + "> is not a nonnegative integer");
  return *v;
}

}  // namespace

TntpNet parse_net(std::string_view text, const std::string& source) {
  const auto lines = split_lines(text);
  std::map<std::string, std::string> meta;
  const std::size_t body = read_metadata(lines, source, meta);

  TntpNet net;
  net.nodes = meta_int(meta, "NUMBER OF NODES", source, std::nullopt);
  const int declared = meta_int(meta, "NUMBER OF LINKS", source, std::nullopt);
  net.zones = meta_int(meta, "NUMBER OF ZONES", source, net.nodes);
  net.first_through_node = meta_int(meta, "FIRST THRU NODE", source, 1);

  for (std::size_t n = body; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n + 1);
    std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '~') continue;
    if (line.back() == ';') line.remove_suffix(1);
    const auto fields = split_ws(line);
    if (fields.size() != 10) {
      throw ParseError(source, line_no, "link record has " + std::to_string(fields.size()) + " fields, expected 10");
    }
    double v[10];
    for (std::size_t k = 0; k < 10; ++k) {
      const auto parsed = to_double(fields[k]);
      if (!parsed) throw ParseError(source, line_no, "non-numeric field '" + std::string(fields[k]) + "'");
      v[k] = *parsed;
    }
    TntpLink link;
    const auto init = to_int(fields[0]);
    const auto term = to_int(fields[1]);
    if (!init || !term || *init < 1 || *init > net.nodes || *term < 1 || *term > net.nodes) {
      throw ParseError(source, line_no, "link endpoint outside 1.." + std::to_string(net.nodes));
    }
    link.init_node = *init;
    link.term_node = *term;
    link.capacity = v[2];
    link.length = v[3];
    link.free_flow_time = v[4];
    link.b = v[5];
    link.power = v[6];
    link.speed = v[7];
    link.toll = v[8];
    link.link_type = static_cast<int>(v[9]);
    if (link.free_flow_time < 0.0) throw ParseError(source, line_no, "negative free-flow time");
    net.links.push_back(link);
  }
  if (static_cast<int>(net.links.size()) != declared) {
    throw ParseError(source, static_cast<int>(lines.size()),
                     "header declares " + std::to_string(declared) + " links, found " + std::to_string(net.links.size()));
  }
  return net;
}

TntpTrips parse_trips(std::string_view text, const std::string& source) {
  const auto lines = split_lines(text);
  std::map<std::string, std::string> meta;
  const std::size_t body = read_metadata(lines, source, meta);

  TntpTrips trips;
  trips.zones = meta_int(meta, "NUMBER OF ZONES", source, std::nullopt);
  if (const auto it = meta.find("TOTAL OD FLOW"); it != meta.end()) {
    const auto v = to_double(it->second);
    if (!v) throw ParseError(source, 1, "header <TOTAL OD FLOW> is not numeric");
    trips.total_flow = *v;
  }

  int origin = 0;
  for (std::size_t n = body; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n + 1);
    const std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '~') continue;
    if (line.rfind("Origin", 0) == 0) {
      const auto id = to_int(line.substr(6));
      if (!id || *id < 1 || *id > trips.zones) throw ParseError(source, line_no, "origin outside declared zones");
      origin = *id;
      continue;
    }
    if (origin == 0) throw ParseError(source, line_no, "demand entry before any Origin line");
    std::size_t start = 0;
    while (start < line.size()) {
      auto end = line.find(';', start);
      if (end == std::string_view::npos) end = line.size();
      const std::string_view entry = trim(line.substr(start, end - start));
      start = end + 1;
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) throw ParseError(source, line_no, "expected 'destination : demand'");
      const auto dest = to_int(entry.substr(0, colon));
      const auto demand = to_double(entry.substr(colon + 1));
      if (!dest || !demand) throw ParseError(source, line_no, "non-numeric demand entry '" + std::string(entry) + "'");
      if (*dest < 1 || *dest > trips.zones) {
        throw ParseError(source, line_no, "demand for undeclared node " + std::to_string(*dest));
      }
      if (*demand < 0.0) throw ParseError(source, line_no, "negative demand");
      if (*demand > 0.0 && *dest != origin) trips.demands.push_back(TntpDemand{origin, *dest, *demand});
    }
  }
  return trips;
}

Instance build_instance(const TntpNet& net, const TntpTrips& trips, const BuildOptions& options) {
  if (!(options.demand_scale > 0.0)) throw DomainError("demand scale must be positive");
  std::vector<Edge> edges;
  edges.reserve(net.links.size());
  for (std::size_t e = 0; e < net.links.size(); ++e) {
    const TntpLink& link = net.links[e];
    if (!(link.capacity > 0.0)) throw DomainError("link " + std::to_string(e + 1) + " has non-positive capacity");
    const double a = options.bpr_a.value_or(link.b);
    edges.push_back(Edge{link.init_node - 1, link.term_node - 1,
                         LatencyFn::bpr(link.free_flow_time, link.capacity, a, link.power)});
  }
  std::vector<Commodity> commodities;
  for (const TntpDemand& d : trips.demands) {
    if (d.origin > net.nodes || d.destination > net.nodes) {
      throw StructuralError("trip endpoint beyond the network's node count");
    }
    commodities.push_back(Commodity{d.origin - 1, d.destination - 1, d.demand * options.demand_scale});
  }
  return Instance(net.nodes, std::move(edges), std::move(commodities));
}

json latency_to_json(const LatencyFn& latency) {
  json j;
  j["kind"] = std::string(latency.kind());
  const auto& p = latency.params();
  if (const auto* c = std::get_if<Constant>(&p)) {
    j["c"] = c->c;
  } else if (const auto* a = std::get_if<Affine>(&p)) {
    j["a"] = a->slope;
    j["b"] = a->intercept;
  } else if (const auto* m = std::get_if<Monomial>(&p)) {
    j["coef"] = m->coef;
    j["degree"] = m->degree;
  } else if (const auto* poly = std::get_if<Polynomial>(&p)) {
    j["coefs"] = poly->coefs;
  } else if (const auto* b = std::get_if<Bpr>(&p)) {
    j["xi"] = b->free_flow_time;
    j["kappa"] = b->capacity;
    j["a"] = b->a;
    j["p"] = b->power;
  }
  return j;
}

LatencyFn latency_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return LatencyFn::constant(j.at("c").get<double>());
    if (kind == "affine") return LatencyFn::affine(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "monomial") return LatencyFn::monomial(j.at("coef").get<double>(), j.at("degree").get<int>());
    if (kind == "polynomial") return LatencyFn::polynomial(j.at("coefs").get<std::vector<double>>());
    if (kind == "bpr") {
      return LatencyFn::bpr(j.at("xi").get<double>(), j.at("kappa").get<double>(), j.at("a").get<double>(),
                            j.at("p").get<double>());
    }
    throw std::invalid_argument("unknown latency kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad latency descriptor: ") + e.what());
  }
}

json instance_to_json(const Instance& inst) {
  json j;
  j["format"] = "fairflow-instance";
  j["version"] = kInstanceFormatVersion;
  j["nodes"] = inst.num_nodes();
  json edges = json::array();
  for (const Edge& e : inst.edges()) {
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"latency", latency_to_json(e.latency)}});
  }
  j["edges"] = std::move(edges);
  json commodities = json::array();
  for (const Commodity& c : inst.commodities()) {
    commodities.push_back({{"source", c.source}, {"sink", c.sink}, {"rate", c.rate}});
  }
  j["commodities"] = std::move(commodities);
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kInstanceFormatVersion) {
      throw std::invalid_argument("unsupported instance format version");
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back(Edge{e.at("tail").get<int>(), e.at("head").get<int>(), latency_from_json(e.at("latency"))});
    }
    std::vector<Commodity> commodities;
    for (const auto& c : j.at("commodities")) {
      commodities.push_back(Commodity{c.at("source").get<int>(), c.at("sink").get<int>(), c.at("rate").get<double>()});
    }
    return Instance(j.at("nodes").get<int>(), std::move(edges), std::move(commodities));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad instance document: ") + e.what());
  }
}

std::string write_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

Instance read_instance(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 1, e.what());
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  const auto v = to_double(text);
  if (!v) throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return *v;
}

std::string write_path_flow_csv(const PathFlow& flow) {
  std::ostringstream out;
  out << "path_id,commodity,edges,flow\n";
  int id = 0;
  for (std::size_t i = 0; i < flow.num_commodities(); ++i) {
    for (const auto& entry : flow.paths(i)) {
      out << id++ << ',' << i << ',';
      for (std::size_t k = 0; k < entry.edges.size(); ++k) out << (k ? " " : "") << entry.edges[k];
      out << ',' << format_number(entry.flow) << '\n';
    }
  }
  return out.str();
}

PathFlow read_path_flow_csv(std::string_view text, std::size_t num_commodities, const std::string& source) {
  const auto lines = split_lines(text);
  PathFlow flow(num_commodities);
  bool header = true;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n + 1);
    const std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      if (line != "path_id,commodity,edges,flow") throw ParseError(source, line_no, "expected header path_id,commodity,edges,flow");
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 4) throw ParseError(source, line_no, "expected 4 columns");
    const auto commodity = to_int(cells[1]);
    if (!commodity || *commodity < 0 || static_cast<std::size_t>(*commodity) >= num_commodities) {
      throw ParseError(source, line_no, "unknown commodity '" + std::string(cells[1]) + "'");
    }
    std::vector<int> edges;
    for (std::string_view token : split_ws(cells[2])) {
      const auto e = to_int(token);
      if (!e || *e < 0) throw ParseError(source, line_no, "bad edge index '" + std::string(token) + "'");
      edges.push_back(*e);
    }
    const auto value = to_double(cells[3]);
    if (!value || *value < 0.0) throw ParseError(source, line_no, "flow must be a nonnegative number");
    flow.add(*commodity, std::move(edges), *value);
  }
  return flow;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
}

}  // namespace fairflow
