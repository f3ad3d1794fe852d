#include "fairflow/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairflow/assignment.hpp"
#include "fairflow/cso.hpp"
#include "fairflow/errors.hpp"
#include "fairflow/fixtures.hpp"
#include "fairflow/tntp_io.hpp"
#include "fairflow/unfairness.hpp"

namespace fairflow::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string net;
  std::string trips;
  std::string instance;
  std::string fixture;
  std::string out;
  std::string format = "csv";
  std::string objective = "nash";
  double gap_tol = 1e-8;
  int max_iters = 20000;
  double theta = 1e-6;
  std::optional<double> bpr_a;
  double demand_scale = 1.0;
  double alpha_step = 0.01;
  std::string measure = "loaded";
  double beta = 0.0;
  std::string flow;
  std::string frontier;
  std::string fixture_name;
};

// 12 significant digits, identical to the CSV rendering. Non-finite values
// become the strings "inf", "-inf", "nan".
json number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return parse_number(format_number(v));
}

void add_input_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--net", o.net, "TNTP network file");
  cmd->add_option("--trips", o.trips, "TNTP trip table");
  cmd->add_option("--instance", o.instance, "native JSON instance");
  cmd->add_option("--fixture", o.fixture, "built-in fixture name");
  cmd->add_option("--bpr-a", o.bpr_a, "override every link's BPR coefficient");
  cmd->add_option("--demand-scale", o.demand_scale, "multiply TNTP demands");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--gap-tol", o.gap_tol, "relative gap tolerance");
  cmd->add_option("--max-iters", o.max_iters, "Frank-Wolfe iteration cap");
  cmd->add_option("--theta", o.theta, "relative used-path threshold");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

Instance load_instance(const Options& o) {
  const int sources = (!o.net.empty() || !o.trips.empty()) + !o.instance.empty() + !o.fixture.empty();
  if (sources != 1) throw UsageError("exactly one input source is required: --net/--trips, --instance or --fixture");
  if (!o.net.empty() || !o.trips.empty()) {
    if (o.net.empty() || o.trips.empty()) throw UsageError("--net and --trips must be given together");
    if (!(o.demand_scale > 0.0)) throw UsageError("--demand-scale must be positive");
    const TntpNet net = parse_net(read_file(o.net), o.net);
    const TntpTrips trips = parse_trips(read_file(o.trips), o.trips);
    return build_instance(net, trips, BuildOptions{o.bpr_a, o.demand_scale});
  }
  if (o.bpr_a || o.demand_scale != 1.0) throw UsageError("--bpr-a and --demand-scale apply to TNTP input only");
  if (!o.instance.empty()) return read_instance(read_file(o.instance), o.instance);
  try {
    return fixtures::by_name(o.fixture).instance;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--fixture: ") + e.what());
  }
}

SolveOptions solver_options(const Options& o) {
  if (!(o.gap_tol > 0.0)) throw UsageError("--gap-tol must be positive");
  if (o.max_iters < 1) throw UsageError("--max-iters must be at least 1");
  if (!(o.theta >= 0.0 && o.theta < 1.0)) throw UsageError("--theta must lie in [0, 1)");
  SolveOptions s;
  s.gap_tol = o.gap_tol;
  s.max_iters = o.max_iters;
  s.theta = o.theta;
  s.record_log = false;
  return s;
}

unsigned sweep_threads() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FAIRFLOW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw UsageError("FAIRFLOW_THREADS must be a positive integer");
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  return threads;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

json paths_json(const PathFlow& flow) {
  json rows = json::array();
  int id = 0;
  for (std::size_t i = 0; i < flow.num_commodities(); ++i) {
    for (const auto& entry : flow.paths(i)) {
      rows.push_back({{"path_id", id++}, {"commodity", i}, {"edges", entry.edges}, {"flow", number(entry.flow)}});
    }
  }
  return rows;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o);
  Objective objective = Objective::nash();
  try {
    objective = Objective::parse(o.objective);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--objective: ") + e.what());
  }
  const SolveResult r = solve(inst, objective, solver_options(o));
  if (o.format == "json") {
    json j;
    j["objective"] = objective.to_string();
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["relative_gap"] = number(r.relative_gap);
    j["objective_value"] = number(r.objective_value);
    j["cost"] = number(r.cost);
    j["paths"] = paths_json(r.path_flow);
    emit(o, j.dump(2) + "\n", out);
  } else {
    std::ostringstream s;
    s << "# objective," << objective.to_string() << "\n"
      << "# converged," << (r.converged ? 1 : 0) << "\n"
      << "# iterations," << r.iterations << "\n"
      << "# relative_gap," << format_number(r.relative_gap) << "\n"
      << "# objective_value," << format_number(r.objective_value) << "\n"
      << "# cost," << format_number(r.cost) << "\n"
      << write_path_flow_csv(r.path_flow);
    emit(o, s.str(), out);
  }
  return r.converged ? kOk : kNotConverged;
}

int cmd_measure(const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o);
  if (o.flow.empty()) throw UsageError("--flow is required");
  const SolveOptions options = solver_options(o);
  const PathFlow flow = read_path_flow_csv(read_file(o.flow), inst.num_commodities(), o.flow);
  flow.validate(inst);
  flow.check_feasible(inst, 1e-6);
  const SolveResult nash = solve(inst, Objective::nash(), options);
  const NashBaseline baseline = baseline_from_flow(inst, nash.path_flow, options.theta);
  const UnfairnessReport report = measure(inst, flow, baseline, options.theta);
  const double cost = total_cost(inst, flow.edge_flow(inst));

  if (o.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < report.commodities.size(); ++i) {
      const CommodityReport& c = report.commodities[i];
      rows.push_back({{"commodity", i},
                      {"loaded", number(c.loaded)},
                      {"average", number(c.average)},
                      {"ue", number(c.ue)},
                      {"min_latency", number(c.min_latency)},
                      {"max_latency", number(c.max_latency)},
                      {"baseline", number(c.baseline)},
                      {"used_paths", c.used_paths}});
    }
    json j;
    j["cost"] = number(cost);
    j["baseline_converged"] = nash.converged;
    j["loaded"] = number(report.loaded);
    j["average"] = number(report.average);
    j["ue"] = number(report.ue);
    j["mean_loaded"] = number(report.mean_loaded);
    j["mean_average"] = number(report.mean_average);
    j["mean_ue"] = number(report.mean_ue);
    j["commodities"] = std::move(rows);
    emit(o, j.dump(2) + "\n", out);
  } else {
    std::ostringstream s;
    s << "# cost," << format_number(cost) << "\n"
      << "# baseline_converged," << (nash.converged ? 1 : 0) << "\n"
      << "commodity,loaded,average,ue,min_latency,max_latency,baseline,used_paths\n";
    for (std::size_t i = 0; i < report.commodities.size(); ++i) {
      const CommodityReport& c = report.commodities[i];
      s << i << ',' << format_number(c.loaded) << ',' << format_number(c.average) << ',' << format_number(c.ue)
        << ',' << format_number(c.min_latency) << ',' << format_number(c.max_latency) << ','
        << format_number(c.baseline) << ',' << c.used_paths << "\n";
    }
    s << "max," << format_number(report.loaded) << ',' << format_number(report.average) << ','
      << format_number(report.ue) << ",,,,\n"
      << "mean," << format_number(report.mean_loaded) << ',' << format_number(report.mean_average) << ','
      << format_number(report.mean_ue) << ",,,,\n";
    emit(o, s.str(), out);
  }
  return nash.converged ? kOk : kNotConverged;
}

const char* kFrontierHeader = "alpha,cost,rho,u_loaded,u_average,u_ue,gap,iters,converged";

std::string frontier_csv(const std::vector<FrontierPoint>& points) {
  std::ostringstream s;
  s << kFrontierHeader << "\n";
  for (const FrontierPoint& p : points) {
    s << format_number(p.alpha) << ',' << format_number(p.cost) << ',' << format_number(p.rho) << ','
      << format_number(p.u_loaded) << ',' << format_number(p.u_average) << ',' << format_number(p.u_ue) << ','
      << format_number(p.gap) << ',' << p.iterations << ',' << (p.converged ? 1 : 0) << "\n";
  }
  return s.str();
}

std::vector<FrontierPoint> parse_frontier_csv(const std::string& text, const std::string& source) {
  std::vector<FrontierPoint> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      if (line != kFrontierHeader) throw ParseError(source, line_no, std::string("expected header ") + kFrontierHeader);
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw ParseError(source, line_no, "expected 9 columns");
    try {
      FrontierPoint p;
      p.alpha = parse_number(cells[0]);
      p.cost = parse_number(cells[1]);
      p.rho = parse_number(cells[2]);
      p.u_loaded = parse_number(cells[3]);
      p.u_average = parse_number(cells[4]);
      p.u_ue = parse_number(cells[5]);
      p.gap = parse_number(cells[6]);
      p.iterations = static_cast<int>(parse_number(cells[7]));
      p.converged = parse_number(cells[8]) != 0.0;
      points.push_back(p);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (header) throw ParseError(source, line_no, "empty frontier file");
  return points;
}

struct SweepOutcome {
  std::vector<FrontierPoint> points;
  double system_cost = 0.0;
  bool all_converged = true;
};

SweepOutcome run_sweep(const Options& o) {
  const Instance inst = load_instance(o);
  const SolveOptions options = solver_options(o);
  std::vector<double> grid;
  try {
    grid = alpha_grid(o.alpha_step);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--alpha-step: ") + e.what());
  }
  Frontier frontier = sweep(inst, grid, options, sweep_threads());
  SweepOutcome outcome{std::move(frontier.points), frontier.system_cost, true};
  for (const FrontierPoint& p : outcome.points) outcome.all_converged = outcome.all_converged && p.converged;
  return outcome;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const SweepOutcome s = run_sweep(o);
  if (o.format == "json") {
    json rows = json::array();
    for (const FrontierPoint& p : s.points) {
      rows.push_back({{"alpha", number(p.alpha)},
                      {"cost", number(p.cost)},
                      {"rho", number(p.rho)},
                      {"u_loaded", number(p.u_loaded)},
                      {"u_average", number(p.u_average)},
                      {"u_ue", number(p.u_ue)},
                      {"gap", number(p.gap)},
                      {"iters", p.iterations},
                      {"converged", p.converged}});
    }
    emit(o, json{{"system_cost", number(s.system_cost)}, {"points", std::move(rows)}}.dump(2) + "\n", out);
  } else {
    emit(o, frontier_csv(s.points), out);
  }
  return s.all_converged ? kOk : kNotConverged;
}

int cmd_cso(const Options& o, std::ostream& out) {
  CsoQuery query;
  try {
    query.measure = parse_measure(o.measure);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--measure: ") + e.what());
  }
  if (!(o.beta >= 0.0) || !std::isfinite(o.beta)) throw UsageError("--beta must be a nonnegative number");
  query.beta = o.beta;

  std::vector<FrontierPoint> points;
  bool all_converged = true;
  if (!o.frontier.empty()) {
    const int sources = !o.net.empty() + !o.trips.empty() + !o.instance.empty() + !o.fixture.empty();
    if (sources != 0) throw UsageError("--frontier replaces the instance source flags");
    points = parse_frontier_csv(read_file(o.frontier), o.frontier);
  } else {
    SweepOutcome s = run_sweep(o);
    points = std::move(s.points);
    all_converged = s.all_converged;
  }
  const CsoResult r = cso_cost(points, query);
  const double alpha = r.witness ? points[*r.witness].alpha : std::nan("");
  if (o.format == "json") {
    json j;
    j["measure"] = to_string(query.measure);
    j["beta"] = number(query.beta);
    j["cost"] = number(r.cost);
    j["alpha_witness"] = r.witness ? number(alpha) : json(nullptr);
    emit(o, j.dump(2) + "\n", out);
  } else {
    std::ostringstream s;
    s << "measure,beta,cost,alpha_witness\n"
      << to_string(query.measure) << ',' << format_number(query.beta) << ',' << format_number(r.cost) << ','
      << (r.witness ? format_number(alpha) : "") << "\n";
    emit(o, s.str(), out);
  }
  return all_converged ? kOk : kNotConverged;
}

int cmd_fixtures_list(std::ostream& out) {
  for (const std::string& name : fixtures::fixture_names()) out << name << "\n";
  return kOk;
}

int cmd_fixtures_export(const Options& o, std::ostream& out) {
  Instance inst = [&] {
    try {
      return fixtures::by_name(o.fixture_name).instance;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  emit(o, write_instance(inst), out);
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o);
  double demand = 0.0;
  for (const Commodity& c : inst.commodities()) demand += c.rate;
  if (o.format == "json") {
    json j{{"valid", true},
           {"nodes", inst.num_nodes()},
           {"edges", inst.num_edges()},
           {"commodities", inst.num_commodities()},
           {"total_demand", number(demand)}};
    emit(o, j.dump(2) + "\n", out);
  } else {
    std::ostringstream s;
    s << "valid,nodes,edges,commodities,total_demand\n"
      << "1," << inst.num_nodes() << ',' << inst.num_edges() << ',' << inst.num_commodities() << ','
      << format_number(demand) << "\n";
    emit(o, s.str(), out);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Routing games: equilibria, unfairness measures and fairness-constrained optima", "fairflow"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "solve for a Nash, system-optimal or interpolated flow");
  add_input_flags(solve_cmd, o);
  add_solver_flags(solve_cmd, o);
  add_output_flags(solve_cmd, o);
  solve_cmd->add_option("--objective", o.objective, "nash, system or alpha=<v>");

  auto* measure_cmd = app.add_subcommand("measure", "unfairness of a path flow read from CSV");
  add_input_flags(measure_cmd, o);
  add_solver_flags(measure_cmd, o);
  add_output_flags(measure_cmd, o);
  measure_cmd->add_option("--flow", o.flow, "path flow CSV")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "trace the cost/unfairness frontier over an alpha grid");
  add_input_flags(sweep_cmd, o);
  add_solver_flags(sweep_cmd, o);
  add_output_flags(sweep_cmd, o);
  sweep_cmd->add_option("--alpha-step", o.alpha_step, "alpha grid spacing");

  auto* cso_cmd = app.add_subcommand("cso", "cheapest swept flow with unfairness at most 1 + beta");
  add_input_flags(cso_cmd, o);
  add_solver_flags(cso_cmd, o);
  add_output_flags(cso_cmd, o);
  cso_cmd->add_option("--alpha-step", o.alpha_step, "alpha grid spacing");
  cso_cmd->add_option("--measure", o.measure, "loaded, average or ue");
  cso_cmd->add_option("--beta", o.beta, "unfairness slack")->required();
  cso_cmd->add_option("--frontier", o.frontier, "reuse a frontier CSV instead of sweeping");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "built-in analytic instances");
  fixtures_cmd->require_subcommand(1);
  auto* list_cmd = fixtures_cmd->add_subcommand("list", "print fixture names");
  auto* export_cmd = fixtures_cmd->add_subcommand("export", "write a fixture as a native instance");
  export_cmd->add_option("name", o.fixture_name, "fixture name")->required();
  export_cmd->add_option("--out", o.out, "output file (default: stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "check an instance and print its size");
  add_input_flags(validate_cmd, o);
  add_output_flags(validate_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(o, out);
    if (*measure_cmd) return cmd_measure(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*cso_cmd) return cmd_cso(o, out);
    if (*list_cmd) return cmd_fixtures_list(out);
    if (*export_cmd) return cmd_fixtures_export(o, out);
    if (*validate_cmd) return cmd_validate(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace fairflow::cli
