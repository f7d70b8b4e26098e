#include "losg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "losg/errors.hpp"
#include "losg/evaluation.hpp"
#include "losg/prox_linear.hpp"
#include "losg/scenario.hpp"

namespace losg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string scenario;
  std::string method = "ct";
  std::vector<int> nodes;
  std::vector<std::string> weights;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  bool seedless = false;
  int n_prop = 0;
  int n_sub = 0;
  int max_iter = 0;
  bool verbose = false;
};

Scenario resolve_scenario(const std::string& spec, std::vector<std::string>* defaulted) {
  if (spec.empty()) throw InvalidInput("--scenario is required");
  if (auto builtin = builtin_scenario(spec)) return *builtin;
  return load_scenario(spec, defaulted);
}

// "default" keeps the scenario's weights, "sweep" expands to the default
// sweep, "{...}" is inline JSON, anything else names a sweep entry.
std::vector<Weights> resolve_weights(const std::vector<std::string>& specs, const Scenario& sc) {
  std::vector<Weights> out;
  const std::vector<Weights> sweep = default_weight_sweep();
  for (const std::string& s : specs) {
    if (s == "default") {
      out.push_back(sc.weights);
    } else if (s == "sweep") {
      out.insert(out.end(), sweep.begin(), sweep.end());
    } else if (!s.empty() && s.front() == '{') {
      json j;
      try {
        j = json::parse(s);
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("--weights: ") + e.what());
      }
      out.push_back(weights_from_json(j));
    } else {
      auto it = std::find_if(sweep.begin(), sweep.end(), [&](const Weights& w) { return w.id == s; });
      if (it == sweep.end()) throw InvalidInput("--weights: unknown weight set '" + s + "'");
      out.push_back(*it);
    }
  }
  return out;
}

void apply_overrides(Scenario& sc, const CommonArgs& a) {
  if (a.n_prop > 0) sc.dense_samples = a.n_prop;
  if (a.n_sub > 0) sc.substeps = a.n_sub;
  if (a.max_iter > 0) sc.tolerances.max_iterations = a.max_iter;
  sc.validate();
}

Method resolve_method(const std::string& s) {
  auto m = parse_method(s);
  if (!m) throw InvalidInput("--method must be ct or dt, got '" + s + "'");
  return *m;
}

ResultFormat resolve_format(const std::string& s) {
  if (s == "csv") return ResultFormat::kCsv;
  if (s == "json") return ResultFormat::kJson;
  throw InvalidInput("--format must be csv or json, got '" + s + "'");
}

json vectors_to_json(const std::vector<Eigen::VectorXd>& v) {
  json a = json::array();
  for (const Eigen::VectorXd& x : v) a.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  return a;
}

std::vector<Eigen::VectorXd> vectors_from_json(const json& a) {
  std::vector<Eigen::VectorXd> out;
  for (const json& row : a) {
    const auto v = row.get<std::vector<double>>();
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

json log_to_json(const SolveLog& log) {
  json its = json::array();
  for (const IterationLog& it : log.iterations) {
    its.push_back({{"iteration", it.iteration},
                   {"trust_region", it.trust_region},
                   {"vc_l1", it.vc_l1},
                   {"vb_l1", it.vb_l1},
                   {"objective", it.objective},
                   {"max_defect", it.max_defect},
                   {"wall_time", it.wall_time},
                   {"status", to_string(it.status)},
                   {"solver_iterations", it.solver_iterations}});
  }
  return {{"iterations", its},
          {"iteration_count", log.iteration_count()},
          {"runtime_s", log.runtime},
          {"converged", log.converged},
          {"failure", log.failure}};
}

json dense_to_json(const DenseTrajectory& d) {
  return {{"tau", d.tau}, {"time", d.time}, {"states", vectors_to_json(d.states)},
          {"controls", vectors_to_json(d.controls)}};
}

std::string dense_to_csv(const DenseTrajectory& d) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "tau,t,rx,ry,rz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,fx,fy,fz,mx,my,mz,s\n";
  for (int i = 0; i < d.size(); ++i) {
    os << d.tau[i] << ',' << d.time[i];
    for (int j = 0; j < layout::kStateDim; ++j) os << ',' << d.states[i][j];
    for (int j = 0; j < d.controls[i].size(); ++j) os << ',' << d.controls[i][j];
    os << '\n';
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("file not found: " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

int cmd_solve(const CommonArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> defaulted;
  Scenario sc = resolve_scenario(a.scenario, &defaulted);
  for (const std::string& f : defaulted) err << "default: " << f << "\n";
  const Method method = resolve_method(a.method);
  if (a.nodes.size() > 1) throw InvalidInput("solve takes a single --nodes value");
  if (!a.nodes.empty()) sc.set_nodes(a.nodes.front());
  if (!a.weights.empty()) {
    const auto w = resolve_weights(a.weights, sc);
    if (w.size() != 1) throw InvalidInput("solve takes a single weight set");
    sc.weights = w.front();
  }
  apply_overrides(sc, a);
  const ResultFormat format = resolve_format(a.format);

  const SolveResult res = solve(sc, SolveOptions::from_scenario(sc, method));
  if (a.verbose) {
    for (const IterationLog& it : res.log.iterations) {
      err << "iter " << it.iteration << " tr=" << it.trust_region << " vc=" << it.vc_l1
          << " vb=" << it.vb_l1 << " obj=" << it.objective << " status=" << to_string(it.status)
          << "\n";
    }
  }
  const ResultRecord rec = evaluate_solve(sc, method, res);
  const DenseTrajectory dense = propagate_solution(sc, res.trajectory, sc.dense_samples);

  const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
  fs::create_directories(dir);
  json sol = {{"method", to_string(method)},
              {"scenario", scenario_to_json(sc)},
              {"nodes",
               {{"tau", [&] {
                   std::vector<double> t;
                   const TimeGrid g(sc.nodes);
                   for (int k = 0; k < g.nodes(); ++k) t.push_back(g.tau(k));
                   return t;
                 }()},
                {"time", reference_times(res.trajectory)},
                {"states", vectors_to_json(res.trajectory.states)},
                {"controls", vectors_to_json(res.trajectory.controls)}}},
              {"dense", dense_to_json(dense)},
              {"log", log_to_json(res.log)},
              {"metrics", record_to_json(rec)}};
  write_text(dir / "solution.json", sol.dump(1) + "\n");
  if (format == ResultFormat::kCsv) {
    write_text(dir / "metrics.csv", records_to_csv({rec}));
    out << records_to_csv({rec});
  } else {
    json m = {{"config", scenario_to_json(sc)}, {"method", to_string(method)}};
    m["metrics"] = record_to_json(rec);
    write_text(dir / "metrics.json", m.dump(2) + "\n");
    out << record_to_json(rec).dump() << "\n";
  }

  err << to_string(method) << " " << sc.name << " N=" << sc.nodes << ": "
      << rec.iterations << " iterations, los_vio=" << rec.los_vio
      << ", objective=" << rec.objective << ", runtime=" << rec.runtime_s << " s"
      << (res.log.converged ? "" : " (not converged)") << "\n";
  if (!res.log.failure.empty()) {
    err << "error: " << res.log.failure << "\n";
    return kExitError;
  }
  return res.log.converged ? kExitConverged : kExitIterationCap;
}

int cmd_sweep(const CommonArgs& a, std::ostream& out, std::ostream& err) {
  Scenario sc = resolve_scenario(a.scenario, nullptr);
  apply_overrides(sc, a);
  if (a.nodes.empty()) throw InvalidInput("sweep needs at least one grid size (--nodes)");
  SweepSpec spec;
  spec.grid_sizes = a.nodes;
  spec.weight_sets = resolve_weights(a.weights.empty() ? std::vector<std::string>{"sweep"}
                                                       : a.weights,
                                     sc);
  if (a.method == "both") {
    spec.methods = {Method::kCt, Method::kDt};
  } else {
    spec.methods = {resolve_method(a.method)};
  }
  spec.jobs = a.jobs;
  const ResultFormat format = resolve_format(a.format);

  const std::vector<ResultRecord> records = run_sweep(sc, spec);
  const fs::path path = a.out.empty()
                            ? fs::path(format == ResultFormat::kCsv ? "results.csv" : "results.json")
                            : fs::path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  export_results(records, path, format);
  json config = {{"scenario", scenario_to_json(sc)},
                 {"grid_sizes", spec.grid_sizes},
                 {"methods", json::array()},
                 {"weights", json::array()}};
  for (Method m : spec.methods) config["methods"].push_back(to_string(m));
  for (const Weights& w : spec.weight_sets) config["weights"].push_back(weights_to_json(w));
  fs::path cfg = path;
  cfg.replace_extension();
  cfg += ".config.json";
  write_text(cfg, config.dump(2) + "\n");

  out << aggregate_to_csv(aggregate(records));
  err << records.size() << " records written to " << path.string() << "\n";
  return kExitConverged;
}

int cmd_propagate(const std::string& solution, const CommonArgs& a, std::ostream& out,
                  std::ostream& err) {
  if (solution.empty()) throw InvalidInput("--solution is required");
  const json j = read_json(solution);
  Scenario sc;
  Trajectory traj;
  try {
    sc = scenario_from_json(j.at("scenario"));
    traj.states = vectors_from_json(j.at("nodes").at("states"));
    traj.controls = vectors_from_json(j.at("nodes").at("controls"));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("solution file: ") + e.what());
  }
  apply_overrides(sc, a);
  const ResultFormat format = resolve_format(a.format);
  const DenseTrajectory dense = propagate_solution(sc, traj, sc.dense_samples);
  const double vio = los_vio(dense, sc.keypoints, sc.cone);
  const double cost = objective_cost(dense, sc);
  const std::string body = format == ResultFormat::kCsv
                               ? dense_to_csv(dense)
                               : dense_to_json(dense).dump(1) + "\n";
  if (a.out.empty()) {
    out << body;
  } else {
    write_text(a.out, body);
  }
  err << "samples=" << dense.size() << " los_vio=" << vio << " objective=" << cost << "\n";
  return kExitConverged;
}

double safe_ratio(double num, double den) {
  if (num == den) return 1.0;
  return num / den;
}

struct Means {
  double los_vio = 0.0;
  double runtime = 0.0;
  double iterations = 0.0;
};

std::map<int, Means> means_by_nodes(const std::vector<ResultRecord>& recs) {
  std::map<int, std::vector<const ResultRecord*>> g;
  for (const ResultRecord& r : recs) g[r.nodes].push_back(&r);
  std::map<int, Means> out;
  for (const auto& [n, rs] : g) {
    Means m;
    for (const ResultRecord* r : rs) {
      m.los_vio += r->los_vio;
      m.runtime += r->runtime_s;
      m.iterations += r->iterations;
    }
    m.los_vio /= rs.size();
    m.runtime /= rs.size();
    m.iterations /= rs.size();
    out[n] = m;
  }
  return out;
}

std::string scenario_of(const std::vector<ResultRecord>& recs) {
  std::string name;
  for (const ResultRecord& r : recs) {
    if (name.empty()) name = r.scenario;
    if (r.scenario != name) throw InvalidInput("results mix scenarios '" + name + "' and '" + r.scenario + "'");
  }
  return name;
}

int cmd_compare(const std::vector<std::string>& results, const CommonArgs& a, std::ostream& out,
                std::ostream& err) {
  std::vector<ResultRecord> base, other;
  std::string base_label, other_label;
  if (results.size() == 2) {
    base = import_results(results[0]);
    other = import_results(results[1]);
    base_label = results[0];
    other_label = results[1];
    if (scenario_of(base) != scenario_of(other)) {
      throw InvalidInput("cannot compare different scenarios: '" + scenario_of(base) + "' vs '" +
                         scenario_of(other) + "'");
    }
  } else {
    std::vector<ResultRecord> all;
    if (results.size() == 1) {
      all = import_results(results[0]);
    } else if (!a.scenario.empty()) {
      Scenario sc = resolve_scenario(a.scenario, nullptr);
      if (!a.nodes.empty()) sc.set_nodes(a.nodes.front());
      apply_overrides(sc, a);
      for (Method m : {Method::kCt, Method::kDt}) {
        all.push_back(evaluate_solve(sc, m, solve(sc, SolveOptions::from_scenario(sc, m))));
      }
    } else {
      throw InvalidInput("compare needs one or two --results files or a --scenario");
    }
    scenario_of(all);
    for (const ResultRecord& r : all) (r.method == "CT" ? base : other).push_back(r);
    if (base.empty() || other.empty()) throw InvalidInput("compare needs both CT and DT records");
    base_label = "CT";
    other_label = "DT";
  }

  const auto mb = means_by_nodes(base);
  const auto mo = means_by_nodes(other);
  out << "N,los_vio_ratio,runtime_ratio,iterations_ratio\n";
  out << std::setprecision(6);
  int matched = 0;
  for (const auto& [n, b] : mb) {
    auto it = mo.find(n);
    if (it == mo.end()) continue;
    ++matched;
    const Means& o = it->second;
    out << n << ',' << safe_ratio(o.los_vio, b.los_vio) << ',' << safe_ratio(o.runtime, b.runtime)
        << ',' << safe_ratio(o.iterations, b.iterations) << '\n';
  }
  if (matched == 0) throw InvalidInput("no common grid sizes to compare");
  err << "ratios are " << other_label << " / " << base_label << "\n";
  return kExitConverged;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Line-of-sight guidance by successive convexification"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string solution;
  std::vector<std::string> results;

  auto add_common = [&](CLI::App* sub, bool multi_nodes) {
    sub->add_option("--scenario", a.scenario, "Scenario file or builtin name");
    if (multi_nodes) {
      sub->add_option("--nodes", a.nodes, "Grid sizes")->delimiter(',');
    } else {
      sub->add_option("--nodes", a.nodes, "Grid size")->expected(1);
    }
    sub->add_option("--weights", a.weights, "Weight set id, 'default', 'sweep' or inline JSON");
    sub->add_option("--out", a.out, "Output path");
    sub->add_option("--format", a.format, "csv or json");
    sub->add_option("--n-prop", a.n_prop, "Dense propagation samples");
    sub->add_option("--n-sub", a.n_sub, "RK4 substeps per interval");
    sub->add_option("--max-iter", a.max_iter, "Iteration cap");
    sub->add_option("--jobs", a.jobs, "Concurrent sweep cells");
    sub->add_flag("--seedless", a.seedless, "Accepted for compatibility; nothing is random");
    sub->add_flag("-v,--verbose", a.verbose, "Per-iteration log on stderr");
  };

  CLI::App* s_solve = app.add_subcommand("solve", "Solve one scenario");
  add_common(s_solve, false);
  s_solve->add_option("--method", a.method, "ct or dt");

  CLI::App* s_sweep = app.add_subcommand("sweep", "Grid-size and weight sweep");
  add_common(s_sweep, true);
  s_sweep->add_option("--method", a.method, "ct, dt or both");

  CLI::App* s_prop = app.add_subcommand("propagate", "Dense propagation of a saved solution");
  add_common(s_prop, false);
  s_prop->add_option("--solution", solution, "solution.json written by solve");

  CLI::App* s_cmp = app.add_subcommand("compare", "CT versus DT ratios");
  add_common(s_cmp, false);
  s_cmp->add_option("--results", results, "One or two result tables")->expected(1, 2);

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitConverged : kExitError;
  }

  try {
    if (s_sweep->parsed() && s_sweep->count("--method") == 0) a.method = "both";
    if (s_solve->parsed()) return cmd_solve(a, out, err);
    if (s_sweep->parsed()) return cmd_sweep(a, out, err);
    if (s_prop->parsed()) return cmd_propagate(solution, a, out, err);
    return cmd_compare(results, a, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace losg
