#include "losg/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "losg/errors.hpp"
#include "losg/los.hpp"

namespace losg {

using namespace layout;

namespace {

StateVector vehicle_state(const Eigen::VectorXd& x) { return x.head<kStateDim>(); }

Trajectory vehicle_part(const Trajectory& traj) {
  Trajectory out;
  for (const Eigen::VectorXd& x : traj.states) out.states.push_back(x.head(kStateDim));
  out.controls = traj.controls;
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

// JSON has no NaN; non-finite metrics travel as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
double num_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

double los_vio(const DenseTrajectory& dense, const std::vector<Keypoint>& keypoints,
               const ViewCone& cone) {
  if (dense.size() == 0) return 0.0;
  double total = 0.0;
  for (int i = 0; i < dense.size(); ++i) {
    const StateVector x = vehicle_state(dense.states[i]);
    for (const Keypoint& kp : keypoints) {
      total += std::max(0.0, los_residual_full(x, dense.time[i], kp, cone).value);
    }
  }
  return total / dense.size();
}

double max_los_residual(const DenseTrajectory& dense, const std::vector<Keypoint>& keypoints,
                        const ViewCone& cone) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < dense.size(); ++i) {
    const StateVector x = vehicle_state(dense.states[i]);
    for (const Keypoint& kp : keypoints) {
      worst = std::max(worst, los_residual_full(x, dense.time[i], kp, cone).value);
    }
  }
  return worst;
}

double objective_cost(const DenseTrajectory& dense, const Scenario& sc) {
  if (dense.size() == 0) return 0.0;
  if (sc.objective == ObjectiveKind::kMinTime) return dense.time.back() - dense.time.front();
  double fuel = 0.0;
  for (int i = 0; i + 1 < dense.size(); ++i) {
    const double a = dense.controls[i].head<kControlDim>().norm();
    const double b = dense.controls[i + 1].head<kControlDim>().norm();
    fuel += 0.5 * (a + b) * (dense.time[i + 1] - dense.time[i]);
  }
  return fuel;
}

DenseTrajectory propagate_solution(const Scenario& sc, const Trajectory& traj, int samples) {
  const DilatedDynamics model(sc.vehicle);
  return propagate_nonlinear(model, traj.states.front().head(kStateDim), traj.controls, samples);
}

ResultRecord evaluate_solve(const Scenario& sc, Method method, const SolveResult& res) {
  ResultRecord r;
  r.method = to_string(method);
  r.scenario = sc.name;
  r.nodes = sc.nodes;
  r.weights_id = sc.weights.id;
  r.iterations = res.log.iteration_count();
  r.converged = res.log.converged;
  r.runtime_s = res.log.runtime;

  const DenseTrajectory dense = propagate_solution(sc, res.trajectory, sc.dense_samples);
  r.los_vio = los_vio(dense, sc.keypoints, sc.cone);
  r.objective = objective_cost(dense, sc);

  const DilatedDynamics model(sc.vehicle);
  double worst = 0.0;
  for (const Eigen::VectorXd& d : interval_defects(model, vehicle_part(res.trajectory),
                                                   sc.substeps)) {
    worst = std::max(worst, d.lpNorm<Eigen::Infinity>());
  }
  r.max_defect = worst;
  return r;
}

std::vector<Weights> default_weight_sweep() {
  std::vector<Weights> out;
  for (double obj : {0.1, 1.0, 10.0}) {
    for (double tr : {5.0, 50.0}) {
      Weights w;
      w.objective = obj;
      w.trust_region = tr;
      w.id = "obj" + fmt(obj) + "_tr" + fmt(tr);
      out.push_back(w);
    }
  }
  return out;
}

std::vector<ResultRecord> run_sweep(const Scenario& base, const SweepSpec& spec) {
  if (spec.grid_sizes.empty() || spec.weight_sets.empty() || spec.methods.empty()) {
    throw InvalidInput("run_sweep: every sweep axis needs at least one entry");
  }
  struct Cell {
    Method method;
    int nodes;
    Weights weights;
  };
  std::vector<Cell> cells;
  for (Method m : spec.methods) {
    for (int n : spec.grid_sizes) {
      for (const Weights& w : spec.weight_sets) cells.push_back({m, n, w});
    }
  }

  std::vector<ResultRecord> out(cells.size());
  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    Scenario sc = base;
    sc.set_nodes(c.nodes);
    sc.weights = c.weights;
    try {
      const SolveResult res = solve(sc, SolveOptions::from_scenario(sc, c.method));
      out[i] = evaluate_solve(sc, c.method, res);
    } catch (const std::exception&) {
      ResultRecord r;
      r.method = to_string(c.method);
      r.scenario = sc.name;
      r.nodes = c.nodes;
      r.weights_id = c.weights.id;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.los_vio = r.objective = r.runtime_s = r.max_defect = nan;
      out[i] = r;
    }
  };

  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRecord>& records) {
  std::vector<AggregateRow> rows;
  std::map<std::pair<std::string, int>, std::vector<const ResultRecord*>> groups;
  for (const ResultRecord& r : records) {
    auto key = std::make_pair(r.method, r.nodes);
    if (groups.find(key) == groups.end()) {
      AggregateRow row;
      row.method = r.method;
      row.nodes = r.nodes;
      rows.push_back(row);
    }
    groups[key].push_back(&r);
  }
  auto summarize = [](const std::vector<double>& v) {
    Summary s;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / v.size();
    return s;
  };
  for (AggregateRow& row : rows) {
    const auto& g = groups[{row.method, row.nodes}];
    std::vector<double> vio, obj, it, rt;
    for (const ResultRecord* r : g) {
      vio.push_back(r->los_vio);
      obj.push_back(r->objective);
      it.push_back(r->iterations);
      rt.push_back(r->runtime_s);
    }
    row.count = static_cast<int>(g.size());
    row.los_vio = summarize(vio);
    row.objective = summarize(obj);
    row.iterations = summarize(it);
    row.runtime_s = summarize(rt);
  }
  return rows;
}

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream os;
  os << "method,scenario,N,weights_id,los_vio,objective,iterations,converged,runtime_s,"
        "max_defect\n";
  for (const ResultRecord& r : records) {
    os << r.method << ',' << r.scenario << ',' << r.nodes << ',' << r.weights_id << ','
       << fmt(r.los_vio) << ',' << fmt(r.objective) << ',' << r.iterations << ','
       << (r.converged ? "true" : "false") << ',' << fmt(r.runtime_s) << ','
       << fmt(r.max_defect) << '\n';
  }
  return os.str();
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "method,N,count";
  for (const char* m : {"los_vio", "objective", "iterations", "runtime_s"}) {
    os << ',' << m << "_min," << m << "_mean," << m << "_max";
  }
  os << '\n';
  for (const AggregateRow& r : rows) {
    os << r.method << ',' << r.nodes << ',' << r.count;
    for (const Summary* s : {&r.los_vio, &r.objective, &r.iterations, &r.runtime_s}) {
      os << ',' << fmt(s->min) << ',' << fmt(s->mean) << ',' << fmt(s->max);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<ResultRecord> records_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("method,scenario,N", 0) != 0) {
    throw InvalidInput("results CSV: missing header");
  }
  std::vector<ResultRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      throw InvalidInput("results CSV line " + std::to_string(lineno) + ": expected 10 fields");
    }
    ResultRecord r;
    try {
      r.method = f[0];
      r.scenario = f[1];
      r.nodes = std::stoi(f[2]);
      r.weights_id = f[3];
      r.los_vio = parse_double(f[4]);
      r.objective = parse_double(f[5]);
      r.iterations = std::stoi(f[6]);
      r.converged = f[7] == "true";
      r.runtime_s = parse_double(f[8]);
      r.max_defect = parse_double(f[9]);
    } catch (const std::logic_error& e) {
      throw InvalidInput("results CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(r);
  }
  return out;
}

nlohmann::json record_to_json(const ResultRecord& r) {
  return {{"method", r.method},         {"scenario", r.scenario},
          {"N", r.nodes},               {"weights_id", r.weights_id},
          {"los_vio", num(r.los_vio)},  {"objective", num(r.objective)},
          {"iterations", r.iterations}, {"converged", r.converged},
          {"runtime_s", num(r.runtime_s)}, {"max_defect", num(r.max_defect)}};
}

ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  try {
    r.method = j.at("method").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.nodes = j.at("N").get<int>();
    r.weights_id = j.at("weights_id").get<std::string>();
    r.los_vio = num_from(j.at("los_vio"));
    r.objective = num_from(j.at("objective"));
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.runtime_s = num_from(j.at("runtime_s"));
    r.max_defect = num_from(j.at("max_defect"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("result record: ") + e.what());
  }
  return r;
}

nlohmann::json results_to_json(const std::vector<ResultRecord>& records) {
  nlohmann::json recs = nlohmann::json::array();
  for (const ResultRecord& r : records) recs.push_back(record_to_json(r));
  nlohmann::json agg = nlohmann::json::array();
  for (const AggregateRow& a : aggregate(records)) {
    nlohmann::json row = {{"method", a.method}, {"N", a.nodes}, {"count", a.count}};
    auto put = [&](const char* name, const Summary& s) {
      row[name] = {{"min", num(s.min)}, {"mean", num(s.mean)}, {"max", num(s.max)}};
    };
    put("los_vio", a.los_vio);
    put("objective", a.objective);
    put("iterations", a.iterations);
    put("runtime_s", a.runtime_s);
    agg.push_back(row);
  }
  return {{"records", recs}, {"aggregate", agg}};
}

std::vector<ResultRecord> results_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("records") : j;
  if (!arr.is_array()) throw InvalidInput("results JSON: expected an array of records");
  std::vector<ResultRecord> out;
  for (const nlohmann::json& r : arr) out.push_back(record_from_json(r));
  return out;
}

std::filesystem::path aggregate_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_extension();
  p += ".aggregate.csv";
  return p;
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}
}  // namespace

void export_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path,
                    ResultFormat format) {
  if (records.empty()) throw InvalidInput("export_results: empty table");
  if (format == ResultFormat::kCsv) {
    write_text(path, records_to_csv(records));
    write_text(aggregate_path(path), aggregate_to_csv(aggregate(records)));
  } else {
    write_text(path, results_to_json(records).dump(2) + "\n");
  }
}

std::vector<ResultRecord> import_results(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("results file not found: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  if (path.extension() == ".json") {
    try {
      return results_from_json(nlohmann::json::parse(ss.str()));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("results JSON: ") + e.what());
    }
  }
  return records_from_csv(ss.str());
}

}  // namespace losg
