#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "losg/discretizer.hpp"
#include "losg/prox_linear.hpp"
#include "losg/scenario.hpp"

namespace losg {

/// Mean over samples of Σ_keypoints max{0, g}.
double los_vio(const DenseTrajectory& dense, const std::vector<Keypoint>& keypoints,
               const ViewCone& cone);
/// Largest g over samples and keypoints.
double max_los_residual(const DenseTrajectory& dense, const std::vector<Keypoint>& keypoints,
                        const ViewCone& cone);

/// Min-time: elapsed physical time. Min-fuel: trapezoidal ∫‖(f, M)‖₂ dt.
double objective_cost(const DenseTrajectory& dense, const Scenario& sc);

/// Dense single-shooting propagation of the vehicle state under the FOH
/// controls of `traj` (CT or DT node values).
DenseTrajectory propagate_solution(const Scenario& sc, const Trajectory& traj, int samples);

struct ResultRecord {
  std::string method;  // "CT" | "DT"
  std::string scenario;
  int nodes = 0;
  std::string weights_id;
  double los_vio = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_s = 0.0;
  double max_defect = 0.0;

  bool operator==(const ResultRecord&) const = default;
};

/// Metrics of a finished solve: dense propagation from x_i, los_vio,
/// objective and the largest per-interval defect of the vehicle state.
ResultRecord evaluate_solve(const Scenario& sc, Method method, const SolveResult& res);

struct SweepSpec {
  std::vector<int> grid_sizes;
  std::vector<Weights> weight_sets;
  std::vector<Method> methods;
  int jobs = 1;
};

/// The six weight sets λ_obj ∈ {0.1, 1, 10} × λ_tr ∈ {5, 50}.
std::vector<Weights> default_weight_sweep();

/// Runs every (method, N, weights) cell; the table is ordered by method,
/// then N, then weight set, regardless of `jobs`.
std::vector<ResultRecord> run_sweep(const Scenario& sc, const SweepSpec& spec);

struct Summary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct AggregateRow {
  std::string method;
  int nodes = 0;
  int count = 0;
  Summary los_vio;
  Summary objective;
  Summary iterations;
  Summary runtime_s;
};

/// Min/mean/max per (method, N), in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<ResultRecord>& records);

enum class ResultFormat { kCsv, kJson };

/// Column order: method,scenario,N,weights_id,los_vio,objective,iterations,
/// converged,runtime_s,max_defect
std::string records_to_csv(const std::vector<ResultRecord>& records);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);
std::vector<ResultRecord> records_from_csv(const std::string& text);

nlohmann::json record_to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);
/// {"records": [...], "aggregate": [...]}
nlohmann::json results_to_json(const std::vector<ResultRecord>& records);
/// Accepts the object above or a bare array of records.
std::vector<ResultRecord> results_from_json(const nlohmann::json& j);

/// CSV writes the records to `path` and the aggregate next to it
/// (<stem>.aggregate.csv); JSON writes both into one document.
void export_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path,
                    ResultFormat format);
std::filesystem::path aggregate_path(const std::filesystem::path& path);
/// Reads a file written by export_results (format from the extension).
std::vector<ResultRecord> import_results(const std::filesystem::path& path);

}  // namespace losg
