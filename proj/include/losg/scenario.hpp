#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "losg/dynamics.hpp"
#include "losg/los.hpp"

namespace losg {

enum class ObjectiveKind { kMinTime, kMinFuel };

/// Element-wise state and control boxes. Infinite entries mean unbounded.
struct Bounds {
  StateVector state_min;
  StateVector state_max;
  ControlVector control_min;
  ControlVector control_max;
  double dilation_min = 0.1;
  double dilation_max = 5.0;
  /// The violation integral y is scaled from [0, violation_scale].
  double violation_scale = 1e-3;

  Bounds();
};

/// Square gate crossed at a fixed node: the plane nᵀ(r − c) = 0 and the
/// window |a_iᵀ(r − c)| ≤ half_width.
struct Gate {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
  Vec3 axis1 = Vec3::UnitY();
  Vec3 axis2 = Vec3::UnitZ();
  double half_width = 1.0;
  int node = -1;
  bool auto_node = true;  // node follows round(j·N/(G+1)) when the grid changes
};

struct RangeBounds {
  double min = 1.0;  // m, nonconvex
  double max = 10.0;  // m, convex
};

/// Subproblem penalty weights and the LICQ relaxation.
struct Weights {
  std::string id = "default";
  double objective = 1.0;
  double trust_region = 5.0;
  double virtual_control = 1e2;
  double virtual_buffer = 1e2;
  double licq = 1e-4;

  void validate() const;
};

/// Convergence tolerances of the prox-linear loop.
struct Tolerances {
  double trust_region = 1e-4;
  double virtual_control = 1e-6;
  double virtual_buffer = 1e-6;
  int max_iterations = 200;

  void validate() const;
};

struct Scenario {
  static constexpr int kSchemaVersion = 1;

  std::string name = "unnamed";
  VehicleParams vehicle;
  Bounds bounds;
  ViewCone cone;
  std::vector<Keypoint> keypoints;
  ObjectiveKind objective = ObjectiveKind::kMinTime;
  StateVector initial_state;
  std::optional<StateVector> final_state;
  std::array<bool, layout::kStateDim> final_mask{};  // pinned terminal components
  std::optional<double> final_time;                  // fixes s ≡ t_f when set
  double time_guess = 5.0;                           // s, seeds the initial dilation
  std::vector<Gate> gates;
  std::optional<RangeBounds> range;
  int nodes = 10;
  Weights weights;
  Tolerances tolerances;
  int substeps = 15;
  int dense_samples = 1000;

  Scenario();

  /// Change the grid size and reassign auto-placed gates.
  void set_nodes(int n);

  /// Dilation bounds after pinning a fixed final time.
  std::pair<double, double> dilation_bounds() const;

  double horizon_guess() const { return final_time.value_or(time_guess); }

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Node index of gate `j` (1-based) among `gate_count` gates on an N-node grid.
int auto_gate_node(int j, int gate_count, int nodes);

/// Convex nodal rows of a gate on the position r: lower ≤ coeffᵀ r ≤ upper.
struct GateRow {
  Vec3 coeff;
  double lower;
  double upper;
};
std::array<GateRow, 3> gate_constraints(const Gate& gate);
bool gate_satisfied(const Gate& gate, const Vec3& r, double tol = 1e-9);

Scenario cinematography_default();
Scenario relative_nav_default();

/// Builtin by name ("cinematography", "relative_navigation").
std::optional<Scenario> builtin_scenario(const std::string& name);

nlohmann::json scenario_to_json(const Scenario& sc);
/// Parses and validates. Names of fields that fell back to defaults are
/// appended to `defaulted` when given.
Scenario scenario_from_json(const nlohmann::json& j, std::vector<std::string>* defaulted = nullptr);

Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* defaulted = nullptr);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

nlohmann::json weights_to_json(const Weights& w);
Weights weights_from_json(const nlohmann::json& j);

const char* to_string(ObjectiveKind k);

}  // namespace losg
