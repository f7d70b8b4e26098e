#include "losg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "losg/errors.hpp"

namespace losg {

using namespace layout;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Bounds::Bounds() {
  state_min.setConstant(-kInf);
  state_max.setConstant(kInf);
  state_min.segment<4>(kQuaternion).setConstant(-1.0);
  state_max.segment<4>(kQuaternion).setConstant(1.0);
  control_min << -8.0, -8.0, 0.0, -1.0, -1.0, -1.0;
  control_max << 8.0, 8.0, 16.0, 1.0, 1.0, 1.0;
}

void Weights::validate() const {
  if (!(objective >= 0.0)) throw ValidationError("weights.objective", "must be nonnegative");
  if (!(trust_region > 0.0)) throw ValidationError("weights.trust_region", "must be positive");
  if (!(virtual_control > 0.0)) {
    throw ValidationError("weights.virtual_control", "must be positive");
  }
  if (!(virtual_buffer >= 0.0)) {
    throw ValidationError("weights.virtual_buffer", "must be nonnegative");
  }
  if (!(licq >= 0.0)) throw ValidationError("weights.licq", "must be nonnegative");
}

void Tolerances::validate() const {
  if (!(trust_region > 0.0)) throw ValidationError("tolerances.trust_region", "must be positive");
  if (!(virtual_control > 0.0)) {
    throw ValidationError("tolerances.virtual_control", "must be positive");
  }
  if (!(virtual_buffer > 0.0)) {
    throw ValidationError("tolerances.virtual_buffer", "must be positive");
  }
  if (max_iterations < 1) throw ValidationError("tolerances.max_iterations", "must be >= 1");
}

Scenario::Scenario() { initial_state = VehicleState().pack(); }

int auto_gate_node(int j, int gate_count, int nodes) {
  const double frac = static_cast<double>(j) / static_cast<double>(gate_count + 1);
  return static_cast<int>(std::lround(frac * nodes));
}

void Scenario::set_nodes(int n) {
  if (n < 2) throw ValidationError("grid.nodes", "need at least 2 nodes");
  nodes = n;
  const int g = static_cast<int>(gates.size());
  for (int j = 0; j < g; ++j) {
    if (gates[j].auto_node) gates[j].node = auto_gate_node(j + 1, g, n);
  }
}

std::pair<double, double> Scenario::dilation_bounds() const {
  if (final_time) return {*final_time, *final_time};
  return {bounds.dilation_min, bounds.dilation_max};
}

void Scenario::validate() const {
  if (keypoints.empty()) throw ValidationError("keypoints", "at least one keypoint is required");
  if (nodes < 2) throw ValidationError("grid.nodes", "need at least 2 nodes");
  cone.validate();
  weights.validate();
  tolerances.validate();
  if (substeps < 1) throw ValidationError("discretization.substeps", "must be >= 1");
  if (dense_samples < 2) throw ValidationError("discretization.dense_samples", "must be >= 2");

  for (int i = 0; i < kStateDim; ++i) {
    if (!(bounds.state_min[i] <= bounds.state_max[i])) {
      throw ValidationError("bounds.state", "min exceeds max at component " + std::to_string(i));
    }
  }
  for (int i = 0; i < kControlDim; ++i) {
    if (!(bounds.control_min[i] <= bounds.control_max[i]) ||
        !std::isfinite(bounds.control_min[i]) || !std::isfinite(bounds.control_max[i])) {
      throw ValidationError("bounds.control",
                            "finite min <= max required at component " + std::to_string(i));
    }
  }
  if (!(bounds.dilation_min > 0.0) || !(bounds.dilation_min <= bounds.dilation_max)) {
    throw ValidationError("bounds.dilation", "need 0 < min <= max");
  }
  if (!(bounds.violation_scale > 0.0)) {
    throw ValidationError("bounds.violation_scale", "must be positive");
  }
  if (final_time && !(*final_time > 0.0)) {
    throw ValidationError("final_time", "must be positive");
  }
  if (!(time_guess > 0.0)) throw ValidationError("time_guess", "must be positive");
  if (!initial_state.allFinite()) throw ValidationError("initial_state", "must be finite");
  if (std::abs(initial_state.segment<4>(kQuaternion).norm() - 1.0) > 1e-6) {
    throw ValidationError("initial_state", "attitude quaternion must be unit");
  }
  const bool any_pinned = std::any_of(final_mask.begin(), final_mask.end(), [](bool b) { return b; });
  if (any_pinned && !final_state) {
    throw ValidationError("final_state", "final_mask pins components but no final state given");
  }
  if (final_state && !final_state->allFinite()) {
    throw ValidationError("final_state", "must be finite");
  }

  for (std::size_t j = 0; j < gates.size(); ++j) {
    const Gate& g = gates[j];
    const std::string f = "gates[" + std::to_string(j) + "]";
    const double tol = 1e-9;
    if (std::abs(g.normal.norm() - 1.0) > tol || std::abs(g.axis1.norm() - 1.0) > tol ||
        std::abs(g.axis2.norm() - 1.0) > tol) {
      throw ValidationError(f, "normal and axes must be unit vectors");
    }
    if (std::abs(g.normal.dot(g.axis1)) > tol || std::abs(g.normal.dot(g.axis2)) > tol ||
        std::abs(g.axis1.dot(g.axis2)) > tol) {
      throw ValidationError(f, "axes must be orthonormal with the normal");
    }
    if (!(g.half_width > 0.0)) throw ValidationError(f + ".half_width", "must be positive");
    if (g.node < 1 || g.node >= nodes) {
      throw ValidationError(f + ".node", "node index outside the interior of the grid");
    }
  }

  if (range) {
    if (!(range->min >= 0.0) || !(range->min < range->max)) {
      throw ValidationError("range", "need 0 <= min < max");
    }
    const Vec3 r0 = initial_state.segment<3>(kPosition);
    for (const Keypoint& kp : keypoints) {
      const double d = (keypoint_position(kp, 0.0) - r0).norm();
      if (d > range->max) {
        throw ValidationError("range.max", "keypoint starts outside the maximum range");
      }
    }
  }
}

std::array<GateRow, 3> gate_constraints(const Gate& g) {
  const double hw = g.half_width;
  const double c1 = g.axis1.dot(g.center);
  const double c2 = g.axis2.dot(g.center);
  const double cn = g.normal.dot(g.center);
  return {GateRow{g.axis1, c1 - hw, c1 + hw}, GateRow{g.axis2, c2 - hw, c2 + hw},
          GateRow{g.normal, cn, cn}};
}

bool gate_satisfied(const Gate& gate, const Vec3& r, double tol) {
  for (const GateRow& row : gate_constraints(gate)) {
    const double v = row.coeff.dot(r);
    if (v < row.lower - tol || v > row.upper + tol) return false;
  }
  return true;
}

namespace {

StateVector hover_state(const Vec3& position, double yaw) {
  VehicleState s;
  s.position = position;
  s.attitude = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw);
  return s.pack();
}

// Camera boresight pitched 30° below the body x axis.
UnitQuaternion default_mount() {
  return UnitQuaternion::from_axis_angle(Vec3::UnitY(), 2.0 * std::numbers::pi / 3.0);
}

}  // namespace

Scenario cinematography_default() {
  Scenario sc;
  sc.name = "cinematography";
  sc.objective = ObjectiveKind::kMinFuel;
  sc.cone.norm = ConeNorm::kInfinity;
  sc.cone.alpha = std::numbers::pi / 4.0;
  sc.cone.beta = std::numbers::pi / 4.0;
  sc.cone.mount = default_mount();
  sc.keypoints = {Keypoint::sinusoid(Vec3(8.0, 0.0, 1.0), Vec3(0.0, 8.0, 0.0), 2.0, 0.0)};
  sc.initial_state = hover_state(Vec3(0.0, 0.0, 2.0), 0.0);
  sc.final_time = 10.0;
  sc.time_guess = 10.0;
  sc.range = RangeBounds{1.0, 10.0};

  Bounds& b = sc.bounds;
  b.state_min.segment<3>(kPosition) = Vec3(-10.0, -10.0, 0.0);
  b.state_max.segment<3>(kPosition) = Vec3(20.0, 10.0, 10.0);
  b.state_min.segment<3>(kVelocity).setConstant(-10.0);
  b.state_max.segment<3>(kVelocity).setConstant(10.0);
  b.state_min.segment<3>(kRate).setConstant(-5.0);
  b.state_max.segment<3>(kRate).setConstant(5.0);

  sc.set_nodes(10);
  return sc;
}

Scenario relative_nav_default() {
  constexpr double pi = std::numbers::pi;
  constexpr double radius = 5.0;
  Scenario sc;
  sc.name = "relative_navigation";
  sc.objective = ObjectiveKind::kMinTime;
  sc.cone.norm = ConeNorm::kTwo;
  sc.cone.alpha = pi / 4.0;
  sc.cone.beta = pi / 4.0;
  sc.cone.mount = default_mount();

  for (int i = 0; i < 10; ++i) {
    const double a = 2.0 * pi * i / 10.0;
    sc.keypoints.push_back(
        Keypoint::fixed(Vec3(std::cos(a), std::sin(a), 0.25 * static_cast<double>(i % 2))));
  }

  // Slalom around the landmark cluster: gates every 30°, alternating heights.
  for (int j = 1; j <= 10; ++j) {
    const double a = j * pi / 6.0;
    Gate g;
    const Vec3 radial(std::cos(a), std::sin(a), 0.0);
    g.center = radius * radial + Vec3(0.0, 0.0, j % 2 == 1 ? 1.5 : 2.5);
    g.normal = Vec3(-std::sin(a), std::cos(a), 0.0);
    g.axis1 = radial;
    g.axis2 = Vec3::UnitZ();
    g.half_width = 1.0;
    sc.gates.push_back(g);
  }

  sc.initial_state = hover_state(Vec3(radius, 0.0, 2.0), pi);
  const double end = 11.0 * pi / 6.0;
  StateVector xf = hover_state(Vec3(radius * std::cos(end), radius * std::sin(end), 2.0), 0.0);
  sc.final_state = xf;
  for (int i = 0; i < 3; ++i) {
    sc.final_mask[kPosition + i] = true;
    sc.final_mask[kVelocity + i] = true;
  }
  sc.time_guess = 8.0;

  Bounds& b = sc.bounds;
  b.state_min.segment<3>(kPosition) = Vec3(-10.0, -10.0, 0.0);
  b.state_max.segment<3>(kPosition) = Vec3(10.0, 10.0, 6.0);
  b.state_min.segment<3>(kVelocity).setConstant(-10.0);
  b.state_max.segment<3>(kVelocity).setConstant(10.0);
  b.state_min.segment<3>(kRate).setConstant(-5.0);
  b.state_max.segment<3>(kRate).setConstant(5.0);
  b.dilation_min = 1.0;
  b.dilation_max = 20.0;

  sc.set_nodes(22);
  return sc;
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  if (name == "cinematography") return cinematography_default();
  if (name == "relative_navigation" || name == "relative_nav") return relative_nav_default();
  return std::nullopt;
}

const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::kMinTime ? "min_time" : "min_fuel";
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json bounded(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename Vec>
json vec_to_json(const Vec& v, bool allow_unbounded = false) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(allow_unbounded ? bounded(v[i]) : json(v[i]));
  return a;
}

class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>* defaulted)
      : j_(j), path_(std::move(path)), defaulted_(defaulted) {}

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ValidationError(field(key), "required field missing");
    return j_.at(key);
  }

  Reader sub(const std::string& key) const { return Reader(at(key), field(key), defaulted_); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ValidationError(field(key), "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) const {
    if (!has(key)) {
      note(key);
      return fallback;
    }
    return number(key);
  }

  int integer_or(const std::string& key, int fallback) const {
    if (!has(key)) {
      note(key);
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
    return v.get<int>();
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    if (!has(key)) {
      note(key);
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }

  /// Fixed-length numeric array; null entries map to `null_value`.
  Eigen::VectorXd vector(const std::string& key, int n,
                         double null_value = std::numeric_limits<double>::quiet_NaN()) const {
    const json& v = at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != n) {
      throw ValidationError(field(key), "expected an array of " + std::to_string(n) + " numbers");
    }
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
      if (v[i].is_null() && !std::isnan(null_value)) {
        out[i] = null_value;
      } else if (v[i].is_number()) {
        out[i] = v[i].get<double>();
      } else {
        throw ValidationError(field(key), "entry " + std::to_string(i) + " is not a number");
      }
    }
    return out;
  }

  Vec3 vec3(const std::string& key) const { return vector(key, 3); }

  void note(const std::string& key) const {
    if (defaulted_) defaulted_->push_back(field(key));
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>* defaulted_;
};

json keypoint_to_json(const Keypoint& kp) {
  if (kp.kind == Keypoint::Kind::kStatic) {
    return {{"kind", "static"}, {"position", vec_to_json(kp.base)}};
  }
  return {{"kind", "sinusoid"},
          {"base", vec_to_json(kp.base)},
          {"amplitude", vec_to_json(kp.amplitude)},
          {"frequency", kp.frequency},
          {"phase", kp.phase}};
}

Keypoint keypoint_from_json(const Reader& r) {
  const std::string kind = r.string_or("kind", "static");
  if (kind == "static") return Keypoint::fixed(r.vec3("position"));
  if (kind == "sinusoid") {
    return Keypoint::sinusoid(r.vec3("base"), r.vec3("amplitude"), r.number("frequency"),
                              r.number_or("phase", 0.0));
  }
  throw ValidationError(r.field("kind"), "unknown keypoint kind '" + kind + "'");
}

Weights weights_from_reader(const Reader& r) {
  Weights w;
  w.id = r.string_or("id", w.id);
  w.objective = r.number_or("objective", w.objective);
  w.trust_region = r.number_or("trust_region", w.trust_region);
  w.virtual_control = r.number_or("virtual_control", w.virtual_control);
  w.virtual_buffer = r.number_or("virtual_buffer", w.virtual_buffer);
  w.licq = r.number_or("licq", w.licq);
  return w;
}

}  // namespace

json weights_to_json(const Weights& w) {
  return {{"id", w.id},
          {"objective", w.objective},
          {"trust_region", w.trust_region},
          {"virtual_control", w.virtual_control},
          {"virtual_buffer", w.virtual_buffer},
          {"licq", w.licq}};
}

Weights weights_from_json(const json& j) {
  Weights w = weights_from_reader(Reader(j, "weights", nullptr));
  w.validate();
  return w;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = Scenario::kSchemaVersion;
  j["name"] = sc.name;
  j["vehicle"] = {
      {"mass", sc.vehicle.mass()},
      {"inertia",
       json::array({vec_to_json(Vec3(sc.vehicle.inertia().row(0).transpose())),
                    vec_to_json(Vec3(sc.vehicle.inertia().row(1).transpose())),
                    vec_to_json(Vec3(sc.vehicle.inertia().row(2).transpose()))})},
      {"gravity", vec_to_json(sc.vehicle.gravity())}};
  j["bounds"] = {{"state_min", vec_to_json(sc.bounds.state_min, true)},
                 {"state_max", vec_to_json(sc.bounds.state_max, true)},
                 {"control_min", vec_to_json(sc.bounds.control_min)},
                 {"control_max", vec_to_json(sc.bounds.control_max)},
                 {"dilation_min", sc.bounds.dilation_min},
                 {"dilation_max", sc.bounds.dilation_max},
                 {"violation_scale", sc.bounds.violation_scale}};
  j["cone"] = {{"alpha", sc.cone.alpha},
               {"beta", sc.cone.beta},
               {"norm", sc.cone.norm == ConeNorm::kTwo ? "2" : "inf"},
               {"mount", vec_to_json(sc.cone.mount.coeffs())}};
  json kps = json::array();
  for (const Keypoint& kp : sc.keypoints) kps.push_back(keypoint_to_json(kp));
  j["keypoints"] = kps;
  j["objective"] = to_string(sc.objective);
  j["initial_state"] = vec_to_json(sc.initial_state);
  j["final_state"] = sc.final_state ? vec_to_json(*sc.final_state) : json(nullptr);
  json mask = json::array();
  for (bool b : sc.final_mask) mask.push_back(b);
  j["final_mask"] = mask;
  j["final_time"] = sc.final_time ? json(*sc.final_time) : json(nullptr);
  j["time_guess"] = sc.time_guess;
  json gates = json::array();
  for (const Gate& g : sc.gates) {
    json gj = {{"center", vec_to_json(g.center)},   {"normal", vec_to_json(g.normal)},
               {"axis1", vec_to_json(g.axis1)},     {"axis2", vec_to_json(g.axis2)},
               {"half_width", g.half_width}};
    gj["node"] = g.auto_node ? json(nullptr) : json(g.node);
    gates.push_back(gj);
  }
  j["gates"] = gates;
  j["range"] = sc.range ? json{{"min", sc.range->min}, {"max", sc.range->max}} : json(nullptr);
  j["grid"] = {{"nodes", sc.nodes}};
  j["weights"] = weights_to_json(sc.weights);
  j["tolerances"] = {{"trust_region", sc.tolerances.trust_region},
                     {"virtual_control", sc.tolerances.virtual_control},
                     {"virtual_buffer", sc.tolerances.virtual_buffer},
                     {"max_iterations", sc.tolerances.max_iterations}};
  j["discretization"] = {{"substeps", sc.substeps}, {"dense_samples", sc.dense_samples}};
  return j;
}

Scenario scenario_from_json(const json& j, std::vector<std::string>* defaulted) {
  if (!j.is_object()) throw ValidationError("<root>", "scenario must be a JSON object");
  const Reader root(j, "", defaulted);
  if (!root.has("schema_version")) {
    throw ValidationError("schema_version", "required field missing");
  }
  const json& ver = root.at("schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != Scenario::kSchemaVersion) {
    throw ValidationError("schema_version",
                          "unsupported version (expected " +
                              std::to_string(Scenario::kSchemaVersion) + ")");
  }

  Scenario sc;
  sc.name = root.string_or("name", sc.name);

  if (root.has("vehicle")) {
    const Reader v = root.sub("vehicle");
    const double mass = v.number_or("mass", sc.vehicle.mass());
    Mat3 inertia = sc.vehicle.inertia();
    if (v.has("inertia")) {
      const json& ij = v.at("inertia");
      if (!ij.is_array() || ij.size() != 3) {
        throw ValidationError(v.field("inertia"), "expected a 3x3 array");
      }
      for (int r = 0; r < 3; ++r) {
        const json holder = json::object({{"row", ij[r]}});
        const Reader row(holder, v.field("inertia"), nullptr);
        inertia.row(r) = row.vec3("row").transpose();
      }
    } else {
      v.note("inertia");
    }
    const Vec3 gravity = v.has("gravity") ? v.vec3("gravity") : sc.vehicle.gravity();
    if (!v.has("gravity")) v.note("gravity");
    sc.vehicle = VehicleParams(mass, inertia, gravity);
  } else {
    root.note("vehicle");
  }

  if (root.has("bounds")) {
    const Reader b = root.sub("bounds");
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (b.has("state_min")) sc.bounds.state_min = b.vector("state_min", kStateDim, -inf);
    else b.note("state_min");
    if (b.has("state_max")) sc.bounds.state_max = b.vector("state_max", kStateDim, inf);
    else b.note("state_max");
    if (b.has("control_min")) sc.bounds.control_min = b.vector("control_min", kControlDim);
    else b.note("control_min");
    if (b.has("control_max")) sc.bounds.control_max = b.vector("control_max", kControlDim);
    else b.note("control_max");
    sc.bounds.dilation_min = b.number_or("dilation_min", sc.bounds.dilation_min);
    sc.bounds.dilation_max = b.number_or("dilation_max", sc.bounds.dilation_max);
    sc.bounds.violation_scale = b.number_or("violation_scale", sc.bounds.violation_scale);
  } else {
    root.note("bounds");
  }

  if (root.has("cone")) {
    const Reader c = root.sub("cone");
    sc.cone.alpha = c.number("alpha");
    sc.cone.beta = c.number("beta");
    const std::string norm = c.string_or("norm", "2");
    if (norm == "2") {
      sc.cone.norm = ConeNorm::kTwo;
    } else if (norm == "inf") {
      sc.cone.norm = ConeNorm::kInfinity;
    } else {
      throw ValidationError(c.field("norm"), "must be \"2\" or \"inf\"");
    }
    if (c.has("mount")) sc.cone.mount = UnitQuaternion(Vec4(c.vector("mount", 4)));
    else c.note("mount");
  } else {
    throw ValidationError("cone", "required field missing");
  }

  const json& kps = root.at("keypoints");
  if (!kps.is_array()) throw ValidationError("keypoints", "expected an array");
  for (std::size_t i = 0; i < kps.size(); ++i) {
    sc.keypoints.push_back(
        keypoint_from_json(Reader(kps[i], "keypoints[" + std::to_string(i) + "]", defaulted)));
  }

  const std::string obj = root.string_or("objective", "min_time");
  if (obj == "min_time") {
    sc.objective = ObjectiveKind::kMinTime;
  } else if (obj == "min_fuel") {
    sc.objective = ObjectiveKind::kMinFuel;
  } else {
    throw ValidationError("objective", "must be \"min_time\" or \"min_fuel\"");
  }

  sc.initial_state = root.vector("initial_state", kStateDim);
  if (root.has("final_state")) {
    sc.final_state = StateVector(root.vector("final_state", kStateDim));
    if (root.has("final_mask")) {
      const json& m = root.at("final_mask");
      if (!m.is_array() || m.size() != kStateDim) {
        throw ValidationError("final_mask", "expected an array of 13 booleans");
      }
      for (int i = 0; i < kStateDim; ++i) {
        if (!m[i].is_boolean()) throw ValidationError("final_mask", "expected booleans");
        sc.final_mask[i] = m[i].get<bool>();
      }
    } else {
      root.note("final_mask");
      sc.final_mask.fill(true);
    }
  } else if (root.has("final_mask")) {
    const json& m = root.at("final_mask");
    for (const json& e : m) {
      if (e.is_boolean() && e.get<bool>()) {
        throw ValidationError("final_state", "final_mask pins components but no final state given");
      }
    }
  }
  if (root.has("final_time")) sc.final_time = root.number("final_time");
  sc.time_guess = root.number_or("time_guess", sc.final_time.value_or(sc.time_guess));

  if (root.has("gates")) {
    const json& gs = root.at("gates");
    if (!gs.is_array()) throw ValidationError("gates", "expected an array");
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const Reader g(gs[i], "gates[" + std::to_string(i) + "]", defaulted);
      Gate gate;
      gate.center = g.vec3("center");
      gate.normal = g.vec3("normal");
      gate.axis1 = g.vec3("axis1");
      gate.axis2 = g.vec3("axis2");
      gate.half_width = g.number("half_width");
      if (g.has("node")) {
        gate.auto_node = false;
        gate.node = g.integer_or("node", -1);
      }
      sc.gates.push_back(gate);
    }
  }

  if (root.has("range")) {
    const Reader r = root.sub("range");
    sc.range = RangeBounds{r.number("min"), r.number("max")};
  }

  int nodes = sc.nodes;
  if (root.has("grid")) nodes = root.sub("grid").integer_or("nodes", nodes);
  else root.note("grid");

  if (root.has("weights")) sc.weights = weights_from_reader(root.sub("weights"));
  else root.note("weights");

  if (root.has("tolerances")) {
    const Reader t = root.sub("tolerances");
    sc.tolerances.trust_region = t.number_or("trust_region", sc.tolerances.trust_region);
    sc.tolerances.virtual_control = t.number_or("virtual_control", sc.tolerances.virtual_control);
    sc.tolerances.virtual_buffer = t.number_or("virtual_buffer", sc.tolerances.virtual_buffer);
    sc.tolerances.max_iterations = t.integer_or("max_iterations", sc.tolerances.max_iterations);
  } else {
    root.note("tolerances");
  }

  if (root.has("discretization")) {
    const Reader d = root.sub("discretization");
    sc.substeps = d.integer_or("substeps", sc.substeps);
    sc.dense_samples = d.integer_or("dense_samples", sc.dense_samples);
  } else {
    root.note("discretization");
  }

  sc.set_nodes(nodes);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::vector<std::string>* defaulted) {
  std::ifstream in(path);
  if (!in) throw IoError("scenario file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j, defaulted);
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path.string());
  out << scenario_to_json(sc).dump(2) << '\n';
}

}  // namespace losg
