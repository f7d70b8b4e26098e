#pragma once

#include <Eigen/Dense>

#include "losg/attitude.hpp"
#include "losg/dynamics.hpp"

namespace losg {

enum class ConeNorm { kTwo, kInfinity };

/// Sensor view cone ‖A p_S‖_ρ ≤ cᵀ p_S with boresight c = +z_S and
/// A = diag(1/tan α, 1/tan β, 0).
struct ViewCone {
  double alpha = 0.7853981633974483;  // half-angle in the x_S–z_S plane, rad
  double beta = 0.7853981633974483;   // half-angle in the y_S–z_S plane, rad
  ConeNorm norm = ConeNorm::kTwo;
  UnitQuaternion mount;  // q_S→B: maps sensor-frame vectors into the body frame

  Mat3 shape() const;
  static Vec3 boresight() { return Vec3(0.0, 0.0, 1.0); }

  /// Throws ValidationError unless 0 < α, β < π/2 and the mount is unit.
  void validate() const;
};

/// Point of interest with a known inertial trajectory.
struct Keypoint {
  enum class Kind { kStatic, kSinusoid };

  Kind kind = Kind::kStatic;
  Vec3 base = Vec3::Zero();       // m
  Vec3 amplitude = Vec3::Zero();  // m, sinusoid only
  double frequency = 0.0;         // rad/s, sinusoid only
  double phase = 0.0;             // rad, sinusoid only

  static Keypoint fixed(const Vec3& p);
  static Keypoint sinusoid(const Vec3& base, const Vec3& amplitude, double frequency,
                           double phase);
};

Vec3 keypoint_position(const Keypoint& kp, double t);

/// p_S = C(q_S→B)ᵀ C(q_B→I)ᵀ (p_I − r_I): the inertial offset resolved in the
/// sensor frame. Both quaternions must be unit within 1e-6.
Vec3 keypoint_in_sensor_frame(const Vec3& p_inertial, const Vec3& r_inertial,
                              const UnitQuaternion& body_to_inertial,
                              const UnitQuaternion& sensor_to_body);

/// g = ‖A p_S‖_ρ − cᵀ p_S; g ≤ 0 exactly when p_S lies in the cone.
double los_residual(const Vec3& p_sensor, const ViewCone& cone);

/// ∂g/∂p_S. At ℓ∞ ties the first maximizing coordinate is used; at the apex
/// of the ℓ2 norm the norm contributes nothing.
Vec3 los_residual_gradient(const Vec3& p_sensor, const ViewCone& cone);

struct LosEvaluation {
  double value = 0.0;
  StateVector gradient = StateVector::Zero();  // ∂g/∂x
};

/// g_LoS for the vehicle state x at time t. The state quaternion enters
/// through rotation_of(), so g depends only on its direction.
LosEvaluation los_residual_full(const StateVector& x, double t, const Keypoint& kp,
                                const ViewCone& cone);

}  // namespace losg
