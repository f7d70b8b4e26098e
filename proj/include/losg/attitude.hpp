#pragma once

#include <Eigen/Dense>

namespace losg {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using RotationMatrix = Eigen::Matrix3d;

/// Unit quaternion stored scalar-first as (w, x, y, z).
///
/// Products follow the Hamilton convention, so that for q_B→I the matrix
/// quat_to_dcm(q) maps body-frame vectors into the inertial frame and
/// quat_to_dcm(a * b) == quat_to_dcm(a) * quat_to_dcm(b).
class UnitQuaternion {
 public:
  UnitQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}
  UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) {}
  explicit UnitQuaternion(const Vec4& coeffs) : q_(coeffs) {}

  /// Rotation by `angle` radians about `axis` (need not be unit length).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

  double w() const { return q_[0]; }
  double x() const { return q_[1]; }
  double y() const { return q_[2]; }
  double z() const { return q_[3]; }
  Vec3 vec() const { return q_.tail<3>(); }
  const Vec4& coeffs() const { return q_; }

  double norm() const { return q_.norm(); }
  void normalize();
  UnitQuaternion normalized() const;
  UnitQuaternion conjugate() const { return UnitQuaternion(q_[0], -q_[1], -q_[2], -q_[3]); }

  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

 private:
  Vec4 q_;
};

/// Direction cosine matrix of a unit quaternion. Throws InvalidInput when
/// |q| differs from one by more than 1e-6.
RotationMatrix quat_to_dcm(const UnitQuaternion& q);

/// Quadratic-form DCM (w² − |v|²)I + 2vvᵀ + 2w[v×] with no norm check.
/// Agrees with quat_to_dcm on S³; off the sphere it is the polynomial whose
/// derivatives rotate_jacobian() returns.
Mat3 dcm_of(const Vec4& q);

/// [ξ×]: skew(xi) * a == xi.cross(a).
Mat3 skew(const Vec3& xi);

/// Ω(ω) with q̇ = ½ Ω(ω) q for body angular rate ω (right multiplication q ⊗ [0 ω]).
Mat4 omega_matrix(const Vec3& omega);

/// Ξ(q) such that Ω(ω) q == Ξ(q) ω.
Eigen::Matrix<double, 4, 3> omega_rate_matrix(const Vec4& q);

/// ∂(dcm_of(q) v)/∂q.
Eigen::Matrix<double, 3, 4> rotate_jacobian(const Vec4& q, const Vec3& v);

/// ∂(dcm_of(q)ᵀ v)/∂q.
Eigen::Matrix<double, 3, 4> rotate_transpose_jacobian(const Vec4& q, const Vec3& v);

/// Rotation of the normalized quaternion, dcm_of(q) / ‖q‖². Invariant to
/// the quaternion's norm, so drift off S³ cannot scale rotated vectors.
Mat3 rotation_of(const Vec4& q);
/// ∂(rotation_of(q) v)/∂q.
Eigen::Matrix<double, 3, 4> rotation_jacobian(const Vec4& q, const Vec3& v);
/// ∂(rotation_of(q)ᵀ v)/∂q.
Eigen::Matrix<double, 3, 4> rotation_transpose_jacobian(const Vec4& q, const Vec3& v);

}  // namespace losg
