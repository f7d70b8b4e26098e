#include "losg/attitude.hpp"

#include <cmath>
#include <string>

#include "losg/errors.hpp"

namespace losg {

namespace {
constexpr double kUnitTolerance = 1e-6;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return UnitQuaternion();
  const Vec3 a = axis / n;
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return UnitQuaternion(std::cos(h), s * a.x(), s * a.y(), s * a.z());
}

void UnitQuaternion::normalize() {
  const double n = q_.norm();
  if (n == 0.0) throw InvalidInput("cannot normalize a zero quaternion");
  q_ /= n;
}

UnitQuaternion UnitQuaternion::normalized() const {
  UnitQuaternion out(*this);
  out.normalize();
  return out;
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double w = a.w() * b.w() - a.vec().dot(b.vec());
  const Vec3 v = a.w() * b.vec() + b.w() * a.vec() + a.vec().cross(b.vec());
  return UnitQuaternion(w, v.x(), v.y(), v.z());
}

Mat3 dcm_of(const Vec4& q) {
  const double w = q[0];
  const Vec3 v = q.tail<3>();
  return (w * w - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() +
         2.0 * w * skew(v);
}

RotationMatrix quat_to_dcm(const UnitQuaternion& q) {
  if (std::abs(q.norm() - 1.0) > kUnitTolerance) {
    throw InvalidInput("quat_to_dcm: quaternion norm " + std::to_string(q.norm()) +
                       " is not unit");
  }
  return dcm_of(q.coeffs());
}

Mat3 skew(const Vec3& xi) {
  Mat3 s;
  s << 0.0, -xi.z(), xi.y(),
       xi.z(), 0.0, -xi.x(),
       -xi.y(), xi.x(), 0.0;
  return s;
}

Mat4 omega_matrix(const Vec3& w) {
  Mat4 o;
  o << 0.0, -w.x(), -w.y(), -w.z(),
       w.x(), 0.0, w.z(), -w.y(),
       w.y(), -w.z(), 0.0, w.x(),
       w.z(), w.y(), -w.x(), 0.0;
  return o;
}

Eigen::Matrix<double, 4, 3> omega_rate_matrix(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix<double, 4, 3> m;
  m << -x, -y, -z,
        w, -z,  y,
        z,  w, -x,
       -y,  x,  w;
  return m;
}

Eigen::Matrix<double, 3, 4> rotate_jacobian(const Vec4& q, const Vec3& f) {
  // C(q) f = (w² − v·v) f + 2 (v·f) v + 2 w (v × f)
  const double w = q[0];
  const Vec3 v = q.tail<3>();
  Eigen::Matrix<double, 3, 4> j;
  j.col(0) = 2.0 * w * f + 2.0 * v.cross(f);
  j.rightCols<3>() = -2.0 * f * v.transpose() + 2.0 * v.dot(f) * Mat3::Identity() +
                     2.0 * v * f.transpose() - 2.0 * w * skew(f);
  return j;
}

Eigen::Matrix<double, 3, 4> rotate_transpose_jacobian(const Vec4& q, const Vec3& d) {
  // C(q)ᵀ d = (w² − v·v) d + 2 (v·d) v − 2 w (v × d)
  const double w = q[0];
  const Vec3 v = q.tail<3>();
  Eigen::Matrix<double, 3, 4> j;
  j.col(0) = 2.0 * w * d - 2.0 * v.cross(d);
  j.rightCols<3>() = -2.0 * d * v.transpose() + 2.0 * v.dot(d) * Mat3::Identity() +
                     2.0 * v * d.transpose() + 2.0 * w * skew(d);
  return j;
}

Mat3 rotation_of(const Vec4& q) { return dcm_of(q) / q.squaredNorm(); }

Eigen::Matrix<double, 3, 4> rotation_jacobian(const Vec4& q, const Vec3& v) {
  const double n2 = q.squaredNorm();
  return rotate_jacobian(q, v) / n2 - (dcm_of(q) * v) * (2.0 / (n2 * n2)) * q.transpose();
}

Eigen::Matrix<double, 3, 4> rotation_transpose_jacobian(const Vec4& q, const Vec3& v) {
  const double n2 = q.squaredNorm();
  return rotate_transpose_jacobian(q, v) / n2 -
         (dcm_of(q).transpose() * v) * (2.0 / (n2 * n2)) * q.transpose();
}

}  // namespace losg
