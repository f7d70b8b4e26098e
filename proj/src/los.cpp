#include "losg/los.hpp"

#include <cmath>
#include <numbers>

#include "losg/errors.hpp"

namespace losg {

using namespace layout;

Mat3 ViewCone::shape() const {
  Mat3 a = Mat3::Zero();
  a(0, 0) = 1.0 / std::tan(alpha);
  a(1, 1) = 1.0 / std::tan(beta);
  return a;
}

void ViewCone::validate() const {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  if (!(alpha > 0.0 && alpha < half_pi)) {
    throw ValidationError("cone.alpha", "must lie in (0, pi/2)");
  }
  if (!(beta > 0.0 && beta < half_pi)) {
    throw ValidationError("cone.beta", "must lie in (0, pi/2)");
  }
  if (std::abs(mount.norm() - 1.0) > 1e-6) {
    throw ValidationError("cone.mount", "mount quaternion must be unit");
  }
}

Keypoint Keypoint::fixed(const Vec3& p) {
  Keypoint kp;
  kp.base = p;
  return kp;
}

Keypoint Keypoint::sinusoid(const Vec3& base, const Vec3& amplitude, double frequency,
                            double phase) {
  Keypoint kp;
  kp.kind = Kind::kSinusoid;
  kp.base = base;
  kp.amplitude = amplitude;
  kp.frequency = frequency;
  kp.phase = phase;
  return kp;
}

Vec3 keypoint_position(const Keypoint& kp, double t) {
  if (kp.kind == Keypoint::Kind::kStatic) return kp.base;
  return kp.base + kp.amplitude * std::sin(kp.frequency * t + kp.phase);
}

Vec3 keypoint_in_sensor_frame(const Vec3& p_inertial, const Vec3& r_inertial,
                              const UnitQuaternion& body_to_inertial,
                              const UnitQuaternion& sensor_to_body) {
  const Mat3 c_bi = quat_to_dcm(body_to_inertial);
  const Mat3 c_sb = quat_to_dcm(sensor_to_body);
  return c_sb.transpose() * (c_bi.transpose() * (p_inertial - r_inertial));
}

double los_residual(const Vec3& p, const ViewCone& cone) {
  const Vec3 a = cone.shape() * p;
  const double n = cone.norm == ConeNorm::kTwo ? a.norm() : a.cwiseAbs().maxCoeff();
  return n - ViewCone::boresight().dot(p);
}

Vec3 los_residual_gradient(const Vec3& p, const ViewCone& cone) {
  const Mat3 shape = cone.shape();
  const Vec3 a = shape * p;
  Vec3 dn = Vec3::Zero();
  if (cone.norm == ConeNorm::kTwo) {
    const double n = a.norm();
    if (n > 0.0) dn = a / n;
  } else {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(a[i]) > std::abs(a[best])) best = i;
    }
    if (a[best] != 0.0) dn[best] = a[best] > 0.0 ? 1.0 : -1.0;
  }
  return shape.transpose() * dn - ViewCone::boresight();
}

LosEvaluation los_residual_full(const StateVector& x, double t, const Keypoint& kp,
                                const ViewCone& cone) {
  const Vec3 r = x.segment<3>(kPosition);
  const Vec4 q = x.segment<4>(kQuaternion);
  const Mat3 c_sb_t = dcm_of(cone.mount.coeffs()).transpose();

  const Vec3 d = keypoint_position(kp, t) - r;
  const Mat3 c_bi_t = rotation_of(q).transpose();
  const Vec3 p_s = c_sb_t * (c_bi_t * d);

  LosEvaluation out;
  out.value = los_residual(p_s, cone);
  const Vec3 dg_dps = los_residual_gradient(p_s, cone);
  const Eigen::RowVector3d dg_dpb = dg_dps.transpose() * c_sb_t;
  out.gradient.segment<3>(kPosition) = -(dg_dpb * c_bi_t).transpose();
  out.gradient.segment<4>(kQuaternion) = (dg_dpb * rotation_transpose_jacobian(q, d)).transpose();
  return out;
}

}  // namespace losg
