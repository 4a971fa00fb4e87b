#pragma once

// Rigid-body math shared by every other module: SE(3) composition, the
// axis-angle chart used by the optimizer, pose distance, and closed-form
// rigid point-set alignment (Arun's method).
//
// Everything here is a pure function on value types. The templated pieces
// accept any scalar with the usual arithmetic plus sin/cos/sqrt, so the
// same code runs on plain doubles and on forward-mode Dual numbers.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>

#include "vservo/errors.hpp"

namespace vservo {

template <class S> using Mat3T = Eigen::Matrix<S, 3, 3>;
template <class S> using Vec3T = Eigen::Matrix<S, 3, 1>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;

// Scalar value extraction; Dual overloads this in dual.hpp.
inline double value_of(double x) { return x; }

/// Rigid SE(3) transform. rotation must stay orthonormal with det +1;
/// use orthonormalized() after long composition chains.
template <class S>
struct PoseOf {
  Mat3T<S> rotation = Mat3T<S>::Identity();
  Vec3T<S> translation = Vec3T<S>::Zero();

  Vec3T<S> apply(const Vec3T<S>& p) const { return rotation * p + translation; }
};

using Pose = PoseOf<double>;

/// a then b applied right-to-left: (a*b)(x) = a(b(x)).
template <class S>
PoseOf<S> compose(const PoseOf<S>& a, const PoseOf<S>& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

template <class S>
PoseOf<S> inverse(const PoseOf<S>& p) {
  Mat3T<S> rt = p.rotation.transpose();
  return {rt, Vec3T<S>(-(rt * p.translation))};
}

inline Eigen::Matrix4d homogeneous(const Pose& p) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = p.rotation;
  h.topRightCorner<3, 1>() = p.translation;
  return h;
}

/// Optimization chart for a pose: translation plus axis-angle rotation
/// (radians * unit axis). Re-center via params_from_pose between optimizer
/// restarts to stay on the principal branch.
template <class S>
struct PoseParamsOf {
  Vec3T<S> translation = Vec3T<S>::Zero();
  Vec3T<S> rotation = Vec3T<S>::Zero();
};

using PoseParams = PoseParamsOf<double>;

template <class S>
Mat3T<S> skew(const Vec3T<S>& w) {
  Mat3T<S> m;
  m << S(0.0), -w.z(), w.y(),
       w.z(), S(0.0), -w.x(),
      -w.y(), w.x(), S(0.0);
  return m;
}

/// Rodrigues exponential map. Series branch below theta^2 = 1e-12 keeps the
/// expression (and its derivatives) smooth through zero rotation.
template <class S>
Mat3T<S> rotation_from_axis_angle(const Vec3T<S>& w) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S theta_sq = w.x() * w.x() + w.y() * w.y() + w.z() * w.z();
  S k1, k2;  // sin(t)/t and (1 - cos(t))/t^2
  if (value_of(theta_sq) < 1e-12) {
    k1 = S(1.0) - theta_sq / S(6.0) + theta_sq * theta_sq / S(120.0);
    k2 = S(0.5) - theta_sq / S(24.0) + theta_sq * theta_sq / S(720.0);
  } else {
    const S theta = sqrt(theta_sq);
    k1 = sin(theta) / theta;
    k2 = (S(1.0) - cos(theta)) / theta_sq;
  }
  const Mat3T<S> wx = skew(w);
  return Mat3T<S>(Mat3T<S>::Identity() + k1 * wx + k2 * (wx * wx));
}

template <class S>
PoseOf<S> pose_from_params(const PoseParamsOf<S>& q) {
  return {rotation_from_axis_angle<S>(q.rotation), q.translation};
}

/// Log map back to the chart; angle lands in [0, pi].
PoseParams params_from_pose(const Pose& p);

/// Frobenius norm of the difference of the 4x4 homogeneous matrices.
double pose_distance(const Pose& a, const Pose& g);

/// Squared pose distance against a fixed target, usable with Dual scalars.
template <class S>
S pose_distance_squared(const PoseOf<S>& a, const Pose& g) {
  S acc(0.0);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const S d = a.rotation(r, c) - S(g.rotation(r, c));
      acc += d * d;
    }
    const S d = a.translation(r) - S(g.translation(r));
    acc += d * d;
  }
  return acc;
}

/// Nearest rotation (polar projection); fixes drift after long chains.
Pose orthonormalized(const Pose& p);

bool is_valid_pose(const Pose& p, double tol = 1e-9);

/// Least-squares rigid transform T minimizing sum ||T p_i - q_i||^2.
/// Throws DegenerateConfiguration for <3 points or collinear p.
Pose arun_align(std::span<const Vec3> p, std::span<const Vec3> q);

/// Least-squares similarity s,T with q_i ~ s * T(p_i); same degeneracy rules.
/// Returned pose holds the rigid part; scale comes back separately.
struct SimilarityTransform {
  double scale = 1.0;
  Pose rigid;
  Vec3 apply(const Vec3& p) const { return scale * (rigid.rotation * p) + rigid.translation; }
};
SimilarityTransform umeyama_align(std::span<const Vec3> p, std::span<const Vec3> q);

Mat3 random_rotation(std::mt19937_64& rng);
Pose random_pose(std::mt19937_64& rng, double translation_scale = 1.0);

}  // namespace vservo
