#include "vservo/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

namespace vservo {

PoseParams params_from_pose(const Pose& p) {
  Eigen::AngleAxisd aa(p.rotation);
  return {p.translation, aa.angle() * aa.axis()};
}

double pose_distance(const Pose& a, const Pose& g) {
  const double rot = (a.rotation - g.rotation).squaredNorm();
  const double trans = (a.translation - g.translation).squaredNorm();
  return std::sqrt(rot + trans);
}

Pose orthonormalized(const Pose& p) {
  Eigen::JacobiSVD<Mat3> svd(p.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return {r, p.translation};
}

bool is_valid_pose(const Pose& p, double tol) {
  const Mat3 gram = p.rotation.transpose() * p.rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(p.rotation.determinant() - 1.0) > tol) return false;
  return p.translation.allFinite();
}

namespace {

struct Centered {
  Vec3 mean_p, mean_q;
  Eigen::Matrix3Xd p, q;  // columns are centered points
};

Centered center_points(std::span<const Vec3> p, std::span<const Vec3> q) {
  if (p.size() != q.size()) {
    throw DegenerateConfiguration("arun_align: point lists differ in length");
  }
  if (p.size() < 3) {
    throw DegenerateConfiguration("arun_align: need at least 3 points");
  }
  const auto n = static_cast<Eigen::Index>(p.size());
  Centered c;
  c.p.resize(3, n);
  c.q.resize(3, n);
  c.mean_p = Vec3::Zero();
  c.mean_q = Vec3::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    c.mean_p += p[static_cast<size_t>(i)];
    c.mean_q += q[static_cast<size_t>(i)];
  }
  c.mean_p /= static_cast<double>(n);
  c.mean_q /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.p.col(i) = p[static_cast<size_t>(i)] - c.mean_p;
    c.q.col(i) = q[static_cast<size_t>(i)] - c.mean_q;
  }
  // Collinear (or coincident) source points leave the rotation unconstrained.
  Eigen::JacobiSVD<Eigen::Matrix3Xd> shape(c.p);
  const double s0 = shape.singularValues()(0);
  if (s0 <= 0.0 || shape.singularValues()(1) < 1e-9 * s0) {
    throw DegenerateConfiguration("arun_align: source points are collinear");
  }
  return c;
}

Mat3 rotation_from_cross_covariance(const Mat3& h) {
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((v * u.transpose()).determinant() < 0.0) {
    u.col(2) *= -1.0;  // reflection correction
  }
  return v * u.transpose();
}

}  // namespace

Pose arun_align(std::span<const Vec3> p, std::span<const Vec3> q) {
  const Centered c = center_points(p, q);
  const Mat3 h = c.p * c.q.transpose();
  const Mat3 r = rotation_from_cross_covariance(h);
  return {r, c.mean_q - r * c.mean_p};
}

SimilarityTransform umeyama_align(std::span<const Vec3> p, std::span<const Vec3> q) {
  const Centered c = center_points(p, q);
  const Mat3 h = c.p * c.q.transpose();
  const Mat3 r = rotation_from_cross_covariance(h);
  const double var_p = c.p.squaredNorm();
  double scale = (r * c.p).cwiseProduct(c.q).sum() / var_p;
  if (!(scale > 0.0)) scale = 1.0;
  SimilarityTransform s;
  s.scale = scale;
  s.rigid.rotation = r;
  s.rigid.translation = c.mean_q - scale * (r * c.mean_p);
  return s;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector4d q;
  do {
    for (int i = 0; i < 4; ++i) q(i) = gauss(rng);
  } while (q.norm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
}

Pose random_pose(std::mt19937_64& rng, double translation_scale) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Pose p;
  p.rotation = random_rotation(rng);
  for (int i = 0; i < 3; ++i) p.translation(i) = translation_scale * uni(rng);
  return p;
}

}  // namespace vservo
