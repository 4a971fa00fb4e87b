#pragma once

// The three-stage generative model: joint positions -> end-effector pose
// (Denavit-Hartenberg chain) -> world-frame feature coordinates -> pixel
// coordinates (pinhole cameras). Every operation is templated on the scalar
// type so the identical code path runs on doubles and on Dual numbers; the
// full composition is differentiable with respect to all parameters and the
// joints.

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "vservo/errors.hpp"
#include "vservo/geometry.hpp"

namespace vservo {

/// Classic DH link: joint angle offset, link offset, link length, link twist.
template <class S>
struct DHLinkT {
  S omega{0.0}, d{0.0}, a{0.0}, alpha{0.0};
};
using DHLink = DHLinkT<double>;

template <class S>
struct KinematicParamsT {
  PoseParamsOf<S> base;
  std::vector<DHLinkT<S>> links;
};
using KinematicParams = KinematicParamsT<double>;

template <class S>
using FeatureMatrix = Eigen::Matrix<S, Eigen::Dynamic, 3>;

/// Feature coordinates in the end-effector frame, one row per feature.
template <class S>
struct FeatureStructureT {
  FeatureMatrix<S> coords;
};
using FeatureStructure = FeatureStructureT<double>;

template <class S>
struct IntrinsicsT {
  S fx{0.0}, fy{0.0}, cx{0.0}, cy{0.0};
};
using Intrinsics = IntrinsicsT<double>;

/// Pinhole camera; extrinsics map world coordinates into the camera frame.
template <class S>
struct CameraParamsT {
  IntrinsicsT<S> intrinsics;
  PoseParamsOf<S> extrinsics;  // camera-from-world
};
using CameraParams = CameraParamsT<double>;

template <class S>
struct ModelParamsT {
  KinematicParamsT<S> kinematics;
  FeatureStructureT<S> features;
  std::vector<CameraParamsT<S>> cameras;

  int joint_count() const { return static_cast<int>(kinematics.links.size()); }
  int feature_count() const { return static_cast<int>(features.coords.rows()); }
  int camera_count() const { return static_cast<int>(cameras.size()); }
};
using ModelParams = ModelParamsT<double>;

/// Points at or behind this camera-frame depth are masked, not projected.
inline constexpr double kDepthEpsilon = 1e-6;

template <class S>
struct ProjectedT {
  Eigen::Matrix<S, 2, 1> uv{S(0.0), S(0.0)};
  bool in_front = false;
};
using Projected = ProjectedT<double>;

/// Per camera, per feature pixel prediction.
template <class S>
using PixelPredictionT = std::vector<std::vector<ProjectedT<S>>>;
using PixelPrediction = PixelPredictionT<double>;

template <class S>
PoseOf<S> dh_link_transform(const DHLinkT<S>& link, const S& joint_angle) {
  using std::cos;
  using std::sin;
  // Rz(joint + omega) * Tz(d) * Tx(a) * Rx(alpha), multiplied out.
  const S th = joint_angle + link.omega;
  const S ct = cos(th);
  const S st = sin(th);
  const S ca = cos(link.alpha);
  const S sa = sin(link.alpha);
  PoseOf<S> out;
  out.rotation << ct, -st * ca, st * sa,
                  st, ct * ca, -ct * sa,
                  S(0.0), sa, ca;
  out.translation << link.a * ct, link.a * st, link.d;
  return out;
}

template <class S>
PoseOf<S> forward_kinematics(const KinematicParamsT<S>& kin,
                             const Eigen::Matrix<S, Eigen::Dynamic, 1>& joints) {
  if (joints.size() != static_cast<Eigen::Index>(kin.links.size())) {
    throw DimensionMismatch("forward_kinematics: joint vector length must match link count");
  }
  PoseOf<S> pose = pose_from_params(kin.base);
  for (size_t i = 0; i < kin.links.size(); ++i) {
    pose = compose(pose, dh_link_transform(kin.links[i], joints(static_cast<Eigen::Index>(i))));
  }
  return pose;
}

Pose forward_kinematics(const KinematicParams& kin, const VecX& joints);

template <class S>
FeatureMatrix<S> feature_world_coords(const FeatureStructureT<S>& f, const PoseOf<S>& pose) {
  FeatureMatrix<S> out(f.coords.rows(), 3);
  for (Eigen::Index k = 0; k < f.coords.rows(); ++k) {
    const Vec3T<S> p = pose.apply(Vec3T<S>(f.coords.row(k).transpose()));
    out.row(k) = p.transpose();
  }
  return out;
}

template <class S>
ProjectedT<S> project_point(const IntrinsicsT<S>& intr, const PoseOf<S>& cam_from_world,
                            const Vec3T<S>& world_point) {
  const Vec3T<S> pc = cam_from_world.apply(world_point);
  ProjectedT<S> out;
  out.in_front = value_of(pc.z()) > kDepthEpsilon;
  if (out.in_front) {
    const S inv_z = S(1.0) / pc.z();
    out.uv(0) = intr.fx * pc.x() * inv_z + intr.cx;
    out.uv(1) = intr.fy * pc.y() * inv_z + intr.cy;
  }
  return out;
}

template <class S>
std::vector<ProjectedT<S>> project(const CameraParamsT<S>& cam, const FeatureMatrix<S>& world_points) {
  const PoseOf<S> pose = pose_from_params(cam.extrinsics);
  std::vector<ProjectedT<S>> out(static_cast<size_t>(world_points.rows()));
  for (Eigen::Index k = 0; k < world_points.rows(); ++k) {
    out[static_cast<size_t>(k)] = project_point(cam.intrinsics, pose, Vec3T<S>(world_points.row(k).transpose()));
  }
  return out;
}

/// Model with per-evaluation constants (base pose, camera poses) expanded
/// once; the per-sample hot path only composes link transforms and projects.
template <class S>
struct PreparedModel {
  PoseOf<S> base;
  std::vector<DHLinkT<S>> links;
  FeatureMatrix<S> features;
  struct PreparedCamera {
    IntrinsicsT<S> intrinsics;
    PoseOf<S> pose;  // camera-from-world
  };
  std::vector<PreparedCamera> cameras;
};

template <class S>
PreparedModel<S> prepare(const ModelParamsT<S>& params) {
  PreparedModel<S> p;
  p.base = pose_from_params(params.kinematics.base);
  p.links = params.kinematics.links;
  p.features = params.features.coords;
  p.cameras.reserve(params.cameras.size());
  for (const auto& cam : params.cameras) {
    p.cameras.push_back({cam.intrinsics, pose_from_params(cam.extrinsics)});
  }
  return p;
}

template <class S>
PoseOf<S> prepared_forward_kinematics(const PreparedModel<S>& p,
                                      const Eigen::Matrix<S, Eigen::Dynamic, 1>& joints) {
  if (joints.size() != static_cast<Eigen::Index>(p.links.size())) {
    throw DimensionMismatch("forward_kinematics: joint vector length must match link count");
  }
  PoseOf<S> pose = p.base;
  for (size_t i = 0; i < p.links.size(); ++i) {
    pose = compose(pose, dh_link_transform(p.links[i], joints(static_cast<Eigen::Index>(i))));
  }
  return pose;
}

template <class S>
PixelPredictionT<S> predict_prepared_from_pose(const PreparedModel<S>& p, const PoseOf<S>& ee_pose) {
  PixelPredictionT<S> out(p.cameras.size());
  for (size_t i = 0; i < p.cameras.size(); ++i) {
    auto& per_cam = out[i];
    per_cam.resize(static_cast<size_t>(p.features.rows()));
    for (Eigen::Index k = 0; k < p.features.rows(); ++k) {
      const Vec3T<S> world = ee_pose.apply(Vec3T<S>(p.features.row(k).transpose()));
      per_cam[static_cast<size_t>(k)] = project_point(p.cameras[i].intrinsics, p.cameras[i].pose, world);
    }
  }
  return out;
}

template <class S>
PixelPredictionT<S> predict_prepared(const PreparedModel<S>& p,
                                     const Eigen::Matrix<S, Eigen::Dynamic, 1>& joints) {
  return predict_prepared_from_pose(p, prepared_forward_kinematics(p, joints));
}

/// Full architecture: camera projection of the feature structure placed by
/// forward kinematics.
PixelPrediction predict_image(const ModelParams& params, const VecX& joints);

/// Truncated model starting at a given end-effector pose.
PixelPrediction predict_image_from_pose(const FeatureStructure& features,
                                        const std::vector<CameraParams>& cameras, const Pose& ee_pose);

/// 6 base + 4 per link + 3 per feature + 10 per camera.
int parameter_count(int n, int m, int c);

// Packed parameter vector layout: base translation, base rotation, links
// (omega, d, a, alpha each), features row-major, cameras in index order with
// intrinsics (fx, fy, cx, cy) before extrinsics (translation, rotation).
VecX pack(const ModelParams& params);
ModelParams unpack(const VecX& x, int n, int m, int c);

template <class S>
ModelParamsT<S> unpack_parameters(std::span<const S> x, int n, int m, int c) {
  if (static_cast<int>(x.size()) != parameter_count(n, m, c)) {
    throw DimensionMismatch("unpack: packed vector length does not match (n, m, c)");
  }
  ModelParamsT<S> p;
  size_t i = 0;
  for (int k = 0; k < 3; ++k) p.kinematics.base.translation(k) = x[i++];
  for (int k = 0; k < 3; ++k) p.kinematics.base.rotation(k) = x[i++];
  p.kinematics.links.resize(static_cast<size_t>(n));
  for (auto& link : p.kinematics.links) {
    link.omega = x[i++];
    link.d = x[i++];
    link.a = x[i++];
    link.alpha = x[i++];
  }
  p.features.coords.resize(m, 3);
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < 3; ++k) p.features.coords(r, k) = x[i++];
  }
  p.cameras.resize(static_cast<size_t>(c));
  for (auto& cam : p.cameras) {
    cam.intrinsics.fx = x[i++];
    cam.intrinsics.fy = x[i++];
    cam.intrinsics.cx = x[i++];
    cam.intrinsics.cy = x[i++];
    for (int k = 0; k < 3; ++k) cam.extrinsics.translation(k) = x[i++];
    for (int k = 0; k < 3; ++k) cam.extrinsics.rotation(k) = x[i++];
  }
  return p;
}

// Model file round trip (JSON text, bit-exact doubles).
std::string model_to_json_string(const ModelParams& params, bool ground_truth = false);
ModelParams model_from_json_string(const std::string& text);
void save_model(const std::string& path, const ModelParams& params, bool ground_truth = false);
ModelParams load_model(const std::string& path);

}  // namespace vservo
