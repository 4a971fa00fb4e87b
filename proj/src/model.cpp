#include "vservo/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vservo {

Pose forward_kinematics(const KinematicParams& kin, const VecX& joints) {
  return forward_kinematics<double>(kin, joints);
}

PixelPrediction predict_image(const ModelParams& params, const VecX& joints) {
  return predict_prepared(prepare(params), joints);
}

PixelPrediction predict_image_from_pose(const FeatureStructure& features,
                                        const std::vector<CameraParams>& cameras, const Pose& ee_pose) {
  ModelParams stub;
  stub.features = features;
  stub.cameras = cameras;
  return predict_prepared_from_pose(prepare(stub), ee_pose);
}

int parameter_count(int n, int m, int c) {
  if (n < 1 || m < 1 || c < 1) {
    throw DimensionMismatch("parameter_count: n, m, c must all be at least 1");
  }
  return 6 + 4 * n + 3 * m + 10 * c;
}

VecX pack(const ModelParams& p) {
  VecX x(parameter_count(p.joint_count(), p.feature_count(), p.camera_count()));
  Eigen::Index i = 0;
  for (int k = 0; k < 3; ++k) x(i++) = p.kinematics.base.translation(k);
  for (int k = 0; k < 3; ++k) x(i++) = p.kinematics.base.rotation(k);
  for (const auto& link : p.kinematics.links) {
    x(i++) = link.omega;
    x(i++) = link.d;
    x(i++) = link.a;
    x(i++) = link.alpha;
  }
  for (int r = 0; r < p.feature_count(); ++r) {
    for (int k = 0; k < 3; ++k) x(i++) = p.features.coords(r, k);
  }
  for (const auto& cam : p.cameras) {
    x(i++) = cam.intrinsics.fx;
    x(i++) = cam.intrinsics.fy;
    x(i++) = cam.intrinsics.cx;
    x(i++) = cam.intrinsics.cy;
    for (int k = 0; k < 3; ++k) x(i++) = cam.extrinsics.translation(k);
    for (int k = 0; k < 3; ++k) x(i++) = cam.extrinsics.rotation(k);
  }
  return x;
}

ModelParams unpack(const VecX& x, int n, int m, int c) {
  return unpack_parameters<double>(std::span<const double>(x.data(), static_cast<size_t>(x.size())), n, m, c);
}

namespace {

using nlohmann::json;

constexpr const char* kModelVersion = "vservo.model/1";

json pose_params_to_json(const PoseParams& q) {
  return json{{"translation", {q.translation(0), q.translation(1), q.translation(2)}},
              {"rotation", {q.rotation(0), q.rotation(1), q.rotation(2)}}};
}

PoseParams pose_params_from_json(const json& j) {
  PoseParams q;
  for (int k = 0; k < 3; ++k) {
    q.translation(k) = j.at("translation").at(static_cast<size_t>(k)).get<double>();
    q.rotation(k) = j.at("rotation").at(static_cast<size_t>(k)).get<double>();
  }
  return q;
}

}  // namespace

std::string model_to_json_string(const ModelParams& p, bool ground_truth) {
  json j;
  j["version"] = kModelVersion;
  j["n"] = p.joint_count();
  j["m"] = p.feature_count();
  j["c"] = p.camera_count();
  j["base"] = pose_params_to_json(p.kinematics.base);
  j["links"] = json::array();
  for (const auto& link : p.kinematics.links) {
    j["links"].push_back({{"omega", link.omega}, {"d", link.d}, {"a", link.a}, {"alpha", link.alpha}});
  }
  j["features"] = json::array();
  for (int r = 0; r < p.feature_count(); ++r) {
    j["features"].push_back({p.features.coords(r, 0), p.features.coords(r, 1), p.features.coords(r, 2)});
  }
  j["cameras"] = json::array();
  for (const auto& cam : p.cameras) {
    j["cameras"].push_back({{"fx", cam.intrinsics.fx},
                            {"fy", cam.intrinsics.fy},
                            {"cx", cam.intrinsics.cx},
                            {"cy", cam.intrinsics.cy},
                            {"extrinsics", pose_params_to_json(cam.extrinsics)}});
  }
  if (ground_truth) j["ground_truth"] = true;
  return j.dump(2) + "\n";
}

ModelParams model_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<std::string>() != kModelVersion) {
      throw ConfigInvalid("model file has an unsupported version tag");
    }
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    const int c = j.at("c").get<int>();
    if (n < 1 || m < 1 || c < 1) throw ConfigInvalid("model file dimensions must be at least 1");
    ModelParams p;
    p.kinematics.base = pose_params_from_json(j.at("base"));
    for (const auto& lj : j.at("links")) {
      p.kinematics.links.push_back({lj.at("omega").get<double>(), lj.at("d").get<double>(),
                                    lj.at("a").get<double>(), lj.at("alpha").get<double>()});
    }
    p.features.coords.resize(m, 3);
    const auto& fj = j.at("features");
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < 3; ++k) {
        p.features.coords(r, k) = fj.at(static_cast<size_t>(r)).at(static_cast<size_t>(k)).get<double>();
      }
    }
    for (const auto& cj : j.at("cameras")) {
      CameraParams cam;
      cam.intrinsics = {cj.at("fx").get<double>(), cj.at("fy").get<double>(), cj.at("cx").get<double>(),
                        cj.at("cy").get<double>()};
      cam.extrinsics = pose_params_from_json(cj.at("extrinsics"));
      p.cameras.push_back(cam);
    }
    if (p.joint_count() != n || p.camera_count() != c) {
      throw ConfigInvalid("model file dimensions do not match its contents");
    }
    return p;
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("model file is missing required fields: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelParams& params, bool ground_truth) {
  std::ofstream out(path);
  if (!out) throw ConfigInvalid("cannot open model file for writing: " + path);
  out << model_to_json_string(params, ground_truth);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_string(ss.str());
}

}  // namespace vservo
