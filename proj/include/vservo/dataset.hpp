#pragma once

// Training data: per-timestep joint readings and per-camera, per-feature
// pixel detections, plus the commanded joint-displacement actions when the
// collector records them. Serialized as line-delimited JSON.

#include <optional>
#include <string>
#include <vector>

#include "vservo/errors.hpp"
#include "vservo/geometry.hpp"

namespace vservo {

struct Sample {
  std::optional<VecX> joints;
  std::optional<VecX> action;  // command issued after this sample, absent on the last
  std::vector<std::vector<std::optional<Vec2>>> detections;  // [camera][feature]

  int visible_count() const {
    int n = 0;
    for (const auto& cam : detections) {
      for (const auto& det : cam) n += det.has_value() ? 1 : 0;
    }
    return n;
  }
};

struct Dataset {
  int joint_dim = 0;
  int feature_count = 0;
  int camera_count = 0;
  std::vector<Sample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  bool has_joints() const;
  bool has_actions() const;

  /// Checks the structural invariants; throws ConfigInvalid on violation.
  void validate() const;
};

std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(const std::string& text);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

}  // namespace vservo
