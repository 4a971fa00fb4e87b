#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "vservo/geometry.hpp"

using namespace vservo;

namespace {

Pose rot_z(double angle) {
  PoseParams q;
  q.rotation = Vec3(0.0, 0.0, angle);
  return pose_from_params(q);
}

Pose translate(double x, double y, double z) {
  Pose p;
  p.translation = Vec3(x, y, z);
  return p;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("compose identity cases") {
  const Pose id;
  CHECK(pose_distance(compose(id, id), id) == doctest::Approx(0.0));

  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    CHECK(pose_distance(compose(id, p), p) < 1e-15);
    CHECK(pose_distance(compose(p, id), p) < 1e-15);
  }
}

TEST_CASE("compose Rz(pi/2) then Tx(1) moves origin to (0,1,0)") {
  const Pose p = compose(rot_z(kPi / 2.0), translate(1.0, 0.0, 0.0));
  const Vec3 moved = p.apply(Vec3::Zero());
  CHECK(moved.isApprox(Vec3(0.0, 1.0, 0.0), 1e-12));
}

TEST_CASE("compose is associative on random triples") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose lhs = compose(compose(a, b), c);
    const Pose rhs = compose(a, compose(b, c));
    CHECK(pose_distance(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("pose_from_params examples") {
  CHECK(pose_distance(pose_from_params(PoseParams{}), Pose{}) == doctest::Approx(0.0));

  PoseParams yaw;
  yaw.rotation = Vec3(0.0, 0.0, kPi / 2.0);
  Mat3 expected;
  expected << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  CHECK((pose_from_params(yaw).rotation - expected).cwiseAbs().maxCoeff() < 1e-12);

  PoseParams trans;
  trans.translation = Vec3(1.0, 2.0, 3.0);
  const Pose p = pose_from_params(trans);
  CHECK(p.rotation.isIdentity(1e-15));
  CHECK(p.translation.isApprox(Vec3(1.0, 2.0, 3.0)));
}

TEST_CASE("exp/log round trip preserves the pose within 1e-9") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-kPi * 0.999, kPi * 0.999);
  for (int i = 0; i < 200; ++i) {
    PoseParams q;
    Vec3 axis = testing::random_vec3(rng);
    while (axis.norm() < 1e-6) axis = testing::random_vec3(rng);
    q.rotation = axis.normalized() * angle(rng);
    q.translation = testing::random_vec3(rng, 2.0);
    const Pose p = pose_from_params(q);
    const Pose back = pose_from_params(params_from_pose(p));
    CHECK(pose_distance(p, back) < 1e-9);
  }
}

TEST_CASE("pose_from_params is smooth through zero rotation") {
  PoseParams tiny;
  tiny.rotation = Vec3(1e-9, -2e-9, 1e-9);
  const Pose p = pose_from_params(tiny);
  CHECK(is_valid_pose(p));
}

TEST_CASE("pose_distance examples and symmetry") {
  std::mt19937_64 rng(5);
  const Pose a = random_pose(rng);
  CHECK(pose_distance(a, a) == doctest::Approx(0.0));
  CHECK(pose_distance(Pose{}, translate(1.0, 0.0, 0.0)) == doctest::Approx(1.0));
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng), q = random_pose(rng);
    CHECK(pose_distance(p, q) == doctest::Approx(pose_distance(q, p)));
  }
}

TEST_CASE("arun_align exact cases") {
  std::mt19937_64 rng(37);
  std::vector<Vec3> p;
  for (int i = 0; i < 10; ++i) p.push_back(testing::random_vec3(rng, 2.0));

  SUBCASE("identity when q equals p") {
    const Pose t = arun_align(p, p);
    CHECK(pose_distance(t, Pose{}) < 1e-12);
  }
  SUBCASE("pure translation from centroid shift") {
    std::vector<Vec3> q;
    for (const auto& x : p) q.push_back(x + Vec3(0.0, 0.0, 5.0));
    const Pose t = arun_align(p, q);
    CHECK(t.rotation.isIdentity(1e-12));
    CHECK(t.translation.isApprox(Vec3(0.0, 0.0, 5.0), 1e-12));
  }
  SUBCASE("recovers a random rigid transform within 1e-9") {
    for (int trial = 0; trial < 20; ++trial) {
      const Pose truth = random_pose(rng, 3.0);
      std::vector<Vec3> q;
      for (const auto& x : p) q.push_back(truth.apply(x));
      const Pose t = arun_align(p, q);
      CHECK(pose_distance(t, truth) < 1e-9);
      double residual = 0.0;
      for (size_t i = 0; i < p.size(); ++i) residual += (t.apply(p[i]) - q[i]).squaredNorm();
      CHECK(residual < 1e-18);
    }
  }
}

TEST_CASE("arun_align rejects degenerate configurations") {
  std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(arun_align(two, two), DegenerateConfiguration);

  std::vector<Vec3> line;
  for (int i = 0; i < 5; ++i) line.push_back(Vec3(static_cast<double>(i), 0.0, 0.0));
  CHECK_THROWS_AS(arun_align(line, line), DegenerateConfiguration);

  std::vector<Vec3> three = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  std::vector<Vec3> mismatched = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(arun_align(three, mismatched), DegenerateConfiguration);
}

TEST_CASE("umeyama_align recovers a similarity transform") {
  std::mt19937_64 rng(41);
  std::vector<Vec3> p, q;
  for (int i = 0; i < 12; ++i) p.push_back(testing::random_vec3(rng, 1.5));
  const Pose rigid = random_pose(rng, 2.0);
  const double scale = 0.37;
  for (const auto& x : p) q.push_back(scale * (rigid.rotation * x) + rigid.translation);
  const SimilarityTransform s = umeyama_align(p, q);
  CHECK(s.scale == doctest::Approx(scale).epsilon(1e-9));
  for (size_t i = 0; i < p.size(); ++i) CHECK((s.apply(p[i]) - q[i]).norm() < 1e-9);
}

TEST_CASE("orthonormalized repairs drift from long composition chains") {
  std::mt19937_64 rng(53);
  Pose p = random_pose(rng);
  p.rotation(0, 0) += 1e-7;  // simulate accumulated round-off
  CHECK_FALSE(is_valid_pose(p));
  CHECK(is_valid_pose(orthonormalized(p)));
}

TEST_CASE("inverse composes to identity") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng, 2.0);
    CHECK(pose_distance(compose(p, inverse(p)), Pose{}) < 1e-12);
    CHECK(pose_distance(compose(inverse(p), p), Pose{}) < 1e-12);
  }
}
