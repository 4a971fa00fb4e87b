#pragma once

// Test-only oracles. Finite differences live here and nowhere else: the
// production gradient path is algorithmic differentiation, and these checks
// are what keep it honest.

#include <Eigen/Core>

#include <cmath>
#include <random>

#include "vservo/geometry.hpp"
#include "vservo/optim.hpp"

namespace vservo::testing {

/// Central finite differences with step 1e-6 * max(1, |x_i|).
inline Eigen::VectorXd finite_difference_gradient(const Objective& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f.value(xp);
    xp(i) = x(i) - h;
    const double fm = f.value(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Componentwise relative error with a unit guard for near-zero entries.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a(i)), std::abs(b(i))});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

inline Vec3 random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  return {uni(rng), uni(rng), uni(rng)};
}

}  // namespace vservo::testing
