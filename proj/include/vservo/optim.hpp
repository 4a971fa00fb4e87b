#pragma once

// Quasi-Newton minimization used by every learning and inference routine:
// L-BFGS with a strong-Wolfe line search, plus an optional box-projected
// variant for joint-limit handling. Objectives provide exact gradients
// (algorithmic differentiation); finite differences exist only in tests.

#include <Eigen/Core>

#include <functional>
#include <span>

#include "vservo/dual.hpp"
#include "vservo/errors.hpp"

namespace vservo {

class Objective {
 public:
  virtual ~Objective() = default;
  virtual int dimension() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  /// Returns f(x) and fills grad (resized to dimension()).
  virtual double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const = 0;
};

/// Exact gradient via the differentiable-scalar mechanism of the objective.
/// Throws NonFiniteObjective if f(x) is NaN or infinite.
Eigen::VectorXd gradient(const Objective& f, const Eigen::VectorXd& x);

struct OptimizerOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;  // on the infinity norm of the gradient
  int history_size = 20;
  int line_search_max_steps = 40;
};

enum class TerminationReason { gradient_tol, max_iter, line_search_failure };

const char* to_string(TerminationReason r);

struct FitReport {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  TerminationReason termination_reason = TerminationReason::max_iter;
  double final_gradient_norm = 0.0;  // infinity norm
};

struct MinimizeResult {
  Eigen::VectorXd x;
  FitReport report;
};

using IterationCallback = std::function<void(int iteration, double objective)>;

/// L-BFGS with strong-Wolfe backtracking. Monotone non-increasing across
/// accepted steps; on line-search failure the best iterate is returned and
/// the failure surfaces in the report.
MinimizeResult minimize(const Objective& f, const Eigen::VectorXd& x0, const OptimizerOptions& opts,
                        const IterationCallback& callback = {});

/// Same, with box constraints handled by projection after each step.
MinimizeResult minimize_boxed(const Objective& f, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              const OptimizerOptions& opts, const IterationCallback& callback = {});

/// Objective defined by a Dual-valued function of a Dual parameter vector;
/// gradients come from dense forward-mode seeding. Dimension must not
/// exceed kMaxPartials.
class DualFunctionObjective : public Objective {
 public:
  using Fn = std::function<Dual(std::span<const Dual>)>;

  DualFunctionObjective(int dimension, Fn fn) : dim_(dimension), fn_(std::move(fn)) {}

  int dimension() const override { return dim_; }
  double value(const Eigen::VectorXd& x) const override;
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;

 private:
  int dim_;
  Fn fn_;
};

}  // namespace vservo
