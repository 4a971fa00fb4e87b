#include "vservo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace vservo {

using Eigen::VectorXd;

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::gradient_tol: return "gradient_tol";
    case TerminationReason::max_iter: return "max_iter";
    case TerminationReason::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

VectorXd gradient(const Objective& f, const Eigen::VectorXd& x) {
  VectorXd g(x.size());
  const double v = f.value_and_gradient(x, g);
  if (!std::isfinite(v) || !g.allFinite()) {
    throw NonFiniteObjective("gradient: objective is not finite at the evaluation point");
  }
  return g;
}

double DualFunctionObjective::value(const VectorXd& x) const {
  std::vector<Dual> args(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i) args[static_cast<size_t>(i)] = Dual(x(i));
  return fn_(args).value();
}

double DualFunctionObjective::value_and_gradient(const VectorXd& x, VectorXd& grad) const {
  std::vector<Dual> args(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    args[static_cast<size_t>(i)] = Dual::seeded(x(i), dim_, i);
  }
  const Dual out = fn_(args);
  grad.resize(dim_);
  if (out.is_constant()) {
    grad.setZero();
  } else {
    grad = out.partials();
  }
  return out.value();
}

namespace {

struct Evaluation {
  double f = 0.0;
  VectorXd g;
};

constexpr double kArmijo = 1e-4;
constexpr double kWolfeCurvature = 0.9;

class LbfgsHistory {
 public:
  explicit LbfgsHistory(int capacity) : capacity_(capacity) {}

  void clear() { pairs_.clear(); }

  void push(VectorXd s, VectorXd y) {
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm())) return;  // keep B positive definite
    pairs_.push_back({std::move(s), std::move(y), sy});
    if (static_cast<int>(pairs_.size()) > capacity_) pairs_.pop_front();
  }

  /// Two-loop recursion: d = -H * g.
  VectorXd direction(const VectorXd& g) const {
    VectorXd q = -g;
    if (pairs_.empty()) return q;
    std::vector<double> alpha(pairs_.size());
    for (int i = static_cast<int>(pairs_.size()) - 1; i >= 0; --i) {
      const auto& p = pairs_[static_cast<size_t>(i)];
      alpha[static_cast<size_t>(i)] = p.s.dot(q) / p.sy;
      q -= alpha[static_cast<size_t>(i)] * p.y;
    }
    const auto& last = pairs_.back();
    q *= last.sy / last.y.squaredNorm();
    for (size_t i = 0; i < pairs_.size(); ++i) {
      const auto& p = pairs_[i];
      const double beta = p.y.dot(q) / p.sy;
      q += (alpha[i] - beta) * p.s;
    }
    return q;
  }

 private:
  struct Pair {
    VectorXd s, y;
    double sy;
  };
  int capacity_;
  std::deque<Pair> pairs_;
};

struct LineSearchOutcome {
  bool success = false;
  double alpha = 0.0;
  double f = 0.0;
  VectorXd x, g;
};

/// Strong-Wolfe line search (bracket + zoom with bisection). Non-finite
/// trial values are treated as overshoot and pull the bracket inward.
LineSearchOutcome wolfe_line_search(const Objective& obj, const VectorXd& x0, double f0,
                                    const VectorXd& g0, const VectorXd& d, int max_steps) {
  LineSearchOutcome out;
  const double dphi0 = g0.dot(d);
  if (!(dphi0 < 0.0)) return out;

  struct Trial {
    double alpha, f, dphi;
    bool finite;
    VectorXd x, g;
  };
  int evals = 0;
  auto eval = [&](double alpha) {
    Trial t;
    t.alpha = alpha;
    t.x = x0 + alpha * d;
    t.g.resize(x0.size());
    t.f = obj.value_and_gradient(t.x, t.g);
    t.finite = std::isfinite(t.f) && t.g.allFinite();
    t.dphi = t.finite ? t.g.dot(d) : 0.0;
    ++evals;
    return t;
  };
  auto accept = [&](Trial& t) {
    out.success = true;
    out.alpha = t.alpha;
    out.f = t.f;
    out.x = std::move(t.x);
    out.g = std::move(t.g);
  };
  auto wolfe_ok = [&](const Trial& t) {
    return t.finite && t.f <= f0 + kArmijo * t.alpha * dphi0 &&
           std::abs(t.dphi) <= kWolfeCurvature * std::abs(dphi0);
  };

  auto zoom = [&](Trial lo, Trial hi) {
    while (evals < max_steps) {
      Trial t = eval(0.5 * (lo.alpha + hi.alpha));
      if (!t.finite || t.f > f0 + kArmijo * t.alpha * dphi0 || t.f >= lo.f) {
        hi = std::move(t);
        continue;
      }
      if (wolfe_ok(t)) {
        accept(t);
        return;
      }
      if (t.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
      lo = std::move(t);
    }
    // Ran out of evaluations: settle for sufficient decrease if we have it.
    if (lo.finite && lo.alpha > 0.0 && lo.f < f0) accept(lo);
  };

  Trial prev;
  prev.alpha = 0.0;
  prev.f = f0;
  prev.dphi = dphi0;
  prev.finite = true;
  prev.x = x0;
  prev.g = g0;
  double alpha = 1.0;
  while (evals < max_steps) {
    Trial t = eval(alpha);
    if (!t.finite || t.f > f0 + kArmijo * t.alpha * dphi0 || (prev.alpha > 0.0 && t.f >= prev.f)) {
      zoom(std::move(prev), std::move(t));
      return out;
    }
    if (wolfe_ok(t)) {
      accept(t);
      return out;
    }
    if (t.dphi >= 0.0) {
      zoom(std::move(t), std::move(prev));
      return out;
    }
    prev = std::move(t);
    alpha *= 2.0;
  }
  if (prev.alpha > 0.0 && prev.f < f0) accept(prev);
  return out;
}

bool stalled_at_stationary_point(double grad_inf, double f, const OptimizerOptions& opts) {
  // A line search that cannot make progress at a point with a tiny gradient
  // relative to the objective scale is treated as converged-to-floor.
  return grad_inf <= std::max(1e3 * opts.gradient_tolerance, 1e-6 * (1.0 + std::abs(f)));
}

MinimizeResult run_lbfgs(const Objective& obj, const VectorXd& x0, const VectorXd* lower,
                         const VectorXd* upper, const OptimizerOptions& opts,
                         const IterationCallback& callback) {
  if (opts.max_iterations <= 0 || opts.gradient_tolerance <= 0.0 || opts.history_size <= 0 ||
      opts.line_search_max_steps <= 0) {
    throw ConfigInvalid("OptimizerOptions fields must be strictly positive");
  }
  const bool boxed = lower != nullptr;
  auto project = [&](VectorXd v) {
    if (boxed) v = v.cwiseMax(*lower).cwiseMin(*upper);
    return v;
  };

  VectorXd x = project(x0);
  VectorXd g(x.size());
  double f = obj.value_and_gradient(x, g);
  if (!std::isfinite(f) || !g.allFinite()) {
    throw NonFiniteObjective("minimize: objective is not finite at the starting point");
  }

  MinimizeResult result;
  result.report.initial_objective = f;
  VectorXd best_x = x;
  double best_f = f;

  LbfgsHistory history(opts.history_size);
  auto grad_inf = [](const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };

  TerminationReason reason = TerminationReason::max_iter;
  int iter = 0;
  if (grad_inf(g) < opts.gradient_tolerance) {
    reason = TerminationReason::gradient_tol;
  } else {
    for (iter = 1; iter <= opts.max_iterations; ++iter) {
      VectorXd d = history.direction(g);
      if (!(g.dot(d) < 0.0)) {  // not a descent direction; restart from steepest
        history.clear();
        d = -g;
      }

      bool accepted = false;
      if (!boxed) {
        LineSearchOutcome ls = wolfe_line_search(obj, x, f, g, d, opts.line_search_max_steps);
        if (ls.success) {
          history.push(ls.x - x, ls.g - g);
          x = std::move(ls.x);
          f = ls.f;
          g = std::move(ls.g);
          accepted = true;
        }
      } else {
        // Projected backtracking (Armijo on the projected path).
        double alpha = 1.0;
        for (int step = 0; step < opts.line_search_max_steps; ++step) {
          VectorXd xc = project(x + alpha * d);
          const VectorXd dx = xc - x;
          if (dx.cwiseAbs().maxCoeff() == 0.0) break;
          VectorXd gc(x.size());
          const double fc = obj.value_and_gradient(xc, gc);
          if (std::isfinite(fc) && gc.allFinite() && fc <= f + kArmijo * g.dot(dx)) {
            history.push(dx, gc - g);
            x = std::move(xc);
            f = fc;
            g = std::move(gc);
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
      }

      if (!accepted) {
        reason = TerminationReason::line_search_failure;
        break;
      }
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
      if (callback) callback(iter, f);
      if (grad_inf(g) < opts.gradient_tolerance) {
        reason = TerminationReason::gradient_tol;
        break;
      }
    }
    if (iter > opts.max_iterations) {
      iter = opts.max_iterations;
      reason = TerminationReason::max_iter;
    }
  }

  result.x = std::move(best_x);
  result.report.final_objective = best_f;
  result.report.iterations = iter;
  result.report.termination_reason = reason;
  result.report.final_gradient_norm = grad_inf(g);
  result.report.converged =
      reason == TerminationReason::gradient_tol ||
      (reason == TerminationReason::line_search_failure &&
       stalled_at_stationary_point(result.report.final_gradient_norm, best_f, opts));
  return result;
}

}  // namespace

MinimizeResult minimize(const Objective& f, const VectorXd& x0, const OptimizerOptions& opts,
                        const IterationCallback& callback) {
  return run_lbfgs(f, x0, nullptr, nullptr, opts, callback);
}

MinimizeResult minimize_boxed(const Objective& f, const VectorXd& x0, const VectorXd& lower,
                              const VectorXd& upper, const OptimizerOptions& opts,
                              const IterationCallback& callback) {
  if (lower.size() != x0.size() || upper.size() != x0.size()) {
    throw DimensionMismatch("minimize_boxed: bound vectors must match the parameter size");
  }
  return run_lbfgs(f, x0, &lower, &upper, opts, callback);
}

}  // namespace vservo
