#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "secrelay/lifted.hpp"
#include "secrelay/surrogate.hpp"

namespace secrelay {

/// How many projected-gradient steps L_k each MM subproblem receives.
struct InnerBudget {
  enum class Schedule { kFixed, kUniform, kUntilConverged };
  Schedule schedule = Schedule::kFixed;
  int L = 1;          // kFixed
  int L_max = 5;      // kUniform draws from [1, L_max]
  double tol = 1e-8;  // kUntilConverged: inner gradient-mapping tolerance
  int max_inner = 20000;

  static InnerBudget fixed(int L) { return {Schedule::kFixed, L, L, 1e-8, 20000}; }
  static InnerBudget uniform(int L_max) { return {Schedule::kUniform, 1, L_max, 1e-8, 20000}; }
  static InnerBudget exact(double tol = 1e-8, int max_inner = 20000) {
    return {Schedule::kUntilConverged, 1, 1, tol, max_inner};
  }
};

struct ArmijoParams {
  double sigma = 0.3;
  double beta = 0.5;
  double initial_step = 1.0;
  // Divide the initial step by 1 + ||grad||.
  bool scale_by_gradient = true;
  int max_backtracks = 50;
};

enum class StepRule { kArmijo, kLimitedMinimization };

struct SolverOptions {
  double P_R = 10.0;
  InnerBudget inner;
  StepRule step_rule = StepRule::kArmijo;
  ArmijoParams armijo;
  int grid_size = 16;  // limited minimization: points on (0, s]
  double outer_tol = 1e-3;
  double stationarity_tol = 1e-5;
  int max_outer = 500;
  std::uint64_t seed = 0;
  bool an_enabled = true;
  bool record_wall_time = true;

  /// Throws ConfigError.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double phi = 0.0;            // phi(x^k)
  double phi_next = 0.0;       // phi(x^{k+1})
  double surrogate = 0.0;      // phi~(x^{k+1}; x^k)
  double gm_norm = 0.0;        // ||P(x^k + grad) - x^k||
  double first_step = 0.0;     // alpha^{k,0}
  double progress = 0.0;       // phi~(x^{k+1}; x^k) - phi~(x^k; x^k)
  double progress_ratio = 0.0; // progress / ||gm||^2
  int inner_iterations = 0;
  double wall_ms = 0.0;

  /// sigma * alpha^{k,0} * ||gm||^2
  double progress_bound(double sigma) const { return sigma * first_step * gm_norm * gm_norm; }
};

enum class StopReason { kStationary, kSurrogateTol, kMaxOuter, kStalled };

const char* to_string(StopReason r);

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  StopReason stop = StopReason::kMaxOuter;
  double final_gm_norm = 0.0;
  double sigma = 0.3;

  /// Smallest achieved progress ratio over the run (0 if empty).
  double min_progress_ratio() const;
};

struct SolveResult {
  IteratePoint x;
  double phi = 0.0;
  SolveTrace trace;
};

using Projector = std::function<IteratePoint(const HermitianPair&)>;

struct GradientMapping {
  HermitianPair direction;
  double norm = 0.0;
};

GradientMapping gradient_mapping(const IteratePoint& x, const HermitianPair& grad, const Projector& project);
GradientMapping gradient_mapping(const IteratePoint& x, const Surrogate& s, const Projector& project);
GradientMapping gradient_mapping(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc,
                                 double P_R);

struct StepResult {
  double step = 0.0;
  IteratePoint x_next;
  double value = 0.0;  // phi~(x_next)
  int backtracks = 0;
  // Predicted gain sits below floating-point resolution; x_next == x.
  bool stalled = false;
};

/// Backtracking along x + alpha * direction until
/// phi~(x + alpha d) - phi~(x) >= sigma alpha <grad, d>.
StepResult armijo_step(const IteratePoint& x, const Surrogate& s, const HermitianPair& grad,
                       const HermitianPair& direction, const ArmijoParams& p);
StepResult armijo_step(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc,
                       const HermitianPair& direction, const SolverOptions& opts);

/// W = Q = P_R / (2 (N - r)) I.
IteratePoint default_init(const DerivedConstants& dc, double P_R, bool an_enabled = true);

/// Algorithm 1 over an arbitrary convex feasible set given by its projector.
SolveResult mm_solve(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts,
                     const Projector& project);

SolveResult inexact_mm_solve(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts);

}  // namespace secrelay
