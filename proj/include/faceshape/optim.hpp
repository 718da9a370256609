#pragma once

#include <functional>
#include <span>
#include <vector>

namespace faceshape::optim {

struct ObjectiveEvaluation {
  double value = 0.0;
  std::vector<double> gradient;
};

using Objective = std::function<ObjectiveEvaluation(std::span<const double>)>;

struct LbfgsConfig {
  int memory = 10;
  int max_iters = 200;
  double grad_tol = 1e-5;  // on the infinity norm
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 40;
};

enum class Status { Converged, MaxIters, LineSearchFailed };

const char* to_string(Status s);

/// One accepted step, reported to an optional observer.
struct StepInfo {
  int iteration = 0;
  double step = 0.0;           // accepted line-search step length
  double value_before = 0.0;
  double slope_before = 0.0;   // grad(x)^T p
  double value_after = 0.0;
  double slope_after = 0.0;    // grad(x + step p)^T p
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> gradient;
  Status status = Status::MaxIters;
  int iterations = 0;
  int evaluations = 0;
};

/// Limited-memory BFGS with a strong-Wolfe line search.
///
/// Curvature pairs with s^T y <= 1e-10 are dropped. The returned point is the
/// last accepted iterate, so `value` never exceeds the value at `x0`.
/// Throws NumericalFailure if the objective returns a non-finite value or
/// gradient, and InvalidInput for an inconsistent config or gradient size.
Result minimize(const Objective& objective, std::vector<double> x0, const LbfgsConfig& cfg = {},
                const std::function<void(const StepInfo&)>& observer = {});

} // namespace faceshape::optim
