#include "faceshape/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "faceshape/errors.hpp"

namespace faceshape::optim {

namespace {

constexpr double kMinCurvature = 1e-10;

// Relative slack on value comparisons. Near a minimizer true decreases fall
// below rounding noise in f, and only the slope tests stay informative.
constexpr double kValueNoise = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;  // 1 / (s^T y)
};

// Evaluates the objective and enforces the finiteness / shape contract.
class CheckedObjective {
public:
  CheckedObjective(const Objective& f, std::size_t n) : f_(f), n_(n) {}

  ObjectiveEvaluation operator()(std::span<const double> x) {
    ++count_;
    auto e = f_(x);
    if (e.gradient.size() != n_) throw InvalidInput("objective gradient has the wrong length");
    if (!std::isfinite(e.value)) throw NumericalFailure("objective value is not finite");
    for (double g : e.gradient) {
      if (!std::isfinite(g)) throw NumericalFailure("objective gradient is not finite");
    }
    return e;
  }

  int count() const { return count_; }

private:
  const Objective& f_;
  std::size_t n_;
  int count_ = 0;
};

// Minimizer of the cubic matching values and slopes at a and b, kept inside
// the central 80% of the interval; falls back to bisection.
double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  const double mid = 0.5 * (a + b);
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = gb - ga + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double t = b - (b - a) * (gb + d2 - d1) / denom;
  if (!std::isfinite(t)) return mid;
  return std::clamp(t, lo + margin, hi - margin);
}

struct Trial {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  ObjectiveEvaluation eval;
  std::vector<double> x;
};

class LineSearch {
public:
  LineSearch(CheckedObjective& f, const LbfgsConfig& cfg, std::span<const double> x, std::span<const double> p,
             double f0, double g0)
      : f_(f), cfg_(cfg), x_(x), p_(p), f0_(f0), g0_(g0), noise_(kValueNoise * std::abs(f0)) {}

  // Returns true with `out` filled when a strong-Wolfe step is found.
  // On failure `out` holds the lowest trial below f0, if any.
  bool run(Trial& out) {
    if (search(out)) return true;
    if (best_.value < f0_) out = std::move(best_);
    return false;
  }

private:
  bool search(Trial& out) {
    Trial prev{0.0, f0_, g0_, {}, {}};
    double step = 1.0;
    for (int i = 0; i < cfg_.max_line_search_steps; ++i) {
      Trial t = evaluate(step);
      if (!sufficient_decrease(t) || (i > 0 && t.value >= prev.value + noise_)) {
        return zoom(prev, t, out);
      }
      if (std::abs(t.slope) <= -cfg_.wolfe_c2 * g0_) {
        out = std::move(t);
        return true;
      }
      if (t.slope >= 0.0) return zoom(t, prev, out);
      prev = std::move(t);
      step *= 2.0;
    }
    return false;
  }

  bool sufficient_decrease(const Trial& t) const {
    return t.value <= f0_ + cfg_.wolfe_c1 * t.step * g0_ + noise_;
  }

  Trial evaluate(double step) {
    ++used_;
    Trial t;
    t.step = step;
    t.x.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) t.x[i] = x_[i] + step * p_[i];
    t.eval = f_(t.x);
    t.value = t.eval.value;
    t.slope = dot(t.eval.gradient, p_);
    if (t.value < best_.value) best_ = t;
    return t;
  }

  bool zoom(Trial lo, Trial hi, Trial& out) {
    while (used_ < cfg_.max_line_search_steps) {
      if (lo.step == hi.step) return false;
      const double step = cubic_step(lo.step, lo.value, lo.slope, hi.step, hi.value, hi.slope);
      Trial t = evaluate(step);
      if (!sufficient_decrease(t) || t.value > lo.value + noise_) {
        hi = std::move(t);
        continue;
      }
      if (std::abs(t.slope) <= -cfg_.wolfe_c2 * g0_) {
        out = std::move(t);
        return true;
      }
      if (t.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = std::move(t);
    }
    return false;
  }

  CheckedObjective& f_;
  const LbfgsConfig& cfg_;
  std::span<const double> x_;
  std::span<const double> p_;
  double f0_;
  double g0_;
  double noise_;
  Trial best_{0.0, std::numeric_limits<double>::infinity(), 0.0, {}, {}};
  int used_ = 0;
};

void two_loop(const std::deque<CurvaturePair>& pairs, std::span<const double> grad, std::vector<double>& dir) {
  std::vector<double> q(grad.begin(), grad.end());
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * dot(pairs[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * pairs[k].y[i];
  }
  double gamma = 1.0;
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    gamma = dot(last.s, last.y) / dot(last.y, last.y);
  }
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * dot(pairs[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += pairs[k].s[i] * (alpha[k] - beta);
  }
  dir.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) dir[i] = -q[i];
}

} // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIters: return "max-iters";
    case Status::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

Result minimize(const Objective& objective, std::vector<double> x0, const LbfgsConfig& cfg,
                const std::function<void(const StepInfo&)>& observer) {
  if (cfg.memory < 1 || cfg.max_iters < 1 || cfg.max_line_search_steps < 1) {
    throw InvalidInput("L-BFGS memory, iteration and line-search budgets must be >= 1");
  }
  if (!(cfg.grad_tol > 0.0)) throw InvalidInput("grad_tol must be > 0");
  if (!(0.0 < cfg.wolfe_c1 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0)) {
    throw InvalidInput("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  }

  CheckedObjective f(objective, x0.size());
  Result res;
  res.x = std::move(x0);
  auto cur = f(res.x);
  res.value = cur.value;
  res.gradient = std::move(cur.gradient);

  std::deque<CurvaturePair> pairs;
  std::vector<double> dir;
  res.status = Status::MaxIters;

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (inf_norm(res.gradient) <= cfg.grad_tol) {
      res.status = Status::Converged;
      break;
    }

    two_loop(pairs, res.gradient, dir);
    double slope = dot(res.gradient, dir);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      pairs.clear();
      two_loop(pairs, res.gradient, dir);
      slope = dot(res.gradient, dir);
    }

    Trial accepted;
    LineSearch ls(f, cfg, res.x, dir, res.value, slope);
    if (!ls.run(accepted)) {
      res.status = Status::LineSearchFailed;
      if (!accepted.x.empty()) {
        res.x = std::move(accepted.x);
        res.value = accepted.value;
        res.gradient = std::move(accepted.eval.gradient);
        res.iterations = it + 1;
      }
      break;
    }

    if (observer) {
      observer({it, accepted.step, res.value, slope, accepted.value, accepted.slope});
    }

    CurvaturePair pair;
    pair.s.resize(res.x.size());
    pair.y.resize(res.x.size());
    for (std::size_t i = 0; i < res.x.size(); ++i) {
      pair.s[i] = accepted.x[i] - res.x[i];
      pair.y[i] = accepted.eval.gradient[i] - res.gradient[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > kMinCurvature) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (static_cast<int>(pairs.size()) > cfg.memory) pairs.pop_front();
    }

    res.x = std::move(accepted.x);
    res.value = accepted.value;
    res.gradient = std::move(accepted.eval.gradient);
    res.iterations = it + 1;
  }

  if (res.status == Status::MaxIters && inf_norm(res.gradient) <= cfg.grad_tol) res.status = Status::Converged;
  res.evaluations = f.count();
  return res;
}

} // namespace faceshape::optim
