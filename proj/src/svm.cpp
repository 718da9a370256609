#include <algorithm>
#include <cmath>
#include <limits>

#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"

namespace faceshape {

namespace {

constexpr double kMinCurvature = 1e-12;

} // namespace

double Kernel::operator()(const double* a, const double* b, Eigen::Index dim) const {
  if (kind == KernelKind::Linear) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
  }
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

Kernel kernel_for(const ClassifierConfig& cfg) {
  return {cfg.kind == ClassifierKind::SvmRbf ? KernelKind::Rbf : KernelKind::Linear, cfg.rbf_gamma};
}

Matrix gram_matrix(const Kernel& k, const Matrix& X) {
  // Row-major copy so each sample is contiguous.
  const RowMatrix rows = X;
  const Eigen::Index n = X.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = k(rows.row(i).data(), rows.row(j).data(), X.cols());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

SmoResult solve_smo(const Matrix& gram, std::span<const int> y, double C, double tol, long max_iter) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (gram.rows() != n || gram.cols() != n) throw InvalidInput("gram matrix does not match label count");
  if (!(C > 0.0)) throw InvalidInput("svm_c must be > 0");

  SmoResult res;
  res.alpha.assign(y.size(), 0.0);
  auto& alpha = res.alpha;
  // Gradient of 0.5 a^T Q a - e^T a, with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(y.size(), -1.0);

  const auto yi = [&](Eigen::Index i) { return static_cast<double>(y[static_cast<std::size_t>(i)]); };
  const auto at = [](std::vector<double>& v, Eigen::Index i) -> double& { return v[static_cast<std::size_t>(i)]; };
  const auto in_up = [&](Eigen::Index t) {
    const double a = alpha[static_cast<std::size_t>(t)];
    return yi(t) > 0 ? a < C : a > 0.0;
  };
  const auto in_low = [&](Eigen::Index t) {
    const double a = alpha[static_cast<std::size_t>(t)];
    return yi(t) > 0 ? a > 0.0 : a < C;
  };

  double up_max = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();

  for (;;) {
    // Maximal violating pair.
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    up_max = -std::numeric_limits<double>::infinity();
    low_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double f = -yi(t) * at(grad, t);
      if (in_up(t) && f > up_max) {
        up_max = f;
        i = t;
      }
      if (in_low(t) && f < low_min) {
        low_min = f;
        j = t;
      }
    }
    if (i < 0 || j < 0 || up_max - low_min <= tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    ++res.iterations;

    const double Kii = gram(i, i);
    const double Kjj = gram(j, j);
    const double Kij = gram(i, j);
    double& ai = at(alpha, i);
    double& aj = at(alpha, j);
    const double old_i = ai;
    const double old_j = aj;

    if (yi(i) != yi(j)) {
      const double curvature = std::max(Kii + Kjj - 2.0 * Kij, kMinCurvature);
      const double delta = (-at(grad, i) - at(grad, j)) / curvature;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      const double curvature = std::max(Kii + Kjj - 2.0 * Kij, kMinCurvature);
      const double delta = (at(grad, i) - at(grad, j)) / curvature;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (Eigen::Index t = 0; t < n; ++t) {
      at(grad, t) += yi(t) * (yi(i) * gram(t, i) * di + yi(j) * gram(t, j) * dj);
    }
  }

  // Any bias in [low_min, up_max] satisfies KKT to within the final gap; take the midpoint.
  if (std::isfinite(up_max) && std::isfinite(low_min)) {
    res.bias = 0.5 * (up_max + low_min);
  } else if (std::isfinite(up_max)) {
    res.bias = up_max;
  } else if (std::isfinite(low_min)) {
    res.bias = low_min;
  }
  return res;
}

double svm_decision(const SvmMachine& m, const Kernel& k, const double* x) {
  const auto& rows = m.support;
  double s = m.bias;
  for (std::size_t i = 0; i < m.alpha.size(); ++i) {
    s += m.alpha[i] * m.sign[i] * k(rows.row(static_cast<Eigen::Index>(i)).data(), x, rows.cols());
  }
  return s;
}

} // namespace faceshape
