#include <Eigen/Eigenvalues>

#include "faceshape/classifiers.hpp"
#include "faceshape/errors.hpp"

namespace faceshape {

namespace {

constexpr double kRidge = 1e-6;

} // namespace

LdaModel fit_lda(const Matrix& Z, std::span<const int> labels, int components) {
  const Eigen::Index dim = Z.cols();
  if (components < 1 || components > dim) throw InvalidInput("lda_components must be in [1, feature count]");

  LdaModel m;
  Matrix means = Matrix::Zero(kNumShapes, dim);
  std::array<double, kNumShapes> counts{};
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const auto c = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    means.row(c) += Z.row(i);
    counts[static_cast<std::size_t>(c)] += 1.0;
  }
  Eigen::RowVectorXd overall = Z.colwise().mean();
  for (std::size_t c = 0; c < kNumShapes; ++c) {
    m.present[c] = counts[c] > 0.0;
    if (m.present[c]) means.row(static_cast<Eigen::Index>(c)) /= counts[c];
  }

  Matrix within = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const Eigen::RowVectorXd d = Z.row(i) - means.row(labels[static_cast<std::size_t>(i)]);
    within.noalias() += d.transpose() * d;
  }
  Matrix between = Matrix::Zero(dim, dim);
  for (std::size_t c = 0; c < kNumShapes; ++c) {
    if (!m.present[c]) continue;
    const Eigen::RowVectorXd d = means.row(static_cast<Eigen::Index>(c)) - overall;
    between.noalias() += counts[c] * (d.transpose() * d);
  }

  const double trace = within.trace();
  const double ridge = trace > 0.0 ? kRidge * trace / static_cast<double>(dim) : kRidge;
  within.diagonal().array() += ridge;

  // Solves between * v = lambda * within * v; eigenvalues come back ascending.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(between, within);
  if (solver.info() != Eigen::Success) throw NumericalFailure("LDA generalized eigensolve failed");
  m.projection = solver.eigenvectors().rightCols(components).rowwise().reverse();

  m.centroids = Matrix::Zero(kNumShapes, components);
  for (std::size_t c = 0; c < kNumShapes; ++c) {
    if (m.present[c]) {
      const auto r = static_cast<Eigen::Index>(c);
      m.centroids.row(r) = means.row(r) * m.projection;
    }
  }
  return m;
}

Matrix projected_within_scatter(const Matrix& Z, std::span<const int> labels, const Matrix& projection) {
  const Matrix P = Z * projection;
  Matrix means = Matrix::Zero(kNumShapes, P.cols());
  std::array<double, kNumShapes> counts{};
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    const auto c = labels[static_cast<std::size_t>(i)];
    means.row(c) += P.row(i);
    counts[static_cast<std::size_t>(c)] += 1.0;
  }
  for (std::size_t c = 0; c < kNumShapes; ++c) {
    if (counts[c] > 0.0) means.row(static_cast<Eigen::Index>(c)) /= counts[c];
  }
  Matrix scatter = Matrix::Zero(P.cols(), P.cols());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    const Eigen::RowVectorXd d = P.row(i) - means.row(labels[static_cast<std::size_t>(i)]);
    scatter.noalias() += d.transpose() * d;
  }
  return scatter;
}

} // namespace faceshape
