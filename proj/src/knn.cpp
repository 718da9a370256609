#include <algorithm>
#include <numeric>

#include "faceshape/classifiers.hpp"

namespace faceshape {

std::array<double, kNumShapes> knn_votes(const KnnModel& m, int k, const double* z) {
  const Eigen::Index n = m.points.rows();
  const Eigen::Index dim = m.points.cols();
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = m.points.row(i).data();
    double s = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double d = row[j] - z[j];
      s += d * d;
    }
    dist[static_cast<std::size_t>(i)] = s;
  }
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  const auto kk = static_cast<std::size_t>(std::min<Eigen::Index>(k, n));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  std::array<double, kNumShapes> votes{};
  for (std::size_t r = 0; r < kk; ++r) votes[static_cast<std::size_t>(m.labels[order[r]])] += 1.0;
  return votes;
}

} // namespace faceshape
