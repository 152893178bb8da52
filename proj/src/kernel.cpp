#include "topola/error.hpp"
#include "topola/eval.hpp"

#include <algorithm>
#include <cmath>

namespace topola {

KernelResult local_scaling_kernel(const Matrix& features, Index k, double sigma) {
  const Index n = features.rows();
  if (k < 1) throw_config("local_scaling_kernel: k must be >= 1");
  if (k >= n) throw_config("local_scaling_kernel: need more points than neighbors (k < n)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw_config("local_scaling_kernel: sigma must be positive");
  if (!features.allFinite()) throw_config("local_scaling_kernel: features contain NaN or Inf");

  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = (features.row(i) - features.row(j)).norm();
  }

  std::vector<Index> clamped;
  Vector scale(n);
  std::vector<double> row;
  for (Index i = 0; i < n; ++i) {
    row.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) row.push_back(dist(i, j));
    std::partial_sort(row.begin(), row.begin() + k, row.end());
    double mean = 0.0;
    for (Index r = 0; r < k; ++r) mean += row[static_cast<std::size_t>(r)];
    mean /= static_cast<double>(k);
    if (mean < kMinLocalScale) {
      mean = kMinLocalScale;
      clamped.push_back(i);
    }
    scale(i) = mean;
  }

  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double width = sigma * (scale(i) + scale(j));
      g(i, j) = g(j, i) = std::exp(-dist(i, j) * dist(i, j) / (width * width));
    }
  }
  return KernelResult{AdjacencyMatrix(std::move(g), true), std::move(clamped)};
}

}  // namespace topola
