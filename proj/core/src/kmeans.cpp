#include <algorithm>
#include <cmath>
#include <limits>

#include "pedsafe/error.hpp"
#include "pedsafe/geometry.hpp"

namespace pedsafe::geometry {

namespace {

// centers must be sorted ascending; strict comparison sends ties to the
// lower index, i.e. the smaller center
std::size_t nearest(const std::vector<double>& centers, double x) {
  std::size_t best = 0;
  double best_d = std::abs(x - centers[0]);
  for (std::size_t j = 1; j < centers.size(); ++j) {
    const double d = std::abs(x - centers[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::vector<double> seed_plus_plus(std::span<const double> xs, int k, RandomStream& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(xs[rng.uniform_index(xs.size())]);
  std::vector<double> d2(xs.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = xs[i] - centers.back();
      d2[i] = std::min(d2[i], d * d);
      total += d2[i];
    }
    const double target = rng.uniform() * total;
    std::size_t pick = 0;
    if (total > 0.0) {
      double acc = 0.0;
      pick = xs.size() - 1;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(xs[pick]);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

}  // namespace

std::vector<DepthCluster> cluster_depths(std::span<const double> depths, int k,
                                         RandomStream& rng, const KMeansOptions& opts) {
  if (depths.empty()) throw EmptyInputError("cluster_depths needs at least one depth");
  if (k < 1 || static_cast<std::size_t>(k) > depths.size()) {
    throw InvalidArgumentError("cluster count must lie in [1, number of depths]");
  }

  std::vector<double> centers = seed_plus_plus(depths, k, rng);
  std::vector<std::size_t> assign(depths.size(), 0);
  std::vector<std::size_t> previous(depths.size(), k);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for (std::size_t i = 0; i < depths.size(); ++i) assign[i] = nearest(centers, depths[i]);
    if (assign == previous) break;
    previous = assign;

    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < depths.size(); ++i) {
      sum[assign[i]] += depths[i];
      ++count[assign[i]];
    }
    double moved = 0.0;
    for (int j = 0; j < k; ++j) {
      if (count[j] == 0) continue;  // empty cluster keeps its center
      const double c = sum[j] / static_cast<double>(count[j]);
      moved = std::max(moved, std::abs(c - centers[j]));
      centers[j] = c;
    }
    std::sort(centers.begin(), centers.end());
    if (moved < opts.tolerance_m) break;
  }

  std::vector<DepthCluster> out(k);
  for (int j = 0; j < k; ++j) out[j].center = centers[j];
  for (double x : depths) ++out[nearest(centers, x)].size;
  return out;
}

}  // namespace pedsafe::geometry
