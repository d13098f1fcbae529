#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dvs/dataset.hpp"

namespace dvs {

struct Centroids {
  int dim = 0;
  std::vector<float> centers;  // count() x dim, row-major

  int count() const {
    return dim > 0 ? static_cast<int>(centers.size()) / dim : 0;
  }
  std::span<const float> operator[](int c) const {
    return {centers.data() + static_cast<std::size_t>(c) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Per query: exactly c cluster ids, ascending by (distance, cluster id).
using Assignment = std::vector<std::vector<std::uint32_t>>;

struct KmeansStats {
  std::vector<double> wcss;  // within-cluster sum of squares, one per iteration
  int iterations = 0;
};

// Lloyd's iterations with k-means++ seeding. Deterministic for a fixed seed.
// Every cluster induced by the returned centroids is non-empty; an empty
// cluster during training is repaired by moving the point farthest from its
// own centroid into it.
Centroids kmeans_train(const Dataset& db, int clusters, int max_iters,
                       std::uint64_t seed, KmeansStats* stats = nullptr);

// Top-c nearest centroids per query via the norm-expansion distance matrix,
// ties by lower cluster id.
Assignment assign_top_c(const Centroids& cents, const Dataset& queries, int c);

// Nearest-centroid partition of the database: one id list per cluster, each
// id appearing exactly once.
std::vector<std::vector<std::uint32_t>> partition_database(const Dataset& db,
                                                           const Centroids& cents);

}  // namespace dvs
