#pragma once

#include <cstdint>
#include <vector>

#include "dvs/graph_index.hpp"
#include "dvs/kmeans.hpp"
#include "dvs/router.hpp"

namespace dvs {

// Everything the query path needs: trained centroids, cluster placement, and
// one graph per cluster holding that partition's vectors.
struct BuiltIndex {
  Centroids centroids;
  PlacementMap placement;
  int out_degree = 0;
  std::vector<GraphIndex> graphs;  // indexed by cluster id

  int dim() const { return centroids.dim; }
  int clusters() const { return centroids.count(); }
  std::size_t total_vectors() const;
};

void validate(const BuiltIndex& index);

BuiltIndex build_index(const Dataset& db, int clusters, int out_degree,
                       const ClusterTopology& topo, int kmeans_iters,
                       std::uint64_t seed, KmeansStats* stats = nullptr);

}  // namespace dvs
