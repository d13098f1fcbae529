#include "dvs/index.hpp"

#include <stdexcept>
#include <string>

#include "dvs/errors.hpp"

namespace dvs {

std::size_t BuiltIndex::total_vectors() const {
  std::size_t total = 0;
  for (const GraphIndex& g : graphs) total += g.size();
  return total;
}

void validate(const BuiltIndex& index) {
  const int c = index.clusters();
  if (c < 1 || index.graphs.empty()) {
    throw std::invalid_argument("BuiltIndex: index is not built");
  }
  if (static_cast<int>(index.graphs.size()) != c) {
    throw std::invalid_argument("BuiltIndex: " + std::to_string(index.graphs.size()) +
                                " graphs for " + std::to_string(c) + " clusters");
  }
  if (index.placement.clusters() != c) {
    throw std::invalid_argument("BuiltIndex: placement covers " +
                                std::to_string(index.placement.clusters()) +
                                " clusters, expected " + std::to_string(c));
  }
  for (const GraphIndex& g : index.graphs) {
    if (g.vectors.dim != index.centroids.dim) {
      throw std::invalid_argument("BuiltIndex: graph dim mismatch");
    }
    if (g.size() == 0) {
      throw std::invalid_argument("BuiltIndex: empty partition");
    }
    if (g.out_degree != index.out_degree) {
      throw std::invalid_argument("BuiltIndex: graph out-degree mismatch");
    }
  }
}

BuiltIndex build_index(const Dataset& db, int clusters, int out_degree,
                       const ClusterTopology& topo, int kmeans_iters,
                       std::uint64_t seed, KmeansStats* stats) {
  validate(db);
  validate(topo);
  if (clusters < topo.ranks) {
    throw std::invalid_argument("build_index: clusters (" + std::to_string(clusters) +
                                ") must be >= ranks (" + std::to_string(topo.ranks) + ")");
  }

  BuiltIndex index;
  index.centroids = kmeans_train(db, clusters, kmeans_iters, seed, stats);
  index.placement = place_clusters(clusters, topo);
  index.out_degree = out_degree;

  const auto parts = partition_database(db, index.centroids);
  index.graphs.reserve(parts.size());
  for (const auto& ids : parts) {
    Dataset part;
    part.dim = db.dim;
    part.data.reserve(ids.size() * static_cast<std::size_t>(db.dim));
    for (const std::uint32_t id : ids) {
      const std::span<const float> v = db[id];
      part.data.insert(part.data.end(), v.begin(), v.end());
    }
    index.graphs.push_back(build_graph(part, ids, out_degree));
  }
  validate(index);
  return index;
}

}  // namespace dvs
