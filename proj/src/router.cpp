#include "dvs/router.hpp"

#include <stdexcept>
#include <string>

#include "dvs/errors.hpp"

namespace dvs {

void validate(const ClusterTopology& topo) {
  if (topo.ranks < 1 || topo.ranks_per_node < 1) {
    throw std::invalid_argument("ClusterTopology: ranks and ranks_per_node must be >= 1");
  }
  if (topo.ranks % topo.ranks_per_node != 0) {
    throw std::invalid_argument("ClusterTopology: ranks (" + std::to_string(topo.ranks) +
                                ") not divisible by ranks_per_node (" +
                                std::to_string(topo.ranks_per_node) + ")");
  }
  validate(topo.links);
}

std::size_t RoutedBatch::total_entries() const {
  std::size_t total = 0;
  for (const auto& entries : per_rank) total += entries.size();
  return total;
}

PlacementMap place_clusters(int clusters, const ClusterTopology& topo) {
  validate(topo);
  if (clusters < topo.ranks) {
    throw std::invalid_argument("place_clusters: " + std::to_string(clusters) +
                                " clusters over " + std::to_string(topo.ranks) +
                                " ranks would leave a rank empty");
  }
  PlacementMap map;
  map.ranks = topo.ranks;
  map.cluster_to_rank.resize(static_cast<std::size_t>(clusters));
  for (int i = 0; i < clusters; ++i) {
    map.cluster_to_rank[static_cast<std::size_t>(i)] =
        static_cast<std::uint32_t>(i % topo.ranks);
  }
  return map;
}

int origin_rank_for_batch(int batch_index, const ClusterTopology& topo) {
  if (batch_index < 0) {
    throw std::invalid_argument("origin_rank_for_batch: negative batch index");
  }
  return batch_index % topo.ranks;
}

RoutedBatch route(const Assignment& assignment, const PlacementMap& placement,
                  int origin_rank, const Dataset& queries) {
  if (assignment.size() != queries.size()) {
    throw std::invalid_argument("route: assignment covers " +
                                std::to_string(assignment.size()) + " queries, batch has " +
                                std::to_string(queries.size()));
  }
  if (origin_rank < 0 || origin_rank >= placement.ranks) {
    throw std::invalid_argument("route: origin rank " + std::to_string(origin_rank) +
                                " outside 0.." + std::to_string(placement.ranks - 1));
  }
  RoutedBatch batch;
  batch.dim = queries.dim;
  batch.per_rank.resize(static_cast<std::size_t>(placement.ranks));
  for (std::size_t q = 0; q < assignment.size(); ++q) {
    for (const std::uint32_t cluster : assignment[q]) {
      if (cluster >= placement.cluster_to_rank.size()) {
        throw internal_error("route: cluster id " + std::to_string(cluster) +
                             " outside placement of " +
                             std::to_string(placement.cluster_to_rank.size()) + " clusters");
      }
      const std::uint32_t dest = placement.cluster_to_rank[cluster];
      batch.per_rank[dest].push_back({static_cast<std::uint32_t>(q),
                                      static_cast<std::uint32_t>(origin_rank), cluster});
    }
  }
  return batch;
}

std::pair<std::uint64_t, std::uint64_t> traffic_split(const RoutedBatch& routed,
                                                      const ClusterTopology& topo) {
  validate(topo);
  const std::uint64_t bytes_per_entry = static_cast<std::uint64_t>(routed.dim) * 4;
  std::uint64_t intra = 0;
  std::uint64_t inter = 0;
  for (std::size_t dest = 0; dest < routed.per_rank.size(); ++dest) {
    const int dest_node = topo.node_of(static_cast<int>(dest));
    for (const RoutedEntry& e : routed.per_rank[dest]) {
      if (topo.node_of(static_cast<int>(e.origin_rank)) == dest_node) {
        intra += bytes_per_entry;
      } else {
        inter += bytes_per_entry;
      }
    }
  }
  return {intra, inter};
}

}  // namespace dvs
