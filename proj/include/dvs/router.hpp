#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dvs/dataset.hpp"
#include "dvs/hardware.hpp"
#include "dvs/kmeans.hpp"

namespace dvs {

struct ClusterTopology {
  int ranks = 16;
  int ranks_per_node = 8;
  LinkSpec links;

  int nodes() const { return ranks / ranks_per_node; }
  int node_of(int rank) const { return rank / ranks_per_node; }
};

void validate(const ClusterTopology& topo);

struct PlacementMap {
  std::vector<std::uint32_t> cluster_to_rank;
  int ranks = 0;

  int clusters() const { return static_cast<int>(cluster_to_rank.size()); }
};

// One routed (query, cluster) pair. The wire payload is the fp32 query vector
// plus a 16-byte routing header; byte accounting covers the payload only.
struct RoutedEntry {
  std::uint32_t query_id;
  std::uint32_t origin_rank;
  std::uint32_t cluster_id;
};

struct RoutedBatch {
  int dim = 0;
  std::vector<std::vector<RoutedEntry>> per_rank;  // indexed by destination rank

  std::size_t total_entries() const;
};

// Round-robin placement: cluster i -> rank i mod ranks. Requires
// clusters >= ranks so no rank is left empty.
PlacementMap place_clusters(int clusters, const ClusterTopology& topo);

// Endpoint batches are fed to origin ranks round-robin by batch index.
int origin_rank_for_batch(int batch_index, const ClusterTopology& topo);

// One entry per (query, assigned cluster), destination = placement[cluster].
// Traffic destined to the origin rank itself is kept and priced like any
// other intra-node transfer.
RoutedBatch route(const Assignment& assignment, const PlacementMap& placement,
                  int origin_rank, const Dataset& queries);

// (bytes_intra, bytes_inter): fp32 payload bytes split by whether origin and
// destination rank share a node.
std::pair<std::uint64_t, std::uint64_t> traffic_split(const RoutedBatch& routed,
                                                      const ClusterTopology& topo);

}  // namespace dvs
