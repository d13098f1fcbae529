#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "dvs/errors.hpp"
#include "dvs/router.hpp"
#include "support/synthetic.hpp"

using namespace dvs;
namespace ts = dvs::testsupport;

namespace {

ClusterTopology topo_16x8() {
  ClusterTopology topo;
  topo.ranks = 16;
  topo.ranks_per_node = 8;
  return topo;
}

}  // namespace

TEST_CASE("place_clusters identity when clusters equal ranks") {
  const PlacementMap map = place_clusters(16, topo_16x8());
  for (std::uint32_t i = 0; i < 16; ++i) CHECK(map.cluster_to_rank[i] == i);
}

TEST_CASE("place_clusters spreads 4096 clusters over 16 ranks evenly") {
  const PlacementMap map = place_clusters(4096, topo_16x8());
  std::vector<int> owned(16, 0);
  for (const std::uint32_t r : map.cluster_to_rank) ++owned[r];
  for (const int count : owned) CHECK(count == 256);
}

TEST_CASE("place_clusters mod rule with a remainder") {
  const PlacementMap map = place_clusters(17, topo_16x8());
  std::vector<std::uint32_t> rank0;
  for (std::uint32_t c = 0; c < 17; ++c) {
    if (map.cluster_to_rank[c] == 0) rank0.push_back(c);
  }
  CHECK(rank0 == std::vector<std::uint32_t>{0, 16});
}

TEST_CASE("place_clusters refuses an empty rank") {
  CHECK_THROWS_AS(place_clusters(15, topo_16x8()), std::invalid_argument);
}

TEST_CASE("origin ranks rotate round-robin by batch index") {
  ClusterTopology topo;
  topo.ranks = 4;
  topo.ranks_per_node = 2;
  for (int b = 0; b < 8; ++b) CHECK(origin_rank_for_batch(b, topo) == b % 4);
  CHECK_THROWS_AS(origin_rank_for_batch(-1, topo), std::invalid_argument);
}

TEST_CASE("route keeps self-destined traffic on the wire") {
  ClusterTopology topo;
  topo.ranks = 4;
  topo.ranks_per_node = 2;
  const PlacementMap map = place_clusters(4, topo);
  const Dataset queries = ts::random_dataset(5, 3, 71);
  // All queries assigned to cluster 0, which rank 0 owns; origin is rank 0.
  Assignment asn(queries.size(), std::vector<std::uint32_t>{0});
  const RoutedBatch routed = route(asn, map, 0, queries);
  CHECK(routed.per_rank[0].size() == 5);
  CHECK(routed.total_entries() == 5);
  const auto [intra, inter] = traffic_split(routed, topo);
  CHECK(intra == 5ull * 3 * 4);  // still priced as intra-node transfers
  CHECK(inter == 0);
}

TEST_CASE("route emits one entry per (query, cluster) pair") {
  ClusterTopology topo;
  topo.ranks = 8;
  topo.ranks_per_node = 4;
  const PlacementMap map = place_clusters(32, topo);
  const Dataset queries = ts::random_dataset(40, 4, 72);
  std::mt19937_64 rng(73);
  Assignment asn(queries.size());
  for (auto& clusters : asn) {
    std::set<std::uint32_t> picks;
    while (picks.size() < 3) picks.insert(static_cast<std::uint32_t>(rng() % 32));
    clusters.assign(picks.begin(), picks.end());
  }
  const RoutedBatch routed = route(asn, map, 2, queries);
  CHECK(routed.total_entries() == 40 * 3);

  // Lossless: regrouping by query id reconstructs each top-c cluster set.
  std::map<std::uint32_t, std::set<std::uint32_t>> regrouped;
  for (const auto& entries : routed.per_rank) {
    for (const RoutedEntry& e : entries) {
      CHECK(e.origin_rank == 2);
      CHECK(regrouped[e.query_id].insert(e.cluster_id).second);  // exactly once
    }
  }
  for (std::size_t q = 0; q < asn.size(); ++q) {
    const std::set<std::uint32_t> want(asn[q].begin(), asn[q].end());
    CHECK(regrouped[static_cast<std::uint32_t>(q)] == want);
  }
}

TEST_CASE("route validates its inputs") {
  ClusterTopology topo;
  topo.ranks = 2;
  topo.ranks_per_node = 1;
  const PlacementMap map = place_clusters(2, topo);
  const Dataset queries = ts::random_dataset(3, 2, 74);
  Assignment short_asn(2, std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(route(short_asn, map, 0, queries), std::invalid_argument);

  Assignment bad_cluster(3, std::vector<std::uint32_t>{5});
  CHECK_THROWS_AS(route(bad_cluster, map, 0, queries), internal_error);

  Assignment ok(3, std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(route(ok, map, 7, queries), std::invalid_argument);
}

TEST_CASE("traffic_split accounts every payload byte") {
  const ClusterTopology topo = topo_16x8();
  const PlacementMap map = place_clusters(64, topo);
  const Dataset queries = ts::random_dataset(100, 6, 75);
  std::mt19937_64 rng(76);
  Assignment asn(queries.size());
  for (auto& clusters : asn) {
    clusters = {static_cast<std::uint32_t>(rng() % 64),
                static_cast<std::uint32_t>(rng() % 64)};
    if (clusters[0] == clusters[1]) clusters.pop_back();
  }
  const RoutedBatch routed = route(asn, map, 5, queries);
  const auto [intra, inter] = traffic_split(routed, topo);
  CHECK(intra + inter == routed.total_entries() * 6 * 4);
}

TEST_CASE("single inter-node query moves dim * 4 bytes") {
  const ClusterTopology topo = topo_16x8();
  const PlacementMap map = place_clusters(16, topo);
  Dataset query;
  query.dim = 1536;
  query.data.assign(1536, 0.25f);
  // Cluster 15 lives on rank 15 (second node); origin rank 0 (first node).
  Assignment asn = {std::vector<std::uint32_t>{15}};
  const RoutedBatch routed = route(asn, map, 0, query);
  const auto [intra, inter] = traffic_split(routed, topo);
  CHECK(intra == 0);
  CHECK(inter == 6144);
}

TEST_CASE("uniform destinations converge to the analytic intra fraction") {
  const ClusterTopology topo = topo_16x8();
  const PlacementMap map = place_clusters(16, topo);
  const std::size_t bs = 20000;
  Dataset queries;
  queries.dim = 4;
  queries.data.assign(bs * 4, 0.0f);
  std::mt19937_64 rng(77);
  Assignment asn(bs);
  for (auto& clusters : asn) clusters = {static_cast<std::uint32_t>(rng() % 16)};
  const RoutedBatch routed = route(asn, map, 3, queries);
  const auto [intra, inter] = traffic_split(routed, topo);
  const double fraction =
      static_cast<double>(intra) / static_cast<double>(intra + inter);
  CHECK(fraction == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +/- 0.05
}

TEST_CASE("topology validation") {
  ClusterTopology topo;
  topo.ranks = 10;
  topo.ranks_per_node = 4;
  CHECK_THROWS_AS(validate(topo), std::invalid_argument);
  topo.ranks_per_node = 5;
  CHECK_NOTHROW(validate(topo));
  topo.links.rdma_bandwidth = 0;
  CHECK_THROWS_AS(validate(topo), std::invalid_argument);
}
