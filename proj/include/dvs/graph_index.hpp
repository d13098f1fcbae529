#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dvs/dataset.hpp"

namespace dvs {

// Fixed out-degree neighbor graph over one partition. Local ids are row
// indices into `vectors`; `global_ids` maps them back to database ids.
struct GraphIndex {
  Dataset vectors;
  std::vector<std::uint32_t> global_ids;
  int out_degree = 0;
  std::vector<std::uint32_t> adjacency;    // size() * out_degree, one row per node
  std::vector<std::uint32_t> entry_order;  // local ids ordered by distance to the partition mean

  std::size_t size() const { return vectors.size(); }
  std::span<const std::uint32_t> neighbors(std::uint32_t local) const {
    return {adjacency.data() + static_cast<std::size_t>(local) * out_degree,
            static_cast<std::size_t>(out_degree)};
  }
};

struct SearchParams {
  int iterations = 6;   // I
  int beam_width = 6;   // w
  int k = 10;
  int entry_count = 6;  // search entry nodes; conventionally beam_width
};

void validate(const SearchParams& p);

// Exact k-NN graph: row v holds the out_degree nearest other nodes, ties by
// lower id. Partitions with size <= out_degree repeat the (dist, id)-sorted
// neighbor list cyclically; a single-node partition pads with the node itself
// and the search loop never follows those edges.
GraphIndex build_graph(const Dataset& partition, std::vector<std::uint32_t> global_ids,
                       int out_degree);
GraphIndex build_graph(const Dataset& partition, int out_degree);

// Recomputes `entry_order` from the vectors; used after deserialization.
std::vector<std::uint32_t> compute_entry_order(const Dataset& partition);

struct SearchResult {
  std::vector<ScoredId> hits;  // global ids, ascending (dist, id)
  std::uint64_t visited = 0;   // vectors scored, entry nodes included
};

// Greedy beam search: start from entry_count precomputed entry nodes, then
// for exactly `iterations` rounds expand the beam_width best unexpanded
// candidates and score their unvisited neighbors. Candidate pool capacity is
// max(4k, 2*iterations*beam_width); eviction drops the worst (dist, id).
// Deterministic for fixed (g, query, p, seed); the seed is accepted for
// interface stability but entry selection is already deterministic.
SearchResult beam_search_stats(const GraphIndex& g, std::span<const float> query,
                               const SearchParams& p, std::uint64_t seed = 0);

std::vector<ScoredId> beam_search(const GraphIndex& g, std::span<const float> query,
                                  const SearchParams& p, std::uint64_t seed = 0);

std::uint64_t visited_count(const GraphIndex& g, std::span<const float> query,
                            const SearchParams& p);

}  // namespace dvs
