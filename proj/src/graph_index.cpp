#include "dvs/graph_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dvs/distance.hpp"
#include "dvs/errors.hpp"

namespace dvs {

void validate(const SearchParams& p) {
  if (p.iterations < 1 || p.beam_width < 1 || p.k < 1 || p.entry_count < 1) {
    throw std::invalid_argument(
        "SearchParams: iterations, beam_width, k and entry_count must all be >= 1");
  }
}

std::vector<std::uint32_t> compute_entry_order(const Dataset& partition) {
  const std::size_t n = partition.size();
  const int dim = partition.dim;
  std::vector<float> mean(static_cast<std::size_t>(dim), 0.0f);
  {
    std::vector<double> sums(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const float> v = partition[i];
      for (int j = 0; j < dim; ++j) sums[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < dim; ++j) {
      mean[static_cast<std::size_t>(j)] =
          static_cast<float>(sums[static_cast<std::size_t>(j)] / static_cast<double>(n));
    }
  }
  std::vector<ScoredId> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = {static_cast<std::uint32_t>(i), squared_l2(partition[i], mean)};
  }
  std::sort(order.begin(), order.end(), scored_less);
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = order[i].id;
  return ids;
}

GraphIndex build_graph(const Dataset& partition, std::vector<std::uint32_t> global_ids,
                       int out_degree) {
  validate(partition);
  const std::size_t n = partition.size();
  if (n == 0) {
    throw std::invalid_argument("build_graph: empty partition");
  }
  if (out_degree < 1) {
    throw std::invalid_argument("build_graph: out_degree must be >= 1");
  }
  if (global_ids.size() != n) {
    throw std::invalid_argument("build_graph: global id count " +
                                std::to_string(global_ids.size()) + " != partition size " +
                                std::to_string(n));
  }

  GraphIndex g;
  g.vectors = partition;
  g.global_ids = std::move(global_ids);
  g.out_degree = out_degree;
  g.adjacency.resize(n * static_cast<std::size_t>(out_degree));

  const std::size_t dg = static_cast<std::size_t>(out_degree);
  std::vector<ScoredId> others;
  others.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::uint32_t* row = g.adjacency.data() + v * dg;
    if (n == 1) {
      // Lone vector: no other node exists, pad with the node itself. The
      // search loop never rescores a visited node, so these edges are inert.
      std::fill(row, row + dg, static_cast<std::uint32_t>(0));
      continue;
    }
    others.clear();
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      others.push_back({static_cast<std::uint32_t>(u), squared_l2(partition[v], partition[u])});
    }
    if (others.size() > dg) {
      std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(dg),
                        others.end(), scored_less);
      for (std::size_t j = 0; j < dg; ++j) row[j] = others[j].id;
    } else {
      // Tiny partition: all other nodes in (dist, id) order, repeated
      // cyclically until the row is full.
      std::sort(others.begin(), others.end(), scored_less);
      for (std::size_t j = 0; j < dg; ++j) row[j] = others[j % others.size()].id;
    }
  }
  g.entry_order = compute_entry_order(partition);
  return g;
}

GraphIndex build_graph(const Dataset& partition, int out_degree) {
  std::vector<std::uint32_t> ids(partition.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return build_graph(partition, std::move(ids), out_degree);
}

SearchResult beam_search_stats(const GraphIndex& g, std::span<const float> query,
                               const SearchParams& p, std::uint64_t /*seed*/) {
  validate(p);
  const std::size_t n = g.size();
  if (n == 0) {
    throw std::invalid_argument("beam_search: empty graph");
  }
  if (static_cast<int>(query.size()) != g.vectors.dim) {
    throw std::invalid_argument("beam_search: query dim " + std::to_string(query.size()) +
                                " != index dim " + std::to_string(g.vectors.dim));
  }

  struct Candidate {
    float dist;
    std::uint32_t local;
    bool expanded;
  };
  auto cand_less = [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.local < b.local;
  };

  const std::size_t cap = std::max<std::size_t>(
      4 * static_cast<std::size_t>(p.k),
      2 * static_cast<std::size_t>(p.iterations) * static_cast<std::size_t>(p.beam_width));

  std::vector<Candidate> pool;
  pool.reserve(cap + static_cast<std::size_t>(p.beam_width) * g.out_degree);
  std::unordered_set<std::uint32_t> visited;
  visited.reserve(cap * 2);
  std::uint64_t scored = 0;

  auto score = [&](std::uint32_t local) {
    ++scored;
    return squared_l2(query, g.vectors[local]);
  };
  auto shrink = [&]() {
    std::sort(pool.begin(), pool.end(), cand_less);
    if (pool.size() > cap) pool.resize(cap);
  };

  const std::size_t entries = std::min<std::size_t>(static_cast<std::size_t>(p.entry_count), n);
  for (std::size_t i = 0; i < entries; ++i) {
    const std::uint32_t local = g.entry_order[i];
    visited.insert(local);
    pool.push_back({score(local), local, false});
  }
  shrink();

  std::vector<std::size_t> frontier;
  for (int iter = 0; iter < p.iterations; ++iter) {
    frontier.clear();
    for (std::size_t i = 0; i < pool.size() && frontier.size() < static_cast<std::size_t>(p.beam_width); ++i) {
      if (!pool[i].expanded) frontier.push_back(i);
    }
    if (frontier.empty()) break;  // remaining iterations would be no-ops
    for (const std::size_t fi : frontier) pool[fi].expanded = true;
    const std::size_t before = pool.size();
    for (const std::size_t fi : frontier) {
      for (const std::uint32_t nb : g.neighbors(pool[fi].local)) {
        if (visited.insert(nb).second) {
          pool.push_back({score(nb), nb, false});
        }
      }
    }
    if (pool.size() != before) shrink();
  }

  SearchResult result;
  result.visited = scored;
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(p.k), pool.size());
  result.hits.reserve(want);
  // Pool order is (dist, local id); report global ids re-sorted under the
  // same rule in case the local-to-global map is not monotone.
  std::vector<ScoredId> all;
  all.reserve(pool.size());
  for (const Candidate& c : pool) {
    all.push_back({g.global_ids[c.local], c.dist});
  }
  std::sort(all.begin(), all.end(), scored_less);
  result.hits.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want));
  return result;
}

std::vector<ScoredId> beam_search(const GraphIndex& g, std::span<const float> query,
                                  const SearchParams& p, std::uint64_t seed) {
  return beam_search_stats(g, query, p, seed).hits;
}

std::uint64_t visited_count(const GraphIndex& g, std::span<const float> query,
                            const SearchParams& p) {
  return beam_search_stats(g, query, p).visited;
}

}  // namespace dvs
