#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "dvs/dataset.hpp"
#include "dvs/graph_index.hpp"
#include "dvs/topk.hpp"
#include "support/synthetic.hpp"

using namespace dvs;
namespace ts = dvs::testsupport;

namespace {

Dataset from_rows(int dim, std::initializer_list<std::vector<float>> rows) {
  Dataset ds;
  ds.dim = dim;
  for (const auto& r : rows) ds.data.insert(ds.data.end(), r.begin(), r.end());
  return ds;
}

double recall_against_brute(const std::vector<ScoredId>& hits,
                            const std::vector<ScoredId>& truth, int k) {
  return recall_at_k(hits, truth, k);
}

}  // namespace

TEST_CASE("build_graph on collinear points") {
  const Dataset part = from_rows(1, {{0}, {1}, {10}});
  const GraphIndex g = build_graph(part, 1);
  CHECK(g.neighbors(0)[0] == 1);
  CHECK(g.neighbors(1)[0] == 0);
  CHECK(g.neighbors(2)[0] == 1);
}

TEST_CASE("build_graph pads tiny partitions cyclically") {
  const Dataset part = from_rows(2, {{0, 0}, {1, 1}});
  const GraphIndex g = build_graph(part, 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(g.neighbors(0)[static_cast<std::size_t>(j)] == 1);
    CHECK(g.neighbors(1)[static_cast<std::size_t>(j)] == 0);
  }
}

TEST_CASE("build_graph rows are exact nearest neighbors") {
  const Dataset part = ts::random_dataset(200, 8, 51);
  const GraphIndex g = build_graph(part, 8);
  for (std::uint32_t v = 0; v < 200; v += 17) {
    // Brute force over the partition with row v removed; ids >= v shift by one.
    Dataset rest;
    rest.dim = part.dim;
    for (std::size_t u = 0; u < part.size(); ++u) {
      if (u == v) continue;
      const std::span<const float> row = part[u];
      rest.data.insert(rest.data.end(), row.begin(), row.end());
    }
    const auto want = brute_force_topk(rest, part[v], 8);
    const std::span<const std::uint32_t> got = g.neighbors(v);
    for (std::size_t j = 0; j < 8; ++j) {
      const std::uint32_t mapped = want[j].id < v ? want[j].id : want[j].id + 1;
      CHECK(got[j] == mapped);
    }
  }
}

TEST_CASE("build_graph rejects an empty partition") {
  Dataset empty;
  empty.dim = 4;
  CHECK_THROWS_AS(build_graph(empty, 4), std::invalid_argument);
}

TEST_CASE("single-vector partition is searchable") {
  const Dataset part = from_rows(3, {{1, 2, 3}});
  const GraphIndex g = build_graph(part, std::vector<std::uint32_t>{42}, 3);
  REQUIRE(g.adjacency.size() == 3);

  SearchParams p;
  p.iterations = 2;
  p.beam_width = 2;
  p.k = 5;
  p.entry_count = 1;
  const std::vector<float> q = {0, 0, 0};
  const auto hits = beam_search(g, q, p);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].id == 42);
}

TEST_CASE("no self-loops for partitions with at least two nodes") {
  const Dataset part = ts::random_dataset(30, 4, 52);
  const GraphIndex g = build_graph(part, 6);
  for (std::uint32_t v = 0; v < 30; ++v) {
    for (const std::uint32_t nb : g.neighbors(v)) CHECK(nb != v);
  }
}

TEST_CASE("beam search over a complete graph equals brute force") {
  const Dataset part = ts::random_dataset(9, 5, 53);
  const GraphIndex g = build_graph(part, 12);  // size <= out_degree + 1
  SearchParams p;
  p.iterations = 1;
  p.beam_width = 1;
  p.k = 5;
  p.entry_count = 1;
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<float> q(5);
    for (float& x : q) x = static_cast<float>(ts::uniform(rng, -1, 1));
    const auto hits = beam_search(g, q, p);
    const auto want = brute_force_topk(part, q, 5);
    REQUIRE(hits.size() == want.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].id == want[i].id);
      CHECK(hits[i].dist == want[i].dist);
    }
  }
}

TEST_CASE("beam search finds a stored vector at rank one") {
  const Dataset part = ts::random_dataset(500, 8, 55);
  const GraphIndex g = build_graph(part, 32);
  SearchParams p;
  p.iterations = 4;
  p.beam_width = 4;
  p.k = 3;
  p.entry_count = 4;  // 4 * 4 * 32 = 512 >= 500
  const auto hits = beam_search(g, part[123], p);
  REQUIRE(!hits.empty());
  CHECK(hits[0].id == 123);
  CHECK(hits[0].dist == 0.0f);
}

TEST_CASE("visited counter honors the traffic bound") {
  const Dataset part = ts::random_dataset(2000, 6, 56);
  const GraphIndex g = build_graph(part, 32);
  SearchParams p;
  p.iterations = 6;
  p.beam_width = 6;
  p.k = 10;
  p.entry_count = 6;
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<float> q(6);
    for (float& x : q) x = static_cast<float>(ts::uniform(rng, -1, 1));
    const std::uint64_t visited = visited_count(g, q, p);
    CHECK(visited <= 6 * 6 * 32 + p.entry_count);  // 1152 + entries
    CHECK(visited >= static_cast<std::uint64_t>(p.entry_count));
  }
}

TEST_CASE("visited counter cannot exceed the partition size") {
  const Dataset part = ts::random_dataset(10, 3, 58);
  const GraphIndex g = build_graph(part, 16);
  SearchParams p;
  p.iterations = 5;
  p.beam_width = 5;
  p.k = 5;
  p.entry_count = 3;
  const std::vector<float> q = {0, 0, 0};
  const std::uint64_t visited = visited_count(g, q, p);
  CHECK(visited <= 10);
  CHECK(visited <= 9 + static_cast<std::uint64_t>(p.entry_count));
}

TEST_CASE("single expansion scores at most out_degree plus entries") {
  const Dataset part = ts::random_dataset(300, 4, 59);
  const GraphIndex g = build_graph(part, 7);
  SearchParams p;
  p.iterations = 1;
  p.beam_width = 1;
  p.k = 2;
  p.entry_count = 2;
  const std::vector<float> q = {0.3f, -0.2f, 0.9f, 0.5f};
  CHECK(visited_count(g, q, p) <= 7 + 2);
}

TEST_CASE("recall never drops as iterations grow") {
  const Dataset part = ts::random_dataset(400, 8, 60);
  const GraphIndex g = build_graph(part, 8);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<float> q(8);
    for (float& x : q) x = static_cast<float>(ts::uniform(rng, -1, 1));
    const auto truth = brute_force_topk(part, q, 10);
    double prev = -1;
    for (int iters = 1; iters <= 8; ++iters) {
      SearchParams p;
      p.iterations = iters;
      p.beam_width = 2;
      p.k = 10;
      p.entry_count = 2;
      const double r = recall_against_brute(beam_search(g, q, p), truth, 10);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("beam search is deterministic and stays inside the partition") {
  const Dataset part = ts::random_dataset(250, 6, 62);
  std::vector<std::uint32_t> globals(250);
  for (std::uint32_t i = 0; i < 250; ++i) globals[i] = 1000 + i * 3;
  const GraphIndex g = build_graph(part, globals, 8);
  SearchParams p;
  p.iterations = 3;
  p.beam_width = 4;
  p.k = 12;
  p.entry_count = 4;
  const std::vector<float> q = {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f};

  const SearchResult a = beam_search_stats(g, q, p, 1);
  const SearchResult b = beam_search_stats(g, q, p, 99);  // seed has no effect
  CHECK(a.visited == b.visited);
  REQUIRE(a.hits.size() == b.hits.size());
  const std::set<std::uint32_t> valid(globals.begin(), globals.end());
  std::set<std::uint32_t> unique;
  for (std::size_t i = 0; i < a.hits.size(); ++i) {
    CHECK(a.hits[i] == b.hits[i]);
    CHECK(valid.count(a.hits[i].id) == 1);
    unique.insert(a.hits[i].id);
    if (i > 0) CHECK(!scored_less(a.hits[i], a.hits[i - 1]));
  }
  CHECK(unique.size() == a.hits.size());
}

TEST_CASE("search params are validated") {
  const Dataset part = ts::random_dataset(10, 2, 63);
  const GraphIndex g = build_graph(part, 3);
  SearchParams p;
  p.iterations = 0;
  const std::vector<float> q = {0, 0};
  CHECK_THROWS_AS(beam_search(g, q, p), std::invalid_argument);
  p.iterations = 1;
  p.k = 0;
  CHECK_THROWS_AS(beam_search(g, q, p), std::invalid_argument);
  p.k = 1;
  const std::vector<float> wrong = {0, 0, 0};
  CHECK_THROWS_AS(beam_search(g, wrong, p), std::invalid_argument);
}
