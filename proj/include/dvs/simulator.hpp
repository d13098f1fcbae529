#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvs/cost_model.hpp"
#include "dvs/dataset.hpp"
#include "dvs/graph_index.hpp"
#include "dvs/index.hpp"
#include "dvs/router.hpp"

namespace dvs {

enum class Lane { compute, comm };
enum class Stage { kmeans, dispatch, search, combine };

const char* to_string(Lane lane);
const char* to_string(Stage stage);
Lane lane_of(Stage stage);  // kmeans/search -> compute, dispatch/combine -> comm
int stage_order(Stage stage);

struct Interval {
  int rank = 0;
  Lane lane = Lane::compute;
  Stage stage = Stage::kmeans;
  int microbatch = 0;
  double start = 0;
  double end = 0;
};

struct Timeline {
  std::vector<Interval> intervals;
  double makespan() const;
};

enum class PipelineMode { sequential, two_microbatch };

struct StageDurations {
  double kmeans = 0;
  double dispatch = 0;
  double search = 0;
  double combine = 0;

  double of(Stage stage) const;
};

// Single-rank schedule for the given per-microbatch stage durations.
//
// sequential: one serialized chain, microbatch-major.
// two_microbatch: two resource lanes (kmeans/search on compute, dispatch/
// combine on comm); each stage waits for the previous stage of its own
// microbatch; each lane runs its work in FIFO order of readiness, ties broken
// by (microbatch, stage order).
Timeline replay_schedule(std::span<const StageDurations> microbatches, PipelineMode mode);

// Checks per-(rank, lane) non-overlap and per-(rank, microbatch) stage
// dependencies from the interval list alone. Returns a description of the
// first violation, or nullopt if the timeline is legal.
std::optional<std::string> check_timeline(const Timeline& tl);

// Merge of up to fanout per-cluster top-k lists: dedup by id, truncate to k,
// sorted ascending (dist, id). Each partial list must already be sorted.
std::vector<ScoredId> combine_results(const std::vector<std::vector<ScoredId>>& partials,
                                      int k);

struct Microbatch {
  int origin_rank = 0;
  std::size_t query_begin = 0;
  std::size_t query_end = 0;
  StageDurations durations;
};

// modeled: search time from the cost-model traffic formula.
// measured: search time from the visited-vector counters of the actual runs.
enum class SearchPricing { modeled, measured };

struct PipelineOptions {
  PipelineMode mode = PipelineMode::two_microbatch;
  SearchPricing pricing = SearchPricing::modeled;
  int batch_index = 0;  // origin rank = batch_index mod ranks
};

struct PipelineResult {
  std::vector<std::vector<ScoredId>> hits;      // per query, ascending (dist, id)
  std::vector<std::vector<float>> hit_vectors;  // per query, hits[i].size() * dim floats
  std::vector<Microbatch> microbatches;
  Timeline timeline;
  double makespan = 0;
  std::uint64_t visited_total = 0;
};

// Full classify -> dispatch -> search -> combine pass over one query batch,
// split into two contiguous microbatches. Functional output is independent of
// mode, topology, and placement; only the timeline changes.
PipelineResult run_pipeline(const BuiltIndex& index, const Dataset& queries,
                            const SearchParams& params, int fanout,
                            const ClusterTopology& topo, const GpuSpec& gpu,
                            const ElementFormat& search_format,
                            const PipelineOptions& opts);

// [{"rank":..,"lane":..,"stage":..,"microbatch":..,"start":..,"end":..}, ...]
std::string timeline_to_json(const Timeline& tl);
// Header "rank,lane,stage,mb,start,end".
std::string timeline_to_csv(const Timeline& tl);

}  // namespace dvs
