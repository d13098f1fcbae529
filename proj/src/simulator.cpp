#include "dvs/simulator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>

#include "json.hpp"

#include "dvs/errors.hpp"

namespace dvs {

namespace {

constexpr Stage kStages[4] = {Stage::kmeans, Stage::dispatch, Stage::search,
                              Stage::combine};

std::string fmt_time(double t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", t);
  return buf;
}

}  // namespace

const char* to_string(Lane lane) {
  return lane == Lane::compute ? "compute" : "comm";
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kmeans: return "kmeans";
    case Stage::dispatch: return "dispatch";
    case Stage::search: return "search";
    case Stage::combine: return "combine";
  }
  return "?";
}

Lane lane_of(Stage stage) {
  return (stage == Stage::kmeans || stage == Stage::search) ? Lane::compute : Lane::comm;
}

int stage_order(Stage stage) { return static_cast<int>(stage); }

double Timeline::makespan() const {
  double m = 0;
  for (const Interval& iv : intervals) m = std::max(m, iv.end);
  return m;
}

double StageDurations::of(Stage stage) const {
  switch (stage) {
    case Stage::kmeans: return kmeans;
    case Stage::dispatch: return dispatch;
    case Stage::search: return search;
    case Stage::combine: return combine;
  }
  return 0;
}

Timeline replay_schedule(std::span<const StageDurations> microbatches, PipelineMode mode) {
  for (const StageDurations& d : microbatches) {
    for (const Stage s : kStages) {
      if (d.of(s) < 0) {
        throw std::invalid_argument("replay_schedule: negative stage duration");
      }
    }
  }
  Timeline tl;
  const int m = static_cast<int>(microbatches.size());
  tl.intervals.reserve(static_cast<std::size_t>(m) * 4);

  if (mode == PipelineMode::sequential) {
    // One serialized chain, microbatch-major.
    double t = 0;
    for (int mb = 0; mb < m; ++mb) {
      for (const Stage s : kStages) {
        const double d = microbatches[static_cast<std::size_t>(mb)].of(s);
        tl.intervals.push_back({0, lane_of(s), s, mb, t, t + d});
        t += d;
      }
    }
    return tl;
  }

  // Two-lane schedule. Tasks are (microbatch, stage) pairs; each task waits
  // for the previous stage of its microbatch, then queues on its lane. Lanes
  // run tasks in FIFO order of readiness, ties by (microbatch, stage order).
  struct Task {
    int mb;
    int stage;
    double dur;
    double ready = -1;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(m) * 4);
  for (int mb = 0; mb < m; ++mb) {
    for (int s = 0; s < 4; ++s) {
      tasks.push_back({mb, s, microbatches[static_cast<std::size_t>(mb)].of(kStages[s])});
    }
  }
  auto task_id = [](int mb, int s) { return mb * 4 + s; };

  // Queue/event ordering key: (time, microbatch, stage).
  using Key = std::tuple<double, int, int>;
  std::set<Key> queue[2];
  std::set<Key> finish_events;  // running tasks keyed by finish time
  double lane_free[2] = {0, 0};
  bool lane_busy[2] = {false, false};

  auto start_task = [&](int lane, int mb, int s) {
    Task& t = tasks[static_cast<std::size_t>(task_id(mb, s))];
    const double start = std::max(lane_free[lane], t.ready);
    tl.intervals.push_back({0, static_cast<Lane>(lane), kStages[s], mb, start, start + t.dur});
    lane_free[lane] = start + t.dur;
    lane_busy[lane] = true;
    finish_events.insert({start + t.dur, mb, s});
  };

  auto kick_lane = [&](int lane) {
    if (!lane_busy[lane] && !queue[lane].empty()) {
      const auto [ready, mb, s] = *queue[lane].begin();
      static_cast<void>(ready);
      queue[lane].erase(queue[lane].begin());
      start_task(lane, mb, s);
    }
  };

  for (int mb = 0; mb < m; ++mb) {
    Task& t = tasks[static_cast<std::size_t>(task_id(mb, 0))];
    t.ready = 0;
    queue[static_cast<int>(lane_of(Stage::kmeans))].insert({0.0, mb, 0});
  }
  kick_lane(static_cast<int>(Lane::compute));
  kick_lane(static_cast<int>(Lane::comm));

  while (!finish_events.empty()) {
    const auto [t_fin, mb, s] = *finish_events.begin();
    finish_events.erase(finish_events.begin());
    const int lane = static_cast<int>(lane_of(kStages[s]));
    lane_busy[lane] = false;
    if (s + 1 < 4) {
      Task& succ = tasks[static_cast<std::size_t>(task_id(mb, s + 1))];
      succ.ready = t_fin;
      const int succ_lane = static_cast<int>(lane_of(kStages[s + 1]));
      queue[succ_lane].insert({t_fin, mb, s + 1});
      kick_lane(succ_lane);
    }
    kick_lane(lane);
  }

  // Canonical interval order for stable output.
  std::sort(tl.intervals.begin(), tl.intervals.end(),
            [](const Interval& a, const Interval& b) {
              if (a.start != b.start) return a.start < b.start;
              if (a.microbatch != b.microbatch) return a.microbatch < b.microbatch;
              return stage_order(a.stage) < stage_order(b.stage);
            });
  return tl;
}

std::optional<std::string> check_timeline(const Timeline& tl) {
  // Per-(rank, lane) non-overlap.
  std::map<std::pair<int, int>, std::vector<const Interval*>> lanes;
  for (const Interval& iv : tl.intervals) {
    if (iv.end < iv.start) {
      return "interval with end < start on rank " + std::to_string(iv.rank);
    }
    lanes[{iv.rank, static_cast<int>(iv.lane)}].push_back(&iv);
  }
  for (auto& [key, ivs] : lanes) {
    std::sort(ivs.begin(), ivs.end(), [](const Interval* a, const Interval* b) {
      if (a->start != b->start) return a->start < b->start;
      return a->end < b->end;
    });
    for (std::size_t i = 1; i < ivs.size(); ++i) {
      if (ivs[i]->start < ivs[i - 1]->end) {
        return "overlap on rank " + std::to_string(key.first) + " lane " +
               std::string(to_string(static_cast<Lane>(key.second))) + " at t=" +
               std::to_string(ivs[i]->start);
      }
    }
  }
  // Per-(rank, microbatch) stage dependencies.
  std::map<std::tuple<int, int, int>, const Interval*> by_stage;
  for (const Interval& iv : tl.intervals) {
    const auto key = std::make_tuple(iv.rank, iv.microbatch, stage_order(iv.stage));
    if (by_stage.count(key)) {
      return "duplicate stage interval for rank " + std::to_string(iv.rank) +
             " microbatch " + std::to_string(iv.microbatch);
    }
    by_stage[key] = &iv;
  }
  for (const auto& [key, iv] : by_stage) {
    const auto [rank, mb, s] = key;
    if (s == 0) continue;
    const auto prev = by_stage.find(std::make_tuple(rank, mb, s - 1));
    if (prev == by_stage.end()) {
      return "missing predecessor stage for rank " + std::to_string(rank) +
             " microbatch " + std::to_string(mb);
    }
    if (iv->start < prev->second->end) {
      return "dependency violation: " + std::string(to_string(iv->stage)) +
             " of microbatch " + std::to_string(mb) + " starts before " +
             std::string(to_string(prev->second->stage)) + " ends";
    }
  }
  return std::nullopt;
}

std::vector<ScoredId> combine_results(const std::vector<std::vector<ScoredId>>& partials,
                                      int k) {
  if (k < 1) {
    throw std::invalid_argument("combine_results: k must be >= 1");
  }
  std::vector<ScoredId> merged;
  for (const auto& part : partials) {
    for (std::size_t i = 1; i < part.size(); ++i) {
      if (scored_less(part[i], part[i - 1])) {
        throw internal_error("combine_results: partial list not sorted by (dist, id)");
      }
    }
    merged.insert(merged.end(), part.begin(), part.end());
  }
  std::sort(merged.begin(), merged.end(), scored_less);
  std::vector<ScoredId> out;
  out.reserve(static_cast<std::size_t>(k));
  std::unordered_set<std::uint32_t> seen;
  for (const ScoredId& s : merged) {
    if (!seen.insert(s.id).second) continue;
    out.push_back(s);
    if (out.size() == static_cast<std::size_t>(k)) break;
  }
  return out;
}

PipelineResult run_pipeline(const BuiltIndex& index, const Dataset& queries,
                            const SearchParams& params, int fanout,
                            const ClusterTopology& topo, const GpuSpec& gpu,
                            const ElementFormat& search_format,
                            const PipelineOptions& opts) {
  validate(index);
  validate(queries);
  validate(params);
  validate(topo);
  validate(gpu);
  validate(search_format);
  if (queries.dim != index.dim()) {
    throw std::invalid_argument("run_pipeline: query dim " + std::to_string(queries.dim) +
                                " != index dim " + std::to_string(index.dim()));
  }
  if (fanout < 1 || fanout > index.clusters()) {
    throw std::invalid_argument("run_pipeline: fanout " + std::to_string(fanout) +
                                " out of range for " + std::to_string(index.clusters()) +
                                " clusters");
  }
  if (index.placement.ranks != topo.ranks) {
    throw std::invalid_argument("run_pipeline: placement built for " +
                                std::to_string(index.placement.ranks) +
                                " ranks, topology has " + std::to_string(topo.ranks));
  }
  const std::size_t n = queries.size();
  if (opts.mode == PipelineMode::two_microbatch && n < 2) {
    throw std::invalid_argument("run_pipeline: two_microbatch mode needs >= 2 queries");
  }

  // global id -> (cluster, local) lookup; partitions cover the ids densely.
  const std::size_t total = index.total_vectors();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> locator(
      total, {UINT32_MAX, UINT32_MAX});
  for (std::size_t cl = 0; cl < index.graphs.size(); ++cl) {
    const GraphIndex& g = index.graphs[cl];
    for (std::size_t local = 0; local < g.global_ids.size(); ++local) {
      const std::uint32_t gid = g.global_ids[local];
      if (gid >= total || locator[gid].first != UINT32_MAX) {
        throw internal_error("run_pipeline: partitions do not form a dense id cover");
      }
      locator[gid] = {static_cast<std::uint32_t>(cl), static_cast<std::uint32_t>(local)};
    }
  }

  PipelineResult result;
  result.hits.resize(n);
  result.hit_vectors.resize(n);

  const int origin = origin_rank_for_batch(opts.batch_index, topo);
  const std::size_t mid = (n + 1) / 2;
  const std::array<std::pair<std::size_t, std::size_t>, 2> ranges = {
      {{0, mid}, {mid, n}}};

  std::vector<StageDurations> durations(2);
  result.microbatches.resize(2);

  for (int mb = 0; mb < 2; ++mb) {
    const auto [begin, end] = ranges[static_cast<std::size_t>(mb)];
    const std::size_t count = end - begin;
    Microbatch& info = result.microbatches[static_cast<std::size_t>(mb)];
    info.origin_rank = origin;
    info.query_begin = begin;
    info.query_end = end;

    std::uint64_t mb_visited = 0;
    if (count > 0) {
      const Dataset mbq = slice(queries, begin, end);
      const Assignment assignment = assign_top_c(index.centroids, mbq, fanout);
      const RoutedBatch routed = route(assignment, index.placement, origin, mbq);

      std::vector<std::vector<std::vector<ScoredId>>> partials(count);
      for (const auto& entries : routed.per_rank) {
        for (const RoutedEntry& e : entries) {
          const SearchResult sr =
              beam_search_stats(index.graphs[e.cluster_id], mbq[e.query_id], params);
          partials[e.query_id].push_back(sr.hits);
          mb_visited += sr.visited;
        }
      }
      for (std::size_t q = 0; q < count; ++q) {
        std::vector<ScoredId> hits = combine_results(partials[q], params.k);
        std::vector<float>& vecs = result.hit_vectors[begin + q];
        vecs.reserve(hits.size() * static_cast<std::size_t>(index.dim()));
        for (const ScoredId& h : hits) {
          const auto [cl, local] = locator[h.id];
          const std::span<const float> v = index.graphs[cl].vectors[local];
          vecs.insert(vecs.end(), v.begin(), v.end());
        }
        result.hits[begin + q] = std::move(hits);
      }
    }
    result.visited_total += mb_visited;

    StageDurations& d = durations[static_cast<std::size_t>(mb)];
    const double bs = static_cast<double>(count);
    d.kmeans = t_kmeans(bs, index.dim(), index.clusters(), gpu);
    d.dispatch = t_dispatch(bs, fanout, index.dim(), topo, topo.links);
    if (opts.pricing == SearchPricing::modeled) {
      d.search = t_search(bs, fanout, params.iterations, params.beam_width,
                          index.out_degree, index.dim(), search_format, gpu);
    } else {
      d.search = static_cast<double>(mb_visited) * index.dim() *
                 search_format.bytes_per_element / gpu.hbm_bandwidth;
    }
    d.combine = t_combine(d.dispatch, fanout);
    info.durations = d;
  }

  // Symmetric timing: every rank runs the same single-rank schedule.
  const Timeline base = replay_schedule(durations, opts.mode);
  result.timeline.intervals.reserve(base.intervals.size() *
                                    static_cast<std::size_t>(topo.ranks));
  for (int r = 0; r < topo.ranks; ++r) {
    for (Interval iv : base.intervals) {
      iv.rank = r;
      result.timeline.intervals.push_back(iv);
    }
  }
  result.makespan = base.makespan();
  return result;
}

std::string timeline_to_json(const Timeline& tl) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Interval& iv : tl.intervals) {
    arr.push_back({{"rank", iv.rank},
                   {"lane", to_string(iv.lane)},
                   {"stage", to_string(iv.stage)},
                   {"microbatch", iv.microbatch},
                   {"start", iv.start},
                   {"end", iv.end}});
  }
  return arr.dump(2) + "\n";
}

std::string timeline_to_csv(const Timeline& tl) {
  std::ostringstream out;
  out << "rank,lane,stage,mb,start,end\n";
  for (const Interval& iv : tl.intervals) {
    out << iv.rank << ',' << to_string(iv.lane) << ',' << to_string(iv.stage) << ','
        << iv.microbatch << ',' << fmt_time(iv.start) << ',' << fmt_time(iv.end) << '\n';
  }
  return out.str();
}

}  // namespace dvs
