#include "dvs/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "binio.hpp"
#include "dvs/errors.hpp"
#include "dvs/index_file.hpp"
#include "dvs/topk.hpp"
#include "dvs/vecio.hpp"

namespace dvs {

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw format_error("cannot open " + path.string() + " for writing", 0);
  }
  out << text;
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

// Record-by-record writers that tolerate ragged rows (a query can return
// fewer than k hits when the reachable candidate set is small).
void write_ivecs_rows(const std::filesystem::path& path,
                      const std::vector<std::vector<std::int32_t>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw format_error("cannot open " + path.string() + " for writing", 0);
  }
  for (const auto& row : rows) {
    binio::put_i32(out, static_cast<std::int32_t>(row.size()));
    for (const std::int32_t v : row) binio::put_i32(out, v);
  }
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

void write_fvecs_rows(const std::filesystem::path& path,
                      const std::vector<std::vector<float>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw format_error("cannot open " + path.string() + " for writing", 0);
  }
  for (const auto& row : rows) {
    binio::put_i32(out, static_cast<std::int32_t>(row.size()));
    for (const float v : row) binio::put_f32(out, v);
  }
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

void print_partition_histogram(std::ostream& out, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t lo = sorted.front();
  const std::size_t hi = sorted.back();
  const std::size_t median = sorted[sorted.size() / 2];
  out << "partition sizes: min " << lo << "  median " << median << "  max " << hi << "\n";

  const int buckets = hi > lo ? 10 : 1;
  const double width = hi > lo ? static_cast<double>(hi - lo) / buckets : 1.0;
  for (int b = 0; b < buckets; ++b) {
    const std::size_t from = lo + static_cast<std::size_t>(b * width);
    const std::size_t to = (b + 1 == buckets) ? hi + 1
                                              : lo + static_cast<std::size_t>((b + 1) * width);
    std::size_t count = 0;
    for (const std::size_t s : sorted) {
      if (s >= from && s < to) ++count;
    }
    out << "  [" << from << ", " << to << "): " << count << "  ";
    const std::size_t bar = count * 40 / sizes.size();
    for (std::size_t i = 0; i < bar; ++i) out << '#';
    out << "\n";
  }
}

std::vector<long long> sweep_batch_sizes(const RunConfig& cfg) {
  std::vector<long long> points;
  if (!cfg.sweep_points.empty()) {
    std::stringstream ss(cfg.sweep_points);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        const long long v = std::stoll(token);
        if (v < 1) throw std::invalid_argument("non-positive");
        points.push_back(v);
      } catch (const std::exception&) {
        throw config_error("sweep_points: bad batch size '" + token + "'");
      }
    }
    if (points.empty()) {
      throw config_error("sweep_points: no values given");
    }
  } else {
    for (long long bs = 1; bs <= (1ll << 20); bs *= 2) points.push_back(bs);
  }
  return points;
}

std::string csv_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BuildOutcome cmd_build(const RunConfig& cfg, std::ostream& out) {
  validate_for_build(cfg);
  const Dataset db = load_fvecs(cfg.database);
  try {
    validate(db);
    if (static_cast<std::size_t>(cfg.clusters) > db.size()) {
      throw config_error("clusters (" + std::to_string(cfg.clusters) +
                         ") exceeds database size (" + std::to_string(db.size()) + ")");
    }

    const ClusterTopology topo = resolve_topology(cfg);
    KmeansStats stats;
    const BuiltIndex index =
        build_index(db, cfg.clusters, cfg.out_degree, topo, cfg.kmeans_iters, cfg.seed, &stats);

    const std::filesystem::path index_path = cfg.index;
    if (index_path.has_parent_path()) {
      std::filesystem::create_directories(index_path.parent_path());
    }
    save_index(index, index_path);

    BuildOutcome outcome;
    outcome.index_path = index_path;
    for (const GraphIndex& g : index.graphs) outcome.partition_sizes.push_back(g.size());

    out << "built index: " << index.clusters() << " clusters, " << index.total_vectors()
        << " vectors, dim " << index.dim() << ", out-degree " << index.out_degree
        << ", kmeans iterations " << stats.iterations << "\n";
    print_partition_histogram(out, outcome.partition_sizes);
    out << "wrote " << index_path.string() << "\n";
    return outcome;
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

QueryOutcome cmd_query(const RunConfig& cfg, std::ostream& out) {
  validate_for_query(cfg);
  BuiltIndex index = load_index(cfg.index);
  const Dataset queries = load_fvecs(cfg.queries);
  const Dataset db = load_fvecs(cfg.database);

  try {
    if (queries.dim != index.dim()) {
      throw config_error("queries dim " + std::to_string(queries.dim) +
                         " != index dim " + std::to_string(index.dim()));
    }
    if (db.dim != index.dim()) {
      throw config_error("database dim " + std::to_string(db.dim) + " != index dim " +
                         std::to_string(index.dim()));
    }
    if (cfg.fanout > index.clusters()) {
      throw config_error("fanout (" + std::to_string(cfg.fanout) +
                         ") exceeds index clusters (" + std::to_string(index.clusters()) +
                         ")");
    }
    if (static_cast<std::size_t>(cfg.k) > db.size()) {
      throw config_error("k (" + std::to_string(cfg.k) + ") exceeds database size (" +
                         std::to_string(db.size()) + ")");
    }

    ClusterTopology topo = resolve_topology(cfg);
    if (cfg.is_explicit("ranks")) {
      if (topo.ranks != index.placement.ranks) {
        index.placement = place_clusters(index.clusters(), topo);
      }
    } else {
      topo.ranks = index.placement.ranks;
    }
    validate(topo);

    PipelineOptions opts;
    opts.mode = resolve_mode(cfg);
    opts.pricing = resolve_pricing(cfg);

    const SearchParams params = resolve_search_params(cfg);
    const GpuSpec gpu = resolve_gpu(cfg);
    const ElementFormat fmt = resolve_element_format(cfg);

    PipelineResult result =
        run_pipeline(index, queries, params, cfg.fanout, topo, gpu, fmt, opts);

    // Both schedule variants over the same priced durations.
    std::vector<StageDurations> durations;
    for (const Microbatch& mb : result.microbatches) durations.push_back(mb.durations);
    const double makespan_seq =
        replay_schedule(durations, PipelineMode::sequential).makespan();
    const double makespan_tm =
        replay_schedule(durations, PipelineMode::two_microbatch).makespan();

    double recall_sum = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const std::vector<ScoredId> truth = brute_force_topk(db, queries[q], cfg.k);
      recall_sum += recall_at_k(result.hits[q], truth, cfg.k);
    }
    const double recall = queries.size() ? recall_sum / static_cast<double>(queries.size()) : 0;

    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);

    std::vector<std::vector<std::int32_t>> id_rows(queries.size());
    std::vector<std::vector<float>> dist_rows(queries.size());
    std::vector<std::vector<float>> vector_rows;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      for (const ScoredId& h : result.hits[q]) {
        id_rows[q].push_back(static_cast<std::int32_t>(h.id));
        dist_rows[q].push_back(h.dist);
      }
      const std::size_t d = static_cast<std::size_t>(index.dim());
      for (std::size_t i = 0; i < result.hits[q].size(); ++i) {
        vector_rows.emplace_back(result.hit_vectors[q].begin() + static_cast<std::ptrdiff_t>(i * d),
                                 result.hit_vectors[q].begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
      }
    }
    write_ivecs_rows(dir / "result_ids.ivecs", id_rows);
    write_fvecs_rows(dir / "result_dists.fvecs", dist_rows);
    write_fvecs_rows(dir / "result_vectors.fvecs", vector_rows);

    json metrics;
    metrics["k"] = cfg.k;
    metrics["num_queries"] = queries.size();
    metrics["recall_at_k"] = recall;
    metrics["mode"] = cfg.mode;
    metrics["search_pricing"] = cfg.search_pricing;
    metrics["makespan_sequential_s"] = makespan_seq;
    metrics["makespan_pipelined_s"] = makespan_tm;
    metrics["visited_vectors"] = result.visited_total;
    json stage_times;
    for (const Stage s : {Stage::kmeans, Stage::dispatch, Stage::search, Stage::combine}) {
      json arr = json::array();
      for (const Microbatch& mb : result.microbatches) arr.push_back(mb.durations.of(s));
      stage_times[to_string(s)] = arr;
    }
    metrics["stage_times_s"] = stage_times;
    write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");
    write_text_file(dir / "timeline.json", timeline_to_json(result.timeline));
    write_text_file(dir / "timeline.csv", timeline_to_csv(result.timeline));

    out << "queries " << queries.size() << "  recall@" << cfg.k << " " << recall
        << "  makespan " << cfg.mode << " " << result.makespan << " s (sequential "
        << makespan_seq << " s, pipelined " << makespan_tm << " s)\n";
    out << "wrote results and metrics to " << dir.string() << "\n";

    QueryOutcome outcome;
    outcome.recall = recall;
    outcome.makespan_sequential = makespan_seq;
    outcome.makespan_pipelined = makespan_tm;
    outcome.result = std::move(result);
    outcome.metrics_path = dir / "metrics.json";
    return outcome;
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

CostReport cmd_model(const RunConfig& cfg, std::ostream& out) {
  validate_for_model(cfg);
  const GpuSpec gpu = resolve_gpu(cfg);
  const LinkSpec links = resolve_links(cfg);
  Workload w = resolve_workload(cfg);

  try {
    const CostReport report = full_report(w, gpu, links);

    if (cfg.sweep == "bs") {
      std::ostringstream csv;
      csv << "bs,t_out_of_core_s,t_in_hbm_s\n";
      for (const long long bs : sweep_batch_sizes(cfg)) {
        const double b = static_cast<double>(bs);
        const double ooc =
            iteration_time_out_of_core(b, report.flops_per_query, report.bytes_per_query, gpu);
        const double hbm =
            iteration_time_in_hbm(b, report.flops_per_query, report.bytes_per_query, gpu);
        csv << bs << ',' << csv_number(ooc) << ',' << csv_number(hbm) << '\n';
      }
      out << csv.str();
      if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_text_file(std::filesystem::path(cfg.output_dir) / "sweep.csv", csv.str());
      }
      return report;
    }

    out << report_table(w, report);
    if (!cfg.output_dir.empty()) {
      std::filesystem::create_directories(cfg.output_dir);
      write_text_file(std::filesystem::path(cfg.output_dir) / "report.json",
                      report_json(w, report));
    }
    return report;
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

std::filesystem::path cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  validate_for_oracle(cfg);
  const Dataset db = load_fvecs(cfg.database);
  const Dataset queries = load_fvecs(cfg.queries);
  try {
    if (queries.dim != db.dim) {
      throw config_error("queries dim " + std::to_string(queries.dim) +
                         " != database dim " + std::to_string(db.dim));
    }
    if (static_cast<std::size_t>(cfg.k) > db.size()) {
      throw config_error("k (" + std::to_string(cfg.k) + ") exceeds database size (" +
                         std::to_string(db.size()) + ")");
    }
    std::vector<std::vector<std::int32_t>> rows(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
      for (const ScoredId& s : brute_force_topk(db, queries[q], cfg.k)) {
        rows[q].push_back(static_cast<std::int32_t>(s.id));
      }
    }
    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path path =
        std::filesystem::path(cfg.output_dir) / "ground_truth.ivecs";
    save_ivecs(rows, path);
    out << "wrote exact top-" << cfg.k << " for " << queries.size() << " queries to "
        << path.string() << "\n";
    return path;
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const config_error*>(&e)) return 2;
  if (dynamic_cast<const format_error*>(&e)) return 3;
  if (dynamic_cast<const internal_error*>(&e)) return 4;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 4;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"deterministic pipeline simulator and cost model for distributed "
               "graph-based vector search"};
  app.require_subcommand(1);

  static const std::vector<std::string> keys = {
      "database", "queries", "index", "output_dir", "batch_size", "dim", "clusters",
      "fanout", "k", "iterations", "beam_width", "out_degree", "entry_count", "ranks",
      "ranks_per_node", "gpu", "io", "peak_flops", "gemm_efficiency", "hbm_bandwidth",
      "io_bandwidth", "nvlink_bandwidth", "rdma_bandwidth", "element_bytes",
      "element_flops", "seed", "mode", "kmeans_iters", "search_pricing", "visited_nodes",
      "sweep", "sweep_points"};

  struct SubState {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
  };
  std::map<std::string, SubState> states;

  auto add_subcommand = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    SubState& st = states[name];
    sub->add_option("--config", st.config_path, "JSON config file; flags override it");
    for (const std::string& key : keys) {
      sub->add_option_function<std::string>(
          "--" + key,
          [&st, key](const std::string& value) { st.overrides.emplace_back(key, value); },
          "config field '" + key + "'");
    }
    return sub;
  };

  add_subcommand("build", "train centroids, partition the database, build per-cluster "
                          "graphs and write the index file");
  add_subcommand("query", "run the four-stage pipeline over a query batch");
  add_subcommand("model", "print the analytical cost report (or a --sweep bs CSV)");
  add_subcommand("oracle", "write exact top-k ground truth as ivecs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [name, state] : states) {
      if (!app.get_subcommand(name)->parsed()) continue;
      RunConfig cfg;
      if (!state.config_path.empty()) {
        apply_config_file(cfg, state.config_path);
      }
      for (const auto& [key, value] : state.overrides) {
        apply_config_value(cfg, key, value);
      }
      if (name == "build") {
        cmd_build(cfg, out);
      } else if (name == "query") {
        cmd_query(cfg, out);
      } else if (name == "model") {
        cmd_model(cfg, out);
      } else if (name == "oracle") {
        cmd_oracle(cfg, out);
      }
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace dvs
