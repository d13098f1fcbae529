#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "dvs/cost_model.hpp"
#include "dvs/graph_index.hpp"
#include "dvs/hardware.hpp"
#include "dvs/router.hpp"
#include "dvs/simulator.hpp"

namespace dvs {

// Flat run configuration shared by every command. Values come from built-in
// defaults, then an optional JSON config file, then command-line flags of the
// same name; `explicit_keys` records which fields were set by file or flag.
struct RunConfig {
  // paths
  std::string database;
  std::string queries;
  std::string index;
  std::string output_dir;

  // workload
  int batch_size = 10000;
  int dim = 1536;
  int clusters = 4096;
  int fanout = 3;
  int k = 10;
  int iterations = 6;
  int beam_width = 6;
  int out_degree = 32;
  int entry_count = 0;  // 0 -> beam_width
  int ranks = 16;
  int ranks_per_node = 8;

  // hardware
  std::string gpu = "a100";
  std::string io = "pcie4";
  double peak_flops = -1;  // negative -> take from preset
  double gemm_efficiency = -1;
  double hbm_bandwidth = -1;
  double io_bandwidth = -1;
  double nvlink_bandwidth = -1;
  double rdma_bandwidth = -1;

  // search traffic format
  int element_bytes = 2;
  int element_flops = 2;

  // run behaviour
  std::uint64_t seed = 42;
  std::string mode = "two_microbatch";
  int kmeans_iters = 25;
  std::string search_pricing = "modeled";
  int visited_nodes = 0;  // 0 -> iterations * beam_width
  std::string sweep;      // "" or "bs"
  std::string sweep_points;  // comma-separated bs values for --sweep

  std::set<std::string> explicit_keys;

  bool is_explicit(const std::string& key) const {
    return explicit_keys.count(key) > 0;
  }
};

// Parses a JSON config file into cfg. Unknown keys are rejected.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Assigns one field by key from a string value (flag text); validates the
// key. Used by both the JSON loader and the CLI layer.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Resolved parameter bundles. Explicit values beat presets.
GpuSpec resolve_gpu(const RunConfig& cfg);
LinkSpec resolve_links(const RunConfig& cfg);
ClusterTopology resolve_topology(const RunConfig& cfg);
SearchParams resolve_search_params(const RunConfig& cfg);
ElementFormat resolve_element_format(const RunConfig& cfg);
Workload resolve_workload(const RunConfig& cfg);
PipelineMode resolve_mode(const RunConfig& cfg);
SearchPricing resolve_pricing(const RunConfig& cfg);

// Per-command precondition checks; throws config_error naming the field.
void validate_for_build(const RunConfig& cfg);
void validate_for_query(const RunConfig& cfg);
void validate_for_model(const RunConfig& cfg);
void validate_for_oracle(const RunConfig& cfg);

}  // namespace dvs
