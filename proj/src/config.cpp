#include "dvs/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "dvs/errors.hpp"

namespace dvs {

namespace {

using nlohmann::json;

long long to_int(const std::string& key, const json& v) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw config_error("config field '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

double to_double(const std::string& key, const json& v) {
  if (!v.is_number()) {
    throw config_error("config field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::string to_string_value(const std::string& key, const json& v) {
  if (!v.is_string()) {
    throw config_error("config field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

// One setter per config key, shared by the JSON file loader and the CLI
// flag layer (flags arrive as strings and are converted to JSON first).
using Setter = std::function<void(RunConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"database", [](RunConfig& c, const std::string& k, const json& v) { c.database = to_string_value(k, v); }},
      {"queries", [](RunConfig& c, const std::string& k, const json& v) { c.queries = to_string_value(k, v); }},
      {"index", [](RunConfig& c, const std::string& k, const json& v) { c.index = to_string_value(k, v); }},
      {"output_dir", [](RunConfig& c, const std::string& k, const json& v) { c.output_dir = to_string_value(k, v); }},
      {"batch_size", [](RunConfig& c, const std::string& k, const json& v) { c.batch_size = static_cast<int>(to_int(k, v)); }},
      {"dim", [](RunConfig& c, const std::string& k, const json& v) { c.dim = static_cast<int>(to_int(k, v)); }},
      {"clusters", [](RunConfig& c, const std::string& k, const json& v) { c.clusters = static_cast<int>(to_int(k, v)); }},
      {"fanout", [](RunConfig& c, const std::string& k, const json& v) { c.fanout = static_cast<int>(to_int(k, v)); }},
      {"k", [](RunConfig& c, const std::string& k, const json& v) { c.k = static_cast<int>(to_int(k, v)); }},
      {"iterations", [](RunConfig& c, const std::string& k, const json& v) { c.iterations = static_cast<int>(to_int(k, v)); }},
      {"beam_width", [](RunConfig& c, const std::string& k, const json& v) { c.beam_width = static_cast<int>(to_int(k, v)); }},
      {"out_degree", [](RunConfig& c, const std::string& k, const json& v) { c.out_degree = static_cast<int>(to_int(k, v)); }},
      {"entry_count", [](RunConfig& c, const std::string& k, const json& v) { c.entry_count = static_cast<int>(to_int(k, v)); }},
      {"ranks", [](RunConfig& c, const std::string& k, const json& v) { c.ranks = static_cast<int>(to_int(k, v)); }},
      {"ranks_per_node", [](RunConfig& c, const std::string& k, const json& v) { c.ranks_per_node = static_cast<int>(to_int(k, v)); }},
      {"gpu", [](RunConfig& c, const std::string& k, const json& v) { c.gpu = to_string_value(k, v); }},
      {"io", [](RunConfig& c, const std::string& k, const json& v) { c.io = to_string_value(k, v); }},
      {"peak_flops", [](RunConfig& c, const std::string& k, const json& v) { c.peak_flops = to_double(k, v); }},
      {"gemm_efficiency", [](RunConfig& c, const std::string& k, const json& v) { c.gemm_efficiency = to_double(k, v); }},
      {"hbm_bandwidth", [](RunConfig& c, const std::string& k, const json& v) { c.hbm_bandwidth = to_double(k, v); }},
      {"io_bandwidth", [](RunConfig& c, const std::string& k, const json& v) { c.io_bandwidth = to_double(k, v); }},
      {"nvlink_bandwidth", [](RunConfig& c, const std::string& k, const json& v) { c.nvlink_bandwidth = to_double(k, v); }},
      {"rdma_bandwidth", [](RunConfig& c, const std::string& k, const json& v) { c.rdma_bandwidth = to_double(k, v); }},
      {"element_bytes", [](RunConfig& c, const std::string& k, const json& v) { c.element_bytes = static_cast<int>(to_int(k, v)); }},
      {"element_flops", [](RunConfig& c, const std::string& k, const json& v) { c.element_flops = static_cast<int>(to_int(k, v)); }},
      {"seed", [](RunConfig& c, const std::string& k, const json& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"mode", [](RunConfig& c, const std::string& k, const json& v) { c.mode = to_string_value(k, v); }},
      {"kmeans_iters", [](RunConfig& c, const std::string& k, const json& v) { c.kmeans_iters = static_cast<int>(to_int(k, v)); }},
      {"search_pricing", [](RunConfig& c, const std::string& k, const json& v) { c.search_pricing = to_string_value(k, v); }},
      {"visited_nodes", [](RunConfig& c, const std::string& k, const json& v) { c.visited_nodes = static_cast<int>(to_int(k, v)); }},
      {"sweep", [](RunConfig& c, const std::string& k, const json& v) { c.sweep = to_string_value(k, v); }},
      {"sweep_points", [](RunConfig& c, const std::string& k, const json& v) { c.sweep_points = to_string_value(k, v); }},
  };
  return table;
}

void apply_json_value(RunConfig& cfg, const std::string& key, const json& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw config_error("unknown config field '" + key + "'");
  }
  it->second(cfg, key, value);
  cfg.explicit_keys.insert(key);
}

void require_positive(int v, const char* name) {
  if (v < 1) {
    throw config_error(std::string(name) + " must be >= 1, got " + std::to_string(v));
  }
}

void require_path_set(const std::string& v, const char* name) {
  if (v.empty()) {
    throw config_error(std::string("missing required path '") + name + "'");
  }
}

void require_file_exists(const std::string& v, const char* name) {
  require_path_set(v, name);
  if (!std::filesystem::exists(v)) {
    throw config_error(std::string(name) + " file not found: " + v);
  }
}

void validate_common_workload(const RunConfig& cfg) {
  require_positive(cfg.clusters, "clusters");
  require_positive(cfg.fanout, "fanout");
  require_positive(cfg.k, "k");
  require_positive(cfg.iterations, "iterations");
  require_positive(cfg.beam_width, "beam_width");
  require_positive(cfg.out_degree, "out_degree");
  require_positive(cfg.ranks, "ranks");
  require_positive(cfg.ranks_per_node, "ranks_per_node");
  if (cfg.ranks % cfg.ranks_per_node != 0) {
    throw config_error("ranks (" + std::to_string(cfg.ranks) +
                       ") must be divisible by ranks_per_node (" +
                       std::to_string(cfg.ranks_per_node) + ")");
  }
  if (cfg.entry_count < 0) {
    throw config_error("entry_count must be >= 0 (0 means beam_width)");
  }
  if (cfg.fanout > cfg.clusters) {
    throw config_error("fanout (" + std::to_string(cfg.fanout) +
                       ") exceeds clusters (" + std::to_string(cfg.clusters) + ")");
  }
  if (cfg.mode != "sequential" && cfg.mode != "two_microbatch") {
    throw config_error("mode must be 'sequential' or 'two_microbatch', got '" + cfg.mode +
                       "'");
  }
  if (cfg.search_pricing != "modeled" && cfg.search_pricing != "measured") {
    throw config_error("search_pricing must be 'modeled' or 'measured', got '" +
                       cfg.search_pricing + "'");
  }
  if (cfg.visited_nodes < 0) {
    throw config_error("visited_nodes must be >= 0 (0 means iterations * beam_width)");
  }
  try {
    validate(resolve_element_format(cfg));
    validate(resolve_gpu(cfg));
    validate(resolve_links(cfg));
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw config_error("config file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw config_error("config file " + path.string() + " must hold a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    apply_json_value(cfg, key, value);
  }
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw config_error("unknown config field '" + key + "'");
  }
  // Flags arrive as text; parse numerics through JSON so "600e9" works.
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  if (parsed.is_string() || parsed.is_number()) {
    it->second(cfg, key, parsed);
  } else {
    throw config_error("config field '" + key + "': unsupported value '" + value + "'");
  }
  cfg.explicit_keys.insert(key);
}

GpuSpec resolve_gpu(const RunConfig& cfg) {
  GpuSpec spec;
  if (cfg.gpu == "a100") {
    spec = a100_spec();
  } else {
    throw config_error("unknown gpu preset '" + cfg.gpu + "' (expected a100)");
  }
  spec.io_bandwidth = io_bandwidth_preset(cfg.io);
  if (cfg.peak_flops >= 0) spec.peak_flops = cfg.peak_flops;
  if (cfg.gemm_efficiency >= 0) spec.gemm_efficiency = cfg.gemm_efficiency;
  if (cfg.hbm_bandwidth >= 0) spec.hbm_bandwidth = cfg.hbm_bandwidth;
  if (cfg.io_bandwidth >= 0) spec.io_bandwidth = cfg.io_bandwidth;
  return spec;
}

LinkSpec resolve_links(const RunConfig& cfg) {
  LinkSpec links = default_links();
  if (cfg.nvlink_bandwidth >= 0) links.nvlink_bandwidth = cfg.nvlink_bandwidth;
  if (cfg.rdma_bandwidth >= 0) links.rdma_bandwidth = cfg.rdma_bandwidth;
  return links;
}

ClusterTopology resolve_topology(const RunConfig& cfg) {
  ClusterTopology topo;
  topo.ranks = cfg.ranks;
  topo.ranks_per_node = cfg.ranks_per_node;
  topo.links = resolve_links(cfg);
  return topo;
}

SearchParams resolve_search_params(const RunConfig& cfg) {
  SearchParams p;
  p.iterations = cfg.iterations;
  p.beam_width = cfg.beam_width;
  p.k = cfg.k;
  p.entry_count = cfg.entry_count > 0 ? cfg.entry_count : cfg.beam_width;
  return p;
}

ElementFormat resolve_element_format(const RunConfig& cfg) {
  return ElementFormat{cfg.element_bytes, cfg.element_flops};
}

Workload resolve_workload(const RunConfig& cfg) {
  Workload w;
  w.batch_size = cfg.batch_size;
  w.dim = cfg.dim;
  w.clusters = cfg.clusters;
  w.fanout = cfg.fanout;
  w.ranks = cfg.ranks;
  w.ranks_per_node = cfg.ranks_per_node;
  w.iterations = cfg.iterations;
  w.beam_width = cfg.beam_width;
  w.out_degree = cfg.out_degree;
  w.k = cfg.k;
  w.search_format = resolve_element_format(cfg);
  if (cfg.visited_nodes > 0) w.visited_nodes = cfg.visited_nodes;
  return w;
}

PipelineMode resolve_mode(const RunConfig& cfg) {
  return cfg.mode == "sequential" ? PipelineMode::sequential
                                  : PipelineMode::two_microbatch;
}

SearchPricing resolve_pricing(const RunConfig& cfg) {
  return cfg.search_pricing == "measured" ? SearchPricing::measured
                                          : SearchPricing::modeled;
}

void validate_for_build(const RunConfig& cfg) {
  validate_common_workload(cfg);
  require_file_exists(cfg.database, "database");
  require_path_set(cfg.index, "index");
  require_positive(cfg.kmeans_iters, "kmeans_iters");
  if (cfg.clusters < cfg.ranks) {
    throw config_error("clusters (" + std::to_string(cfg.clusters) +
                       ") must be >= ranks (" + std::to_string(cfg.ranks) + ")");
  }
}

void validate_for_query(const RunConfig& cfg) {
  validate_common_workload(cfg);
  require_file_exists(cfg.index, "index");
  require_file_exists(cfg.queries, "queries");
  require_file_exists(cfg.database, "database");
  require_path_set(cfg.output_dir, "output_dir");
}

void validate_for_model(const RunConfig& cfg) {
  validate_common_workload(cfg);
  require_positive(cfg.batch_size, "batch_size");
  require_positive(cfg.dim, "dim");
  if (!cfg.sweep.empty() && cfg.sweep != "bs") {
    throw config_error("sweep supports only 'bs', got '" + cfg.sweep + "'");
  }
}

void validate_for_oracle(const RunConfig& cfg) {
  require_positive(cfg.k, "k");
  require_file_exists(cfg.database, "database");
  require_file_exists(cfg.queries, "queries");
  require_path_set(cfg.output_dir, "output_dir");
}

}  // namespace dvs
