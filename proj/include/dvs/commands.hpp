#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dvs/config.hpp"
#include "dvs/cost_model.hpp"
#include "dvs/simulator.hpp"

namespace dvs {

struct BuildOutcome {
  std::filesystem::path index_path;
  std::vector<std::size_t> partition_sizes;
};

struct QueryOutcome {
  double recall = 0;
  double makespan_sequential = 0;
  double makespan_pipelined = 0;
  PipelineResult result;
  std::filesystem::path metrics_path;
};

// build: train centroids, partition, place, build per-cluster graphs, write
// the index file, print a partition-size histogram.
BuildOutcome cmd_build(const RunConfig& cfg, std::ostream& out);

// query: run the pipeline, write result ids/dists/vectors, metrics JSON and
// timeline JSON/CSV into output_dir.
QueryOutcome cmd_query(const RunConfig& cfg, std::ostream& out);

// model: print the cost report table (or a bs sweep CSV) and write
// report.json / sweep.csv when output_dir is set.
CostReport cmd_model(const RunConfig& cfg, std::ostream& out);

// oracle: exact top-k for every query, written as ground_truth.ivecs.
std::filesystem::path cmd_oracle(const RunConfig& cfg, std::ostream& out);

// Exit code policy: 0 ok, 2 config, 3 data format, 4 internal.
int exit_code_for(const std::exception& e);

// Full CLI entry point (argument parsing, dispatch, error mapping).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dvs
