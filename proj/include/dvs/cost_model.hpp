#pragma once

#include <optional>
#include <string>

#include "dvs/dataset.hpp"
#include "dvs/hardware.hpp"
#include "dvs/router.hpp"

namespace dvs {

struct Workload {
  int batch_size = 10000;  // bs, queries per batch per rank
  int dim = 1536;          // d
  int clusters = 4096;     // C
  int fanout = 3;          // c, clusters searched per query
  int ranks = 16;          // R
  int ranks_per_node = 8;
  int iterations = 6;      // I
  int beam_width = 6;      // w
  int out_degree = 32;     // d_g
  int k = 10;
  ElementFormat search_format = ElementFormat::fp16();  // search traffic; dispatch is fp32
  std::optional<int> visited_nodes;                     // L; defaults to iterations * beam_width

  int effective_visited_nodes() const {
    return visited_nodes ? *visited_nodes : iterations * beam_width;
  }
};

void validate(const Workload& w);

struct CostReport {
  double arithmetic_intensity = 0;  // FLOP/byte
  double flops_per_query = 0;
  double bytes_per_query = 0;
  double t_kmeans = 0;   // seconds, per batch per rank
  double t_dispatch = 0;
  double t_search = 0;
  double t_combine = 0;
  double qps = 0;        // single-rank search throughput
  double t_out_of_core = 0;
  double t_in_hbm = 0;
};

double flops_per_query(double visited_nodes, double out_degree, double dim,
                       double flops_per_element);
double bytes_per_query(double visited_nodes, double out_degree, double dim,
                       double bytes_per_element);
double arithmetic_intensity(double flops_per_element, double bytes_per_element);

// Roofline iteration times for one batch: max over the binding channels.
// The out-of-core variant adds the host/disk channel.
double iteration_time_out_of_core(double batch, double flops_q, double bytes_q,
                                  const GpuSpec& spec);
double iteration_time_in_hbm(double batch, double flops_q, double bytes_q,
                             const GpuSpec& spec);

// Classification: 2*b*d*C GEMM FLOPs at gemm_efficiency * peak_flops.
double t_kmeans(double batch, double dim, double clusters, const GpuSpec& spec);

// Total fp32 dispatch volume per rank: batch * fanout * dim * 4 bytes.
double dispatch_volume_bytes(double batch, double fanout, double dim);

// Per-rank all-to-all dispatch time. The volume is split by the analytic
// intra-node fraction ranks_per_node / ranks between the NVLink and RDMA
// channels; the fanout factor is included in both terms.
double t_dispatch(double batch, double fanout, double dim, const ClusterTopology& topo,
                  const LinkSpec& links);

// Per-rank search time for fanout * batch queries, bound by HBM bandwidth.
double t_search(double batch, double fanout, int iterations, int beam_width,
                int out_degree, double dim, const ElementFormat& fmt,
                const GpuSpec& spec);

double t_combine(double t_dispatch_value, double fanout);

CostReport full_report(const Workload& w, const GpuSpec& spec, const LinkSpec& links);

// Aligned plain-text table of the report, one line per quantity.
std::string report_table(const Workload& w, const CostReport& r);

// JSON object with the workload and every report field.
std::string report_json(const Workload& w, const CostReport& r);

}  // namespace dvs
