#pragma once

#include <string>

namespace dvs {

// Per-GPU throughput ceilings, bytes/s and FLOP/s.
struct GpuSpec {
  double peak_flops = 156e12;      // peak arithmetic throughput (A100 TF32)
  double gemm_efficiency = 0.6;    // effective GEMM efficiency, in (0, 1]
  double hbm_bandwidth = 1.55e12;  // device memory
  double io_bandwidth = 32e9;      // host or disk -> GPU
};

struct LinkSpec {
  double nvlink_bandwidth = 600e9;  // intra-node, bytes/s
  double rdma_bandwidth = 25e9;     // inter-node, bytes/s per GPU
};

void validate(const GpuSpec& spec);
void validate(const LinkSpec& links);

GpuSpec a100_spec();
LinkSpec default_links();

// "pcie4" 32e9, "pcie5" 64e9, "nvme" 7e9.
double io_bandwidth_preset(const std::string& name);

}  // namespace dvs
