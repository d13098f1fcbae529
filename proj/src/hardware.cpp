#include "dvs/hardware.hpp"

#include <stdexcept>

namespace dvs {

void validate(const GpuSpec& spec) {
  if (spec.peak_flops <= 0 || spec.hbm_bandwidth <= 0 || spec.io_bandwidth <= 0) {
    throw std::invalid_argument("GpuSpec: throughputs must be positive");
  }
  if (spec.gemm_efficiency <= 0 || spec.gemm_efficiency > 1) {
    throw std::invalid_argument("GpuSpec: gemm_efficiency must be in (0, 1]");
  }
}

void validate(const LinkSpec& links) {
  if (links.nvlink_bandwidth <= 0 || links.rdma_bandwidth <= 0) {
    throw std::invalid_argument("LinkSpec: bandwidths must be positive");
  }
}

GpuSpec a100_spec() { return GpuSpec{156e12, 0.6, 1.55e12, 32e9}; }

LinkSpec default_links() { return LinkSpec{600e9, 25e9}; }

double io_bandwidth_preset(const std::string& name) {
  if (name == "pcie4") return 32e9;
  if (name == "pcie5") return 64e9;
  if (name == "nvme") return 7e9;
  throw std::invalid_argument("unknown io preset '" + name +
                              "' (expected pcie4, pcie5 or nvme)");
}

}  // namespace dvs
