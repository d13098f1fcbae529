#include "doctest.h"

#include <random>

#include "dvs/cost_model.hpp"
#include "support/synthetic.hpp"

using namespace dvs;
namespace ts = dvs::testsupport;

namespace {

ClusterTopology paper_topology() {
  ClusterTopology topo;
  topo.ranks = 16;
  topo.ranks_per_node = 8;
  topo.links = default_links();
  return topo;
}

}  // namespace

TEST_CASE("flops_per_query") {
  CHECK(flops_per_query(36, 32, 1536, 2) == 3538944.0);  // 2 * 36 * 32 * 1536
  CHECK(flops_per_query(1, 1, 1, 2) == 2.0);
  // FLOPs and bytes cancel to the per-element ratio.
  const double f = flops_per_query(36, 32, 1536, 2);
  const double b = bytes_per_query(36, 32, 1536, 4);
  CHECK(f / b == arithmetic_intensity(2, 4));
}

TEST_CASE("bytes_per_query") {
  CHECK(bytes_per_query(36, 32, 1536, 2) == 3538944.0);
  CHECK(bytes_per_query(1, 1, 1, 4) == 4.0);
  CHECK(bytes_per_query(36, 32, 2 * 1536, 2) == 2 * bytes_per_query(36, 32, 1536, 2));
}

TEST_CASE("arithmetic intensity") {
  CHECK(arithmetic_intensity(2, 4) == 0.5);
  CHECK(arithmetic_intensity(3, 4) == 0.75);
  CHECK(arithmetic_intensity(2, 2) == 1.0);
  for (const double s : {2.0, 3.0, 7.0}) {
    CHECK(arithmetic_intensity(2 * s, 4 * s) == 0.5);
  }
  // Every supported element format stays far below the compute-bound regime.
  for (const int bytes : {2, 4}) {
    for (const int flops : {2, 3}) {
      CHECK(arithmetic_intensity(flops, bytes) < 10.0);
    }
  }
}

TEST_CASE("roofline iteration times") {
  GpuSpec spec;
  spec.peak_flops = 1e15;  // compute never binds in these cases
  spec.gemm_efficiency = 1.0;
  spec.hbm_bandwidth = 1.55e12;
  spec.io_bandwidth = 32e9;

  // Slow IO channel binds the out-of-core time exactly.
  const double bs = 1000, fq = 100, btq = 1e6;
  CHECK(iteration_time_out_of_core(bs, fq, btq, spec) == bs * btq / spec.io_bandwidth);

  // With equal channels the two approaches coincide.
  GpuSpec same = spec;
  same.io_bandwidth = same.hbm_bandwidth;
  CHECK(iteration_time_out_of_core(bs, fq, btq, same) ==
        iteration_time_in_hbm(bs, fq, btq, same));

  // Paper-scale in-HBM time: 30000 queries of 3.539 MB at 1.55 TB/s.
  const double t = iteration_time_in_hbm(30000, 1.0, 3538944.0, spec);
  CHECK(t == doctest::Approx(0.0685).epsilon(0.01));
}

TEST_CASE("t_kmeans") {
  GpuSpec spec = a100_spec();
  const double t = t_kmeans(10000, 1536, 4096, spec);
  CHECK(t == doctest::Approx(1.35e-3).epsilon(0.01));

  CHECK(t_kmeans(100, 8, 1, spec) == 2.0 * 100 * 8 / (0.6 * 156e12));

  GpuSpec half = spec;
  half.gemm_efficiency = 0.3;
  CHECK(t_kmeans(10000, 1536, 4096, half) == doctest::Approx(2 * t).epsilon(1e-12));
}

TEST_CASE("t_dispatch") {
  const ClusterTopology topo = paper_topology();
  const LinkSpec links = default_links();

  // Per-channel volume with the paper inputs: 92.16 MB.
  CHECK(dispatch_volume_bytes(10000, 3, 1536) * 0.5 == 92160000.0);

  const double t = t_dispatch(10000, 3, 1536, topo, links);
  CHECK(t == doctest::Approx(3.84e-3).epsilon(1e-9));

  LinkSpec fast_rdma = links;
  fast_rdma.rdma_bandwidth = 1e30;  // only the NVLink term remains
  const double t_nv = t_dispatch(10000, 3, 1536, topo, fast_rdma);
  CHECK(t_nv == doctest::Approx(92160000.0 / 600e9).epsilon(1e-9));
}

TEST_CASE("t_search and throughput") {
  const GpuSpec spec = a100_spec();
  const ElementFormat fp16 = ElementFormat::fp16();
  // fanout * batch = 30000 searches of 1152 visited vectors.
  const double t = t_search(10000, 3, 6, 6, 32, 1536, fp16, spec);
  CHECK(t == doctest::Approx(68.5e-3).epsilon(0.01));

  const double qps = spec.hbm_bandwidth / bytes_per_query(36, 32, 1536, 2);
  CHECK(qps == doctest::Approx(4.37e5).epsilon(0.01));

  CHECK(t_search(0, 3, 6, 6, 32, 1536, fp16, spec) == 0.0);
}

TEST_CASE("t_combine") {
  CHECK(t_combine(3.67e-3, 3) == doctest::Approx(11.01e-3).epsilon(1e-12));
  CHECK(t_combine(3.84e-3, 3) == doctest::Approx(11.52e-3).epsilon(1e-12));
  CHECK(t_combine(0.125, 1) == 0.125);
}

TEST_CASE("stage times scale linearly in batch size") {
  const GpuSpec spec = a100_spec();
  const ClusterTopology topo = paper_topology();
  const LinkSpec links = default_links();
  const ElementFormat fmt = ElementFormat::fp16();
  for (const double bs : {128.0, 4096.0, 50000.0}) {
    CHECK(t_kmeans(2 * bs, 1536, 4096, spec) == 2 * t_kmeans(bs, 1536, 4096, spec));
    CHECK(t_dispatch(2 * bs, 3, 1536, topo, links) ==
          2 * t_dispatch(bs, 3, 1536, topo, links));
    CHECK(t_search(2 * bs, 3, 6, 6, 32, 1536, fmt, spec) ==
          2 * t_search(bs, 3, 6, 6, 32, 1536, fmt, spec));
  }
}

TEST_CASE("out-of-core never beats in-HBM when IO is the slower channel") {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 500; ++trial) {
    const double bs = std::pow(10.0, ts::uniform(rng, 0, 6));
    const double fq = std::pow(10.0, ts::uniform(rng, 0, 9));
    const double btq = std::pow(10.0, ts::uniform(rng, 0, 9));
    GpuSpec spec;
    spec.peak_flops = std::pow(10.0, ts::uniform(rng, 9, 15));
    spec.gemm_efficiency = ts::uniform(rng, 0.1, 1.0);
    spec.hbm_bandwidth = std::pow(10.0, ts::uniform(rng, 9, 13));
    spec.io_bandwidth = spec.hbm_bandwidth * ts::uniform(rng, 1e-4, 1.0);
    const double ooc = iteration_time_out_of_core(bs, fq, btq, spec);
    const double hbm = iteration_time_in_hbm(bs, fq, btq, spec);
    CHECK(ooc >= hbm);
    if (ooc > hbm) {
      // Strict gap only when the IO channel binds.
      CHECK(bs * btq / spec.io_bandwidth > hbm);
    }
  }
}

TEST_CASE("full_report agrees with the individual operations") {
  Workload w;  // paper defaults
  const GpuSpec spec = a100_spec();
  const LinkSpec links = default_links();
  const CostReport r = full_report(w, spec, links);

  CHECK(r.arithmetic_intensity == 1.0);  // fp16 with 2 flops/element
  CHECK(r.flops_per_query == flops_per_query(36, 32, 1536, 2));
  CHECK(r.bytes_per_query == bytes_per_query(36, 32, 1536, 2));
  CHECK(r.t_kmeans == t_kmeans(10000, 1536, 4096, spec));
  ClusterTopology topo = paper_topology();
  CHECK(r.t_dispatch == t_dispatch(10000, 3, 1536, topo, links));
  CHECK(r.t_search == t_search(10000, 3, 6, 6, 32, 1536, w.search_format, spec));
  CHECK(r.t_combine == 3 * r.t_dispatch);
  CHECK(r.qps == spec.hbm_bandwidth / r.bytes_per_query);
  CHECK(r.t_out_of_core >= r.t_in_hbm);

  // The L override replaces iterations * beam_width.
  Workload wl = w;
  wl.visited_nodes = 72;
  const CostReport r2 = full_report(wl, spec, links);
  CHECK(r2.bytes_per_query == 2 * r.bytes_per_query);
}

TEST_CASE("workload validation") {
  Workload w;
  w.fanout = 5000;  // exceeds clusters
  CHECK_THROWS_AS(validate(w), std::invalid_argument);
  w = Workload{};
  w.ranks = 10;
  w.ranks_per_node = 4;
  CHECK_THROWS_AS(validate(w), std::invalid_argument);
  w = Workload{};
  w.search_format.bytes_per_element = 8;
  CHECK_THROWS_AS(validate(w), std::invalid_argument);
}
