#include "dvs/cost_model.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace dvs {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

std::string fmt_seconds(double s) {
  char buf[64];
  if (s >= 1.0) {
    std::snprintf(buf, sizeof(buf), "%.6g s", s);
  } else if (s >= 1e-3) {
    std::snprintf(buf, sizeof(buf), "%.6g ms", s * 1e3);
  } else {
    std::snprintf(buf, sizeof(buf), "%.6g us", s * 1e6);
  }
  return buf;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void validate(const Workload& w) {
  if (w.batch_size < 1 || w.dim < 1 || w.clusters < 1 || w.fanout < 1 || w.ranks < 1 ||
      w.ranks_per_node < 1 || w.iterations < 1 || w.beam_width < 1 || w.out_degree < 1 ||
      w.k < 1) {
    throw std::invalid_argument("Workload: all parameters must be >= 1");
  }
  if (w.fanout > w.clusters) {
    throw std::invalid_argument("Workload: fanout " + std::to_string(w.fanout) +
                                " exceeds clusters " + std::to_string(w.clusters));
  }
  if (w.ranks % w.ranks_per_node != 0) {
    throw std::invalid_argument("Workload: ranks not divisible by ranks_per_node");
  }
  if (w.visited_nodes && *w.visited_nodes < 1) {
    throw std::invalid_argument("Workload: visited_nodes override must be >= 1");
  }
  validate(w.search_format);
}

double flops_per_query(double visited_nodes, double out_degree, double dim,
                       double flops_per_element) {
  return flops_per_element * visited_nodes * out_degree * dim;
}

double bytes_per_query(double visited_nodes, double out_degree, double dim,
                       double bytes_per_element) {
  return bytes_per_element * dim * visited_nodes * out_degree;
}

double arithmetic_intensity(double flops_per_element, double bytes_per_element) {
  require_positive(bytes_per_element, "bytes_per_element");
  return flops_per_element / bytes_per_element;
}

double iteration_time_out_of_core(double batch, double flops_q, double bytes_q,
                                  const GpuSpec& spec) {
  validate(spec);
  return std::max({batch * flops_q / spec.peak_flops,
                   batch * bytes_q / spec.hbm_bandwidth,
                   batch * bytes_q / spec.io_bandwidth});
}

double iteration_time_in_hbm(double batch, double flops_q, double bytes_q,
                             const GpuSpec& spec) {
  validate(spec);
  return std::max(batch * flops_q / spec.peak_flops,
                  batch * bytes_q / spec.hbm_bandwidth);
}

double t_kmeans(double batch, double dim, double clusters, const GpuSpec& spec) {
  validate(spec);
  return 2.0 * batch * dim * clusters / (spec.gemm_efficiency * spec.peak_flops);
}

double dispatch_volume_bytes(double batch, double fanout, double dim) {
  return batch * fanout * dim * 4.0;
}

double t_dispatch(double batch, double fanout, double dim, const ClusterTopology& topo,
                  const LinkSpec& links) {
  validate(topo);
  validate(links);
  const double f_nv = static_cast<double>(topo.ranks_per_node) / topo.ranks;
  const double f_rd = 1.0 - f_nv;
  const double volume = dispatch_volume_bytes(batch, fanout, dim);
  return volume * f_nv / links.nvlink_bandwidth + volume * f_rd / links.rdma_bandwidth;
}

double t_search(double batch, double fanout, int iterations, int beam_width,
                int out_degree, double dim, const ElementFormat& fmt,
                const GpuSpec& spec) {
  validate(fmt);
  validate(spec);
  const double visited_nodes = static_cast<double>(iterations) * beam_width;
  const double bq = bytes_per_query(visited_nodes, out_degree, dim, fmt.bytes_per_element);
  return fanout * batch * bq / spec.hbm_bandwidth;
}

double t_combine(double t_dispatch_value, double fanout) {
  return fanout * t_dispatch_value;
}

CostReport full_report(const Workload& w, const GpuSpec& spec, const LinkSpec& links) {
  validate(w);
  validate(spec);
  validate(links);

  const double visited_nodes = w.effective_visited_nodes();
  CostReport r;
  r.arithmetic_intensity = arithmetic_intensity(w.search_format.flops_per_element,
                                                w.search_format.bytes_per_element);
  r.flops_per_query = flops_per_query(visited_nodes, w.out_degree, w.dim,
                                      w.search_format.flops_per_element);
  r.bytes_per_query = bytes_per_query(visited_nodes, w.out_degree, w.dim,
                                      w.search_format.bytes_per_element);
  r.t_kmeans = t_kmeans(w.batch_size, w.dim, w.clusters, spec);

  ClusterTopology topo;
  topo.ranks = w.ranks;
  topo.ranks_per_node = w.ranks_per_node;
  topo.links = links;
  r.t_dispatch = t_dispatch(w.batch_size, w.fanout, w.dim, topo, links);
  r.t_search = t_search(w.batch_size, w.fanout, w.iterations, w.beam_width, w.out_degree,
                        w.dim, w.search_format, spec);
  r.t_combine = t_combine(r.t_dispatch, w.fanout);
  r.qps = spec.hbm_bandwidth / r.bytes_per_query;
  r.t_out_of_core =
      iteration_time_out_of_core(w.batch_size, r.flops_per_query, r.bytes_per_query, spec);
  r.t_in_hbm = iteration_time_in_hbm(w.batch_size, r.flops_per_query, r.bytes_per_query, spec);
  return r;
}

std::string report_table(const Workload& w, const CostReport& r) {
  std::ostringstream out;
  auto line = [&](const char* name, const std::string& value) {
    out << name;
    for (std::size_t i = std::string(name).size(); i < 26; ++i) out << ' ';
    out << value << '\n';
  };
  line("batch size", std::to_string(w.batch_size));
  line("dim", std::to_string(w.dim));
  line("clusters", std::to_string(w.clusters));
  line("fanout", std::to_string(w.fanout));
  line("ranks", std::to_string(w.ranks) + " (" + std::to_string(w.ranks_per_node) +
                    " per node)");
  line("visited nodes L", std::to_string(w.effective_visited_nodes()));
  line("out-degree", std::to_string(w.out_degree));
  line("element bytes/flops", std::to_string(w.search_format.bytes_per_element) + "/" +
                                  std::to_string(w.search_format.flops_per_element));
  out << '\n';
  line("arithmetic intensity", fmt_number(r.arithmetic_intensity) + " FLOP/byte");
  line("flops/query", fmt_number(r.flops_per_query));
  line("bytes/query", fmt_number(r.bytes_per_query) + " B");
  line("qps (single rank)", fmt_number(r.qps));
  out << '\n';
  line("t_kmeans", fmt_seconds(r.t_kmeans));
  line("t_dispatch", fmt_seconds(r.t_dispatch));
  line("t_search", fmt_seconds(r.t_search));
  line("t_combine", fmt_seconds(r.t_combine));
  out << '\n';
  line("t_out_of_core", fmt_seconds(r.t_out_of_core));
  line("t_in_hbm", fmt_seconds(r.t_in_hbm));
  return out.str();
}

std::string report_json(const Workload& w, const CostReport& r) {
  nlohmann::json j;
  j["workload"] = {
      {"batch_size", w.batch_size},
      {"dim", w.dim},
      {"clusters", w.clusters},
      {"fanout", w.fanout},
      {"ranks", w.ranks},
      {"ranks_per_node", w.ranks_per_node},
      {"iterations", w.iterations},
      {"beam_width", w.beam_width},
      {"out_degree", w.out_degree},
      {"k", w.k},
      {"visited_nodes", w.effective_visited_nodes()},
      {"element_bytes", w.search_format.bytes_per_element},
      {"element_flops", w.search_format.flops_per_element},
  };
  j["arithmetic_intensity"] = r.arithmetic_intensity;
  j["flops_per_query"] = r.flops_per_query;
  j["bytes_per_query"] = r.bytes_per_query;
  j["qps"] = r.qps;
  j["t_kmeans_s"] = r.t_kmeans;
  j["t_dispatch_s"] = r.t_dispatch;
  j["t_search_s"] = r.t_search;
  j["t_combine_s"] = r.t_combine;
  j["t_out_of_core_s"] = r.t_out_of_core;
  j["t_in_hbm_s"] = r.t_in_hbm;
  return j.dump(2) + "\n";
}

}  // namespace dvs
