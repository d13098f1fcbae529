#include "dvs/index_file.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "binio.hpp"
#include "dvs/errors.hpp"

namespace dvs {

namespace {

constexpr char kMagic[4] = {'F', 'N', 'S', 'Y'};
constexpr std::uint32_t kVersion = 1;

enum SectionId : std::uint32_t {
  kCentroids = 1,
  kPlacement = 2,
  kGlobalIds = 3,
  kAdjacency = 4,
  kVectors = 5,
};

// Sections are serialized into memory first so the byte length prefix can be
// written without seeking.
void write_section(std::ofstream& out, std::uint32_t id, const std::string& payload) {
  binio::put_u32(out, id);
  binio::put_u64(out, payload.size());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

class SectionReader {
 public:
  SectionReader(std::string payload, std::uint64_t file_offset, std::string name)
      : data_(std::move(payload)), base_(file_offset), name_(std::move(name)) {}

  std::uint32_t u32() {
    if (pos_ + 4 > data_.size()) {
      throw format_error("index file: truncated " + name_ + " section", base_ + pos_);
    }
    const unsigned char* b = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
    pos_ += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::uint64_t offset() const { return base_ + pos_; }

  void expect_consumed() const {
    if (pos_ != data_.size()) {
      throw format_error("index file: trailing bytes in " + name_ + " section",
                         base_ + pos_);
    }
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
  std::uint64_t base_;
  std::string name_;
};

void append_u32(std::string& buf, std::uint32_t v) {
  std::ostringstream tmp;
  binio::put_u32(tmp, v);
  buf += tmp.str();
}

void append_f32(std::string& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(buf, bits);
}

}  // namespace

void save_index(const BuiltIndex& index, const std::filesystem::path& path) {
  validate(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw format_error("cannot open " + path.string() + " for writing", 0);
  }
  out.write(kMagic, 4);
  binio::put_u32(out, kVersion);

  const std::uint32_t clusters = static_cast<std::uint32_t>(index.clusters());
  const std::uint32_t dim = static_cast<std::uint32_t>(index.dim());

  {
    std::string payload;
    append_u32(payload, clusters);
    append_u32(payload, dim);
    for (const float x : index.centroids.centers) append_f32(payload, x);
    write_section(out, kCentroids, payload);
  }
  {
    std::string payload;
    append_u32(payload, clusters);
    append_u32(payload, static_cast<std::uint32_t>(index.placement.ranks));
    for (const std::uint32_t r : index.placement.cluster_to_rank) append_u32(payload, r);
    write_section(out, kPlacement, payload);
  }
  {
    std::string payload;
    append_u32(payload, clusters);
    for (const GraphIndex& g : index.graphs) {
      append_u32(payload, static_cast<std::uint32_t>(g.global_ids.size()));
      for (const std::uint32_t id : g.global_ids) append_u32(payload, id);
    }
    write_section(out, kGlobalIds, payload);
  }
  {
    std::string payload;
    append_u32(payload, clusters);
    append_u32(payload, static_cast<std::uint32_t>(index.out_degree));
    for (const GraphIndex& g : index.graphs) {
      append_u32(payload, static_cast<std::uint32_t>(g.size()));
      for (const std::uint32_t id : g.adjacency) append_u32(payload, id);
    }
    write_section(out, kAdjacency, payload);
  }
  {
    std::string payload;
    append_u32(payload, clusters);
    append_u32(payload, dim);
    for (const GraphIndex& g : index.graphs) {
      append_u32(payload, static_cast<std::uint32_t>(g.size()));
      for (const float x : g.vectors.data) append_f32(payload, x);
    }
    write_section(out, kVectors, payload);
  }
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

BuiltIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw format_error("cannot open " + path.string() + " for reading", 0);
  }
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw format_error("index file: bad magic (expected FNSY)", 0);
  }
  std::uint32_t version = 0;
  if (!binio::get_u32(in, version) || version != kVersion) {
    throw format_error("index file: unsupported version", 4);
  }

  std::map<std::uint32_t, SectionReader> sections;
  std::uint64_t offset = 8;
  while (true) {
    std::uint32_t id = 0;
    if (!binio::get_u32(in, id)) {
      if (in.gcount() == 0) break;
      throw format_error("index file: truncated section header", offset);
    }
    std::uint64_t length = 0;
    if (!binio::get_u64(in, length)) {
      throw format_error("index file: truncated section length", offset + 4);
    }
    std::string payload(length, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(length));
    if (static_cast<std::uint64_t>(in.gcount()) != length) {
      throw format_error("index file: truncated section payload", offset + 12);
    }
    std::string name;
    switch (id) {
      case kCentroids: name = "centroids"; break;
      case kPlacement: name = "placement"; break;
      case kGlobalIds: name = "global ids"; break;
      case kAdjacency: name = "adjacency"; break;
      case kVectors: name = "vectors"; break;
      default:
        throw format_error("index file: unknown section id " + std::to_string(id), offset);
    }
    if (!sections.emplace(id, SectionReader(std::move(payload), offset + 12, name)).second) {
      throw format_error("index file: duplicate " + name + " section", offset);
    }
    offset += 12 + length;
  }
  for (const std::uint32_t id : {kCentroids, kPlacement, kGlobalIds, kAdjacency, kVectors}) {
    if (!sections.count(id)) {
      throw format_error("index file: missing section id " + std::to_string(id), offset);
    }
  }

  BuiltIndex index;

  SectionReader& cent = sections.at(kCentroids);
  const std::uint32_t clusters = cent.u32();
  const std::uint32_t dim = cent.u32();
  if (clusters == 0 || dim == 0) {
    throw format_error("index file: empty centroids section", cent.offset());
  }
  index.centroids.dim = static_cast<int>(dim);
  index.centroids.centers.resize(static_cast<std::size_t>(clusters) * dim);
  for (float& x : index.centroids.centers) x = cent.f32();
  cent.expect_consumed();

  SectionReader& plac = sections.at(kPlacement);
  if (plac.u32() != clusters) {
    throw format_error("index file: placement cluster count mismatch", plac.offset());
  }
  index.placement.ranks = static_cast<int>(plac.u32());
  index.placement.cluster_to_rank.resize(clusters);
  for (std::uint32_t& r : index.placement.cluster_to_rank) {
    r = plac.u32();
    if (r >= static_cast<std::uint32_t>(index.placement.ranks)) {
      throw format_error("index file: placement rank out of range", plac.offset());
    }
  }
  plac.expect_consumed();

  SectionReader& gids = sections.at(kGlobalIds);
  if (gids.u32() != clusters) {
    throw format_error("index file: global id cluster count mismatch", gids.offset());
  }
  std::vector<std::vector<std::uint32_t>> id_lists(clusters);
  for (auto& ids : id_lists) {
    ids.resize(gids.u32());
    for (std::uint32_t& id : ids) id = gids.u32();
  }
  gids.expect_consumed();

  SectionReader& adj = sections.at(kAdjacency);
  if (adj.u32() != clusters) {
    throw format_error("index file: adjacency cluster count mismatch", adj.offset());
  }
  index.out_degree = static_cast<int>(adj.u32());
  if (index.out_degree < 1) {
    throw format_error("index file: non-positive out-degree", adj.offset());
  }
  std::vector<std::vector<std::uint32_t>> adj_lists(clusters);
  for (std::size_t cl = 0; cl < clusters; ++cl) {
    const std::uint32_t count = adj.u32();
    if (count != id_lists[cl].size()) {
      throw format_error("index file: adjacency node count mismatch in cluster " +
                             std::to_string(cl),
                         adj.offset());
    }
    adj_lists[cl].resize(static_cast<std::size_t>(count) * index.out_degree);
    for (std::uint32_t& id : adj_lists[cl]) {
      id = adj.u32();
      if (id >= count) {
        throw format_error("index file: neighbor id out of range in cluster " +
                               std::to_string(cl),
                           adj.offset());
      }
    }
  }
  adj.expect_consumed();

  SectionReader& vecs = sections.at(kVectors);
  if (vecs.u32() != clusters) {
    throw format_error("index file: vector cluster count mismatch", vecs.offset());
  }
  if (vecs.u32() != dim) {
    throw format_error("index file: vector dim mismatch", vecs.offset());
  }
  index.graphs.resize(clusters);
  for (std::size_t cl = 0; cl < clusters; ++cl) {
    GraphIndex& g = index.graphs[cl];
    const std::uint32_t count = vecs.u32();
    if (count != id_lists[cl].size()) {
      throw format_error("index file: vector node count mismatch in cluster " +
                             std::to_string(cl),
                         vecs.offset());
    }
    g.vectors.dim = static_cast<int>(dim);
    g.vectors.data.resize(static_cast<std::size_t>(count) * dim);
    for (float& x : g.vectors.data) x = vecs.f32();
    g.global_ids = std::move(id_lists[cl]);
    g.out_degree = index.out_degree;
    g.adjacency = std::move(adj_lists[cl]);
    g.entry_order = compute_entry_order(g.vectors);
  }
  vecs.expect_consumed();

  validate(index);
  return index;
}

}  // namespace dvs
