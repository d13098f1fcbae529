#pragma once

#include <filesystem>

#include "dvs/index.hpp"

namespace dvs {

// Binary index container, magic "FNSY", little-endian throughout.
// Layout: magic, u32 version, then five length-prefixed sections
// (centroids, placement, per-cluster global id lists, per-cluster adjacency,
// per-cluster vector payloads). save/load round-trips bit-exactly.
void save_index(const BuiltIndex& index, const std::filesystem::path& path);
BuiltIndex load_index(const std::filesystem::path& path);

}  // namespace dvs
