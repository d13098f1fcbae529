#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dvs/dataset.hpp"

namespace dvs {

// fvecs/ivecs: repeated records [int32 dim][dim x payload], little-endian.
// Payload is float32 for fvecs and int32 for ivecs. All records in one file
// must share the same dim.

Dataset load_fvecs(const std::filesystem::path& path);
void save_fvecs(const Dataset& ds, const std::filesystem::path& path);

std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path);
void save_ivecs(const std::vector<std::vector<std::int32_t>>& rows,
                const std::filesystem::path& path);

}  // namespace dvs
