#include "dvs/vecio.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binio.hpp"
#include "dvs/errors.hpp"

namespace dvs {

namespace {

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw format_error("cannot open " + path.string() + " for reading", 0);
  }
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw format_error("cannot open " + path.string() + " for writing", 0);
  }
  return out;
}

}  // namespace

Dataset load_fvecs(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  Dataset ds;
  std::uint64_t offset = 0;
  std::size_t record = 0;
  while (true) {
    std::int32_t dim = 0;
    if (!binio::get_i32(in, dim)) {
      if (in.gcount() == 0) break;  // clean EOF at a record boundary
      throw format_error(path.string() + ": truncated dimension field in record " +
                             std::to_string(record),
                         offset);
    }
    if (dim <= 0) {
      throw format_error(path.string() + ": non-positive dimension " +
                             std::to_string(dim) + " in record " + std::to_string(record),
                         offset);
    }
    if (record == 0) {
      ds.dim = dim;
    } else if (dim != ds.dim) {
      throw format_error(path.string() + ": record " + std::to_string(record) +
                             " has dimension " + std::to_string(dim) + ", expected " +
                             std::to_string(ds.dim),
                         offset);
    }
    offset += 4;
    for (std::int32_t j = 0; j < dim; ++j) {
      float x = 0;
      if (!binio::get_f32(in, x)) {
        throw format_error(path.string() + ": truncated payload in record " +
                               std::to_string(record),
                           offset);
      }
      if (!std::isfinite(x)) {
        throw format_error(path.string() + ": non-finite value in record " +
                               std::to_string(record),
                           offset);
      }
      ds.data.push_back(x);
      offset += 4;
    }
    ++record;
  }
  if (record == 0) {
    throw format_error(path.string() + ": empty fvecs file", 0);
  }
  return ds;
}

void save_fvecs(const Dataset& ds, const std::filesystem::path& path) {
  validate(ds);
  std::ofstream out = open_for_write(path);
  const std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) {
    binio::put_i32(out, ds.dim);
    for (const float x : ds[i]) {
      binio::put_f32(out, x);
    }
  }
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::vector<std::vector<std::int32_t>> rows;
  std::uint64_t offset = 0;
  std::int32_t expected_dim = -1;
  while (true) {
    std::int32_t dim = 0;
    if (!binio::get_i32(in, dim)) {
      if (in.gcount() == 0) break;
      throw format_error(path.string() + ": truncated dimension field in record " +
                             std::to_string(rows.size()),
                         offset);
    }
    if (dim <= 0) {
      throw format_error(path.string() + ": non-positive dimension " +
                             std::to_string(dim) + " in record " +
                             std::to_string(rows.size()),
                         offset);
    }
    if (expected_dim < 0) {
      expected_dim = dim;
    } else if (dim != expected_dim) {
      throw format_error(path.string() + ": record " + std::to_string(rows.size()) +
                             " has dimension " + std::to_string(dim) + ", expected " +
                             std::to_string(expected_dim),
                         offset);
    }
    offset += 4;
    std::vector<std::int32_t> row(static_cast<std::size_t>(dim));
    for (std::int32_t j = 0; j < dim; ++j) {
      if (!binio::get_i32(in, row[static_cast<std::size_t>(j)])) {
        throw format_error(path.string() + ": truncated payload in record " +
                               std::to_string(rows.size()),
                           offset);
      }
      offset += 4;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw format_error(path.string() + ": empty ivecs file", 0);
  }
  return rows;
}

void save_ivecs(const std::vector<std::vector<std::int32_t>>& rows,
                const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  for (const auto& row : rows) {
    binio::put_i32(out, static_cast<std::int32_t>(row.size()));
    for (const std::int32_t v : row) {
      binio::put_i32(out, v);
    }
  }
  out.flush();
  if (!out) {
    throw format_error("write failure on " + path.string(), 0);
  }
}

}  // namespace dvs
