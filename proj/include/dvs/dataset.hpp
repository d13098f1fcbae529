#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dvs {

// Row-major collection of fixed-dimension float32 vectors. Vector ids are the
// dense row indices 0..size()-1.
struct Dataset {
  int dim = 0;
  std::vector<float> data;

  std::size_t size() const {
    return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0;
  }
  std::span<const float> operator[](std::size_t id) const {
    return {data.data() + id * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  void append(std::span<const float> v);
};

// Enforces the Dataset invariants: positive dim, whole rows, finite elements.
// Throws std::invalid_argument on violation.
void validate(const Dataset& ds);

// Copies rows [begin, end) into a new Dataset.
Dataset slice(const Dataset& ds, std::size_t begin, std::size_t end);

struct ScoredId {
  std::uint32_t id = 0;
  float dist = 0.0f;
};

inline bool operator==(ScoredId a, ScoredId b) {
  return a.id == b.id && a.dist == b.dist;
}

// Global result ordering: ascending distance, ties broken by lower id.
inline bool scored_less(ScoredId a, ScoredId b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

// Element width and per-element distance cost as seen by the cost model.
// Functional arithmetic is always float32; this only prices traffic.
struct ElementFormat {
  int bytes_per_element = 4;  // 2 (fp16) or 4 (fp32)
  int flops_per_element = 2;  // 2 or 3

  static ElementFormat fp32(int flops = 2) { return {4, flops}; }
  static ElementFormat fp16(int flops = 2) { return {2, flops}; }
};

void validate(const ElementFormat& fmt);

}  // namespace dvs
