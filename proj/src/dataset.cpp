#include "dvs/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dvs {

void Dataset::append(std::span<const float> v) {
  if (static_cast<int>(v.size()) != dim) {
    throw std::invalid_argument("Dataset::append: vector has " +
                                std::to_string(v.size()) + " elements, expected " +
                                std::to_string(dim));
  }
  data.insert(data.end(), v.begin(), v.end());
}

void validate(const Dataset& ds) {
  if (ds.dim <= 0) {
    throw std::invalid_argument("Dataset: dim must be positive, got " +
                                std::to_string(ds.dim));
  }
  if (ds.data.size() % static_cast<std::size_t>(ds.dim) != 0) {
    throw std::invalid_argument("Dataset: data size " + std::to_string(ds.data.size()) +
                                " is not a multiple of dim " + std::to_string(ds.dim));
  }
  for (std::size_t i = 0; i < ds.data.size(); ++i) {
    if (!std::isfinite(ds.data[i])) {
      throw std::invalid_argument("Dataset: non-finite element at flat index " +
                                  std::to_string(i));
    }
  }
}

Dataset slice(const Dataset& ds, std::size_t begin, std::size_t end) {
  if (begin > end || end > ds.size()) {
    throw std::invalid_argument("Dataset slice out of range");
  }
  Dataset out;
  out.dim = ds.dim;
  const std::size_t d = static_cast<std::size_t>(ds.dim);
  out.data.assign(ds.data.begin() + begin * d, ds.data.begin() + end * d);
  return out;
}

void validate(const ElementFormat& fmt) {
  if (fmt.bytes_per_element != 2 && fmt.bytes_per_element != 4) {
    throw std::invalid_argument("ElementFormat: bytes_per_element must be 2 or 4, got " +
                                std::to_string(fmt.bytes_per_element));
  }
  if (fmt.flops_per_element != 2 && fmt.flops_per_element != 3) {
    throw std::invalid_argument("ElementFormat: flops_per_element must be 2 or 3, got " +
                                std::to_string(fmt.flops_per_element));
  }
}

}  // namespace dvs
