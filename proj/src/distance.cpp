#include "dvs/distance.hpp"

#include <stdexcept>
#include <string>

namespace dvs {

namespace {

void require_same_dim(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

}  // namespace

float squared_l2(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return static_cast<float>(acc);
}

float squared_l2_expanded(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a, b);
  const double dist = squared_norm(a) + squared_norm(b) - 2.0 * dot(a, b);
  return static_cast<float>(dist < 0.0 ? 0.0 : dist);
}

double dot(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double squared_norm(std::span<const float> a) {
  double acc = 0.0;
  for (const float x : a) {
    acc += static_cast<double>(x) * static_cast<double>(x);
  }
  return acc;
}

}  // namespace dvs
