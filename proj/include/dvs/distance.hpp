#pragma once

#include <span>

namespace dvs {

// Sum of squared differences, accumulated in double, rounded to float.
float squared_l2(std::span<const float> a, std::span<const float> b);

// Same distance via the expansion |a|^2 + |b|^2 - 2 a.b. Kept as a separate
// code path; batched assignment uses this form with cached norms.
float squared_l2_expanded(std::span<const float> a, std::span<const float> b);

double dot(std::span<const float> a, std::span<const float> b);
double squared_norm(std::span<const float> a);

}  // namespace dvs
