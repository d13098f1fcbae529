#pragma once

#include <span>
#include <vector>

#include "dvs/dataset.hpp"

namespace dvs {

// Exact k nearest rows of db to q by squared L2, ascending (dist, id).
std::vector<ScoredId> brute_force_topk(const Dataset& db, std::span<const float> q, int k);

// |result ids ∩ truth ids[0..k)| / k. Requires truth.size() >= k.
double recall_at_k(std::span<const ScoredId> result, std::span<const ScoredId> truth, int k);

}  // namespace dvs
