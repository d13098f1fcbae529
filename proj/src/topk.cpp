#include "dvs/topk.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dvs/distance.hpp"

namespace dvs {

std::vector<ScoredId> brute_force_topk(const Dataset& db, std::span<const float> q,
                                       int k) {
  const std::size_t n = db.size();
  if (n == 0) {
    throw std::invalid_argument("brute_force_topk: empty database");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("brute_force_topk: k=" + std::to_string(k) +
                                " out of range for database of size " +
                                std::to_string(n));
  }
  std::vector<ScoredId> scored(n);
  for (std::size_t i = 0; i < n; ++i) {
    scored[i] = {static_cast<std::uint32_t>(i), squared_l2(q, db[i])};
  }
  std::partial_sort(scored.begin(), scored.begin() + k, scored.end(), scored_less);
  scored.resize(static_cast<std::size_t>(k));
  return scored;
}

double recall_at_k(std::span<const ScoredId> result, std::span<const ScoredId> truth,
                   int k) {
  if (k < 1 || truth.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("recall_at_k: truth has " +
                                std::to_string(truth.size()) +
                                " entries, need at least k=" + std::to_string(k));
  }
  std::unordered_set<std::uint32_t> truth_ids;
  truth_ids.reserve(static_cast<std::size_t>(k) * 2);
  for (int i = 0; i < k; ++i) {
    truth_ids.insert(truth[i].id);
  }
  std::size_t hitcount = 0;
  for (const ScoredId& r : result) {
    hitcount += truth_ids.count(r.id);
  }
  return static_cast<double>(hitcount) / static_cast<double>(k);
}

}  // namespace dvs
