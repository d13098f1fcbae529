#include "dvs/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "dvs/distance.hpp"
#include "dvs/errors.hpp"

namespace dvs {

namespace {

// Deterministic uniforms straight from the engine output; the standard
// distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

struct AssignScratch {
  std::vector<double> center_norms;
  std::vector<double> point_norms;
};

void refresh_center_norms(const Centroids& cents, std::vector<double>& norms) {
  const int c = cents.count();
  norms.resize(static_cast<std::size_t>(c));
  for (int j = 0; j < c; ++j) {
    norms[static_cast<std::size_t>(j)] = squared_norm(cents[j]);
  }
}

// Distance matrix row for one point via |p|^2 + |c|^2 - 2 p.c, rounded to
// float so ranking matches the global (float dist, id) rule.
float expanded_dist(std::span<const float> p, double point_norm,
                    std::span<const float> center, double center_norm) {
  const double d = point_norm + center_norm - 2.0 * dot(p, center);
  return static_cast<float>(d < 0.0 ? 0.0 : d);
}

std::uint32_t nearest_center(std::span<const float> p, double point_norm,
                             const Centroids& cents,
                             const std::vector<double>& center_norms) {
  const int c = cents.count();
  std::uint32_t best = 0;
  float best_dist = expanded_dist(p, point_norm, cents[0], center_norms[0]);
  for (int j = 1; j < c; ++j) {
    const float d =
        expanded_dist(p, point_norm, cents[j], center_norms[static_cast<std::size_t>(j)]);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return best;
}

void assign_all(const Dataset& db, const Centroids& cents, AssignScratch& scratch,
                std::vector<std::uint32_t>& labels) {
  refresh_center_norms(cents, scratch.center_norms);
  const std::size_t n = db.size();
  labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = nearest_center(db[i], scratch.point_norms[i], cents, scratch.center_norms);
  }
}

// Fills every empty cluster by moving the point farthest from its own
// centroid (taken from clusters that can spare one) and planting the centroid
// on that point. Returns false if nothing could be moved.
bool repair_empty_clusters(const Dataset& db, Centroids& cents,
                           std::vector<std::uint32_t>& labels) {
  const int c = cents.count();
  const std::size_t n = db.size();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(c), 0);
  for (const std::uint32_t l : labels) ++sizes[l];

  bool changed = false;
  for (int e = 0; e < c; ++e) {
    if (sizes[static_cast<std::size_t>(e)] > 0) continue;
    std::size_t worst_point = n;
    float worst_dist = -1.0f;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[labels[i]] < 2) continue;  // do not empty another cluster
      const float d = squared_l2(db[i], cents[labels[i]]);
      if (d > worst_dist) {  // ties keep the lower id (first seen)
        worst_dist = d;
        worst_point = i;
      }
    }
    if (worst_point == n) return false;
    const std::span<const float> p = db[worst_point];
    std::copy(p.begin(), p.end(),
              cents.centers.begin() + static_cast<std::size_t>(e) * cents.dim);
    --sizes[labels[worst_point]];
    labels[worst_point] = static_cast<std::uint32_t>(e);
    ++sizes[static_cast<std::size_t>(e)];
    changed = true;
  }
  return changed;
}

void update_means(const Dataset& db, const std::vector<std::uint32_t>& labels,
                  Centroids& cents) {
  const int c = cents.count();
  const int dim = cents.dim;
  std::vector<double> sums(static_cast<std::size_t>(c) * dim, 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(c), 0);
  const std::size_t n = db.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const float> p = db[i];
    double* row = sums.data() + static_cast<std::size_t>(labels[i]) * dim;
    for (int j = 0; j < dim; ++j) row[j] += p[static_cast<std::size_t>(j)];
    ++counts[labels[i]];
  }
  for (int cl = 0; cl < c; ++cl) {
    if (counts[static_cast<std::size_t>(cl)] == 0) continue;  // repaired separately
    const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(cl)]);
    float* row = cents.centers.data() + static_cast<std::size_t>(cl) * dim;
    const double* s = sums.data() + static_cast<std::size_t>(cl) * dim;
    for (int j = 0; j < dim; ++j) row[j] = static_cast<float>(s[j] * inv);
  }
}

double compute_wcss(const Dataset& db, const std::vector<std::uint32_t>& labels,
                    const Centroids& cents) {
  double acc = 0.0;
  const std::size_t n = db.size();
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(squared_l2(db[i], cents[labels[i]]));
  }
  return acc;
}

Centroids init_kmeanspp(const Dataset& db, int clusters, std::mt19937_64& rng) {
  const std::size_t n = db.size();
  Centroids cents;
  cents.dim = db.dim;
  cents.centers.reserve(static_cast<std::size_t>(clusters) * db.dim);

  auto push_center = [&](std::size_t idx) {
    const std::span<const float> p = db[idx];
    cents.centers.insert(cents.centers.end(), p.begin(), p.end());
  };

  push_center(uniform_index(rng, n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = static_cast<double>(squared_l2(db[i], cents[0]));
  }
  for (int j = 1; j < clusters; ++j) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);  // all residual mass gone (duplicates)
    } else {
      const double r = uniform01(rng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
    }
    push_center(pick);
    const std::span<const float> latest = cents[j];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(squared_l2(db[i], latest));
      if (d < d2[i]) d2[i] = d;
    }
  }
  return cents;
}

}  // namespace

Centroids kmeans_train(const Dataset& db, int clusters, int max_iters,
                       std::uint64_t seed, KmeansStats* stats) {
  validate(db);
  const std::size_t n = db.size();
  if (clusters < 1 || static_cast<std::size_t>(clusters) > n) {
    throw std::invalid_argument("kmeans_train: clusters=" + std::to_string(clusters) +
                                " out of range for database of size " + std::to_string(n));
  }
  if (max_iters < 1) {
    throw std::invalid_argument("kmeans_train: max_iters must be >= 1");
  }

  std::mt19937_64 rng(seed);
  Centroids cents = init_kmeanspp(db, clusters, rng);

  AssignScratch scratch;
  scratch.point_norms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    scratch.point_norms[i] = squared_norm(db[i]);
  }

  if (stats) {
    stats->wcss.clear();
    stats->iterations = 0;
  }

  std::vector<std::uint32_t> labels, prev_labels;
  for (int iter = 0; iter < max_iters; ++iter) {
    assign_all(db, cents, scratch, labels);
    repair_empty_clusters(db, cents, labels);
    if (labels == prev_labels) break;  // fixed point: means would not move
    update_means(db, labels, cents);
    if (stats) {
      stats->wcss.push_back(compute_wcss(db, labels, cents));
      stats->iterations = iter + 1;
    }
    prev_labels = labels;
  }

  // The returned centroids must induce a partition with no empty cluster.
  for (int round = 0; round <= clusters; ++round) {
    assign_all(db, cents, scratch, labels);
    std::vector<bool> seen(static_cast<std::size_t>(clusters), false);
    for (const std::uint32_t l : labels) seen[l] = true;
    if (std::find(seen.begin(), seen.end(), false) == seen.end()) {
      return cents;
    }
    if (!repair_empty_clusters(db, cents, labels)) break;
  }
  throw std::invalid_argument(
      "kmeans_train: cannot keep " + std::to_string(clusters) +
      " clusters non-empty; the dataset has too few distinct points");
}

Assignment assign_top_c(const Centroids& cents, const Dataset& queries, int c) {
  validate(queries);
  const int total = cents.count();
  if (total < 1) {
    throw std::invalid_argument("assign_top_c: empty centroids");
  }
  if (c < 1 || c > total) {
    throw std::invalid_argument("assign_top_c: c=" + std::to_string(c) +
                                " out of range for " + std::to_string(total) +
                                " clusters");
  }
  if (queries.dim != cents.dim) {
    throw std::invalid_argument("assign_top_c: query dim " + std::to_string(queries.dim) +
                                " != centroid dim " + std::to_string(cents.dim));
  }

  std::vector<double> center_norms;
  refresh_center_norms(cents, center_norms);

  Assignment out(queries.size());
  std::vector<ScoredId> row(static_cast<std::size_t>(total));
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const std::span<const float> q = queries[qi];
    const double qn = squared_norm(q);
    for (int j = 0; j < total; ++j) {
      row[static_cast<std::size_t>(j)] = {
          static_cast<std::uint32_t>(j),
          expanded_dist(q, qn, cents[j], center_norms[static_cast<std::size_t>(j)])};
    }
    std::partial_sort(row.begin(), row.begin() + c, row.end(), scored_less);
    std::vector<std::uint32_t>& ids = out[qi];
    ids.resize(static_cast<std::size_t>(c));
    for (int j = 0; j < c; ++j) {
      ids[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)].id;
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> partition_database(const Dataset& db,
                                                           const Centroids& cents) {
  validate(db);
  if (db.dim != cents.dim) {
    throw std::invalid_argument("partition_database: dim mismatch");
  }
  std::vector<double> center_norms;
  refresh_center_norms(cents, center_norms);

  std::vector<std::vector<std::uint32_t>> parts(
      static_cast<std::size_t>(cents.count()));
  const std::size_t n = db.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const float> p = db[i];
    const std::uint32_t label = nearest_center(p, squared_norm(p), cents, center_norms);
    parts[label].push_back(static_cast<std::uint32_t>(i));
  }
  return parts;
}

}  // namespace dvs
