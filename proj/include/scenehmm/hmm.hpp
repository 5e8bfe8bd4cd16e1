#ifndef SCENEHMM_HMM_HPP
#define SCENEHMM_HMM_HPP

// Reference bank construction and the forward-posterior feature vector:
// emissions from nearest same-position exemplar distances, transitions from
// consecutive-position centroid distances, both softmax-normalized.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "scenehmm/common.hpp"
#include "scenehmm/descriptors.hpp"
#include "scenehmm/reduce.hpp"

namespace scenehmm {

struct ReferenceBank {
  int m = 0;    // classes
  int n = 0;    // positions per sequence
  int dim = 0;  // feature dimension
  // exemplars[j*n + t]: all class-j training vectors at position t, with the
  // contributing image id kept for leave-one-out exclusion
  std::vector<std::vector<Vec>> exemplars;
  std::vector<std::vector<std::string>> exemplar_owner;
  std::vector<Vec> centroids;  // centroids[j*n + t] = I(c_j, t)

  const std::vector<Vec>& exemplars_at(int j, int t) const {
    return exemplars[static_cast<std::size_t>(j) * n + t];
  }
  const Vec& centroid_at(int j, int t) const {
    return centroids[static_cast<std::size_t>(j) * n + t];
  }
};

struct AlphaMatrix {
  int n = 0, m = 0;
  std::vector<Vec> rows;  // n rows of m probabilities, each summing to 1
};

struct HmmFeatureVector {
  Vec v;  // class-major: v[j*n + t] = alpha[t][j], length m*n
};

// ---------------------------------------------------------------------------

inline ReferenceBank build_bank(
    const std::vector<std::pair<const GridSequence*, int>>& sequences,
    int m) {
  if (sequences.empty()) throw data_error("build_bank: no sequences");
  const GridSequence& first = *sequences.front().first;
  const int n = static_cast<int>(first.features.size());
  const int dim = first.dim;

  ReferenceBank bank;
  bank.m = m;
  bank.n = n;
  bank.dim = dim;
  bank.exemplars.resize(static_cast<std::size_t>(m) * n);
  bank.exemplar_owner.resize(bank.exemplars.size());

  std::vector<int> per_class(m, 0);
  for (const auto& [seq, cls] : sequences) {
    if (cls < 0 || cls >= m) throw data_error("build_bank: class out of range");
    if (static_cast<int>(seq->features.size()) != n || seq->dim != dim ||
        seq->g != first.g || seq->descriptor_id != first.descriptor_id)
      throw dimension_error("build_bank: inconsistent sequences");
    ++per_class[cls];
    for (int t = 0; t < n; ++t) {
      std::size_t slot = static_cast<std::size_t>(cls) * n + t;
      bank.exemplars[slot].push_back(seq->features[t]);
      bank.exemplar_owner[slot].push_back(seq->id);
    }
  }
  for (int j = 0; j < m; ++j)
    if (per_class[j] == 0)
      throw data_error("build_bank: class " + std::to_string(j) +
                       " has no training sequences");

  bank.centroids.resize(bank.exemplars.size());
  for (std::size_t s = 0; s < bank.exemplars.size(); ++s)
    bank.centroids[s] = kmeans_fit(bank.exemplars[s], 1, 0)[0];
  return bank;
}

namespace detail {

// softmax over negative distances, max-subtracted; gaps capped at 700 so the
// exponentials never underflow to an all-zero vector
inline Vec softmax_neg_distances(const Vec& d) {
  double dmin = *std::min_element(d.begin(), d.end());
  Vec p(d.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    p[i] = std::exp(-std::min(d[i] - dmin, 700.0));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace detail

// Emission vector: softmax over j of minus the minimum Euclidean distance
// from x_t to class j's exemplars at position t. Exemplars contributed by
// exclude_id are skipped (leave-one-out for training images).
inline Vec emission(const Vec& x_t, int t, const ReferenceBank& bank,
                    const std::optional<std::string>& exclude_id = {}) {
  if (static_cast<int>(x_t.size()) != bank.dim)
    throw dimension_error("emission: dimension mismatch");
  Vec d(bank.m);
  for (int j = 0; j < bank.m; ++j) {
    std::size_t slot = static_cast<std::size_t>(j) * bank.n + t;
    const auto& ex = bank.exemplars[slot];
    const auto& owners = bank.exemplar_owner[slot];
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (exclude_id && owners[i] == *exclude_id) continue;
      best = std::min(best, l2_dist(x_t, ex[i]));
    }
    if (best == std::numeric_limits<double>::max())
      throw data_error("emission: exemplar list empty after exclusion");
    d[j] = best;
  }
  return detail::softmax_neg_distances(d);
}

// Row k: softmax over j of minus the distance between class k's centroid at
// position t-1 and class j's centroid at position t.
inline std::vector<Vec> transition(int t, const ReferenceBank& bank) {
  if (t < 1 || t >= bank.n)
    throw parameter_error("transition: position out of range");
  std::vector<Vec> rows(bank.m);
  for (int k = 0; k < bank.m; ++k) {
    Vec d(bank.m);
    for (int j = 0; j < bank.m; ++j)
      d[j] = l2_dist(bank.centroid_at(k, t - 1), bank.centroid_at(j, t));
    rows[k] = detail::softmax_neg_distances(d);
  }
  return rows;
}

// Forward recursion with per-step normalization (the scaled forward variable
// is the per-position class posterior). Uniform prior at t=0 cancels under
// normalization.
inline AlphaMatrix forward(const GridSequence& seq, const ReferenceBank& bank,
                           const std::optional<std::string>& exclude_id = {}) {
  if (static_cast<int>(seq.features.size()) != bank.n)
    throw dimension_error("forward: sequence length != bank positions");
  AlphaMatrix alpha;
  alpha.n = bank.n;
  alpha.m = bank.m;
  alpha.rows.resize(bank.n);

  alpha.rows[0] = emission(seq.features[0], 0, bank, exclude_id);
  for (int t = 1; t < bank.n; ++t) {
    Vec em = emission(seq.features[t], t, bank, exclude_id);
    auto trans = transition(t, bank);
    Vec row(bank.m, 0.0);
    double total = 0.0;
    for (int j = 0; j < bank.m; ++j) {
      double mix = 0.0;
      for (int k = 0; k < bank.m; ++k) mix += trans[k][j] * alpha.rows[t - 1][k];
      row[j] = em[j] * mix;
      total += row[j];
    }
    for (double& v : row) v /= total;
    alpha.rows[t] = std::move(row);
  }
  return alpha;
}

// Class-major flattening: v[j*n + t] = alpha[t][j].
inline HmmFeatureVector feature_vector(const AlphaMatrix& alpha) {
  HmmFeatureVector fv;
  fv.v.resize(static_cast<std::size_t>(alpha.m) * alpha.n);
  for (int j = 0; j < alpha.m; ++j)
    for (int t = 0; t < alpha.n; ++t)
      fv.v[static_cast<std::size_t>(j) * alpha.n + t] = alpha.rows[t][j];
  return fv;
}

}  // namespace scenehmm

#endif
