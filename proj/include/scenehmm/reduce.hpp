#ifndef SCENEHMM_REDUCE_HPP
#define SCENEHMM_REDUCE_HPP

// PCA (covariance eigendecomposition) and Lloyd's k-means.

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "scenehmm/common.hpp"

namespace scenehmm {

struct PcaModel {
  Vec mean;                         // R^d
  std::vector<Vec> components;      // k rows, each R^d, orthonormal
  Vec eigenvalues;                  // k values, descending
  bool rank_deficient = false;      // true when rank < k

  int input_dim() const { return static_cast<int>(mean.size()); }
  int output_dim() const { return static_cast<int>(components.size()); }
};

// Top-k eigenvectors of the sample covariance (divisor n-1). Sign fixed so
// each component's largest-magnitude entry is non-negative; ties go to the
// lowest index.
inline PcaModel pca_fit(const std::vector<Vec>& samples, int k) {
  if (samples.size() < 2) throw parameter_error("pca_fit needs >= 2 samples");
  const int n = static_cast<int>(samples.size());
  const int d = static_cast<int>(samples[0].size());
  if (k < 1 || k > std::min(d, n - 1))
    throw parameter_error("pca_fit: k out of range");

  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(samples[i].size()) != d)
      throw dimension_error("pca_fit: inconsistent sample dimensions");
    for (int j = 0; j < d; ++j) x(i, j) = samples[i][j];
  }
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd cov = (x.transpose() * x) / (n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw error("pca_fit: eigendecomposition failed");

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  const double lead = es.eigenvalues()(d - 1);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);  // descending order
    double ev = std::max(0.0, es.eigenvalues()(d - 1 - c));
    if (ev <= 1e-12 * std::max(1.0, lead)) {
      ev = 0.0;
      model.rank_deficient = true;
    }
    int arg = 0;
    for (int j = 1; j < d; ++j)
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    if (v(arg) < 0.0) v = -v;
    model.components.emplace_back(v.data(), v.data() + d);
    model.eigenvalues.push_back(ev);
  }
  return model;
}

inline Vec pca_apply(const PcaModel& model, const Vec& x) {
  if (static_cast<int>(x.size()) != model.input_dim())
    throw dimension_error("pca_apply: dimension mismatch");
  Vec y(model.output_dim(), 0.0);
  for (int c = 0; c < model.output_dim(); ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += model.components[c][j] * (x[j] - model.mean[j]);
    y[c] = s;
  }
  return y;
}

inline Vec pca_reconstruct(const PcaModel& model, const Vec& y) {
  Vec x = model.mean;
  for (int c = 0; c < model.output_dim(); ++c)
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] += model.components[c][j] * y[c];
  return x;
}

// ---------------------------------------------------------------------------
// k-means

namespace detail {

inline Vec mean_of(const std::vector<Vec>& samples) {
  Vec m(samples[0].size(), 0.0);
  for (const auto& s : samples)
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += s[j];
  for (double& v : m) v /= samples.size();
  return m;
}

}  // namespace detail

// Lloyd's algorithm with k-means++-style seeding. k=1 short-circuits to the
// exact mean. Empty clusters are re-seeded at the farthest sample.
inline std::vector<Vec> kmeans_fit(const std::vector<Vec>& samples, int k,
                                   std::uint64_t seed) {
  if (k < 1) throw parameter_error("kmeans_fit: k must be >= 1");
  if (samples.size() < static_cast<std::size_t>(k))
    throw parameter_error("kmeans_fit: fewer samples than clusters");
  if (k == 1) return {detail::mean_of(samples)};

  const std::size_t n = samples.size();
  std::mt19937_64 rng(seed);

  // k-means++ seeding
  std::vector<Vec> centroids;
  centroids.push_back(samples[rng() % n]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, sq(l2_dist(samples[i], c)));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = (static_cast<double>(rng() >> 11) / 9007199254740992.0) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) { pick = i; break; }
      }
    } else {
      pick = rng() % n;
    }
    centroids.push_back(samples[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        double d = sq(l2_dist(samples[i], centroids[c]));
        if (d < best_d) { best_d = d; best = c; }
      }
      if (assign[i] != best) { assign[i] = best; changed = true; }
    }
    if (!changed && iter > 0) break;

    for (int c = 0; c < k; ++c) {
      std::vector<Vec> members;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == c) members.push_back(samples[i]);
      if (members.empty()) {
        // re-seed at the sample farthest from its centroid
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d = sq(l2_dist(samples[i], centroids[assign[i]]));
          if (d > far_d) { far_d = d; far = i; }
        }
        centroids[c] = samples[far];
      } else {
        centroids[c] = detail::mean_of(members);
      }
    }
  }
  return centroids;
}

inline double kmeans_inertia(const std::vector<Vec>& samples,
                             const std::vector<Vec>& centroids) {
  double total = 0.0;
  for (const auto& s : samples) {
    double best = std::numeric_limits<double>::max();
    for (const auto& c : centroids) best = std::min(best, sq(l2_dist(s, c)));
    total += best;
  }
  return total;
}

}  // namespace scenehmm

#endif
