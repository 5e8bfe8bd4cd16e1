#ifndef SCENEHMM_ENSEMBLE_HPP
#define SCENEHMM_ENSEMBLE_HPP

// Classifier fusion: simplex-constrained minimization of the summed residual
// norms between weighted score combinations and one-hot labels, solved by
// projected subgradient descent.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "scenehmm/common.hpp"

namespace scenehmm {

struct ScoreTensor {
  std::vector<std::string> classifier_ids;        // C entries
  std::vector<std::string> image_ids;             // N entries
  std::vector<std::vector<Vec>> scores;           // [C][N] rows of length m
  int m = 0;

  int num_classifiers() const { return static_cast<int>(classifier_ids.size()); }
  int num_images() const { return static_cast<int>(image_ids.size()); }
};

struct EnsembleWeights {
  Vec w;  // nonnegative, sums to 1
};

// Euclidean projection onto the probability simplex (sort-threshold).
inline EnsembleWeights simplex_project(const Vec& v) {
  const int c = static_cast<int>(v.size());
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < c; ++i) {
    cum += u[i];
    double t = (cum - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  EnsembleWeights out;
  out.w.resize(c);
  for (int i = 0; i < c; ++i) out.w[i] = std::max(0.0, v[i] - theta);
  return out;
}

// Sum over images of the unsquared Euclidean residual norm
// || sum_i w_i p_i(x_j) - d_j ||_2. The squared variant is selectable.
inline double objective(const Vec& w, const ScoreTensor& s,
                        const std::vector<int>& labels,
                        bool squared = false) {
  if (static_cast<int>(w.size()) != s.num_classifiers())
    throw dimension_error("objective: weight count != classifier count");
  if (static_cast<int>(labels.size()) != s.num_images())
    throw dimension_error("objective: label count != image count");
  double total = 0.0;
  for (int j = 0; j < s.num_images(); ++j) {
    double r2 = 0.0;
    for (int k = 0; k < s.m; ++k) {
      double fused = 0.0;
      for (int i = 0; i < s.num_classifiers(); ++i)
        fused += w[i] * s.scores[i][j][k];
      double r = fused - (labels[j] == k ? 1.0 : 0.0);
      r2 += r * r;
    }
    total += squared ? r2 : std::sqrt(r2);
  }
  return total;
}

// Projected subgradient descent from the uniform weight vector, step
// 0.5/sqrt(k+1), returning the best iterate. The uniform start and every
// one-hot vertex are kept as candidates, so the result never loses to them.
inline EnsembleWeights solve_weights(const ScoreTensor& s,
                                     const std::vector<int>& labels,
                                     int iters, bool squared = false) {
  if (iters < 1) throw parameter_error("solve_weights: iters must be >= 1");
  const int c = s.num_classifiers();
  if (c < 1) throw parameter_error("solve_weights: no classifiers");
  if (c == 1) return {{1.0}};

  Vec w(c, 1.0 / c);
  Vec best_w = w;
  double best_obj = objective(w, s, labels, squared);
  for (int i = 0; i < c; ++i) {
    Vec e(c, 0.0);
    e[i] = 1.0;
    double obj = objective(e, s, labels, squared);
    if (obj < best_obj) { best_obj = obj; best_w = e; }
  }

  for (int k = 0; k < iters; ++k) {
    // subgradient: sum_j p_i(x_j) . r_j / ||r_j|| (times 2||r_j|| if squared)
    Vec g(c, 0.0);
    for (int j = 0; j < s.num_images(); ++j) {
      Vec r(s.m);
      double rnorm2 = 0.0;
      for (int t = 0; t < s.m; ++t) {
        double fused = 0.0;
        for (int i = 0; i < c; ++i) fused += w[i] * s.scores[i][j][t];
        r[t] = fused - (labels[j] == t ? 1.0 : 0.0);
        rnorm2 += r[t] * r[t];
      }
      double rnorm = std::sqrt(rnorm2);
      if (!squared && rnorm <= 1e-12) continue;  // zero subgradient choice
      double scale = squared ? 2.0 : 1.0 / rnorm;
      for (int i = 0; i < c; ++i) {
        double dot = 0.0;
        for (int t = 0; t < s.m; ++t) dot += s.scores[i][j][t] * r[t];
        g[i] += scale * dot;
      }
    }
    double step = 0.5 / std::sqrt(static_cast<double>(k) + 1.0);
    for (int i = 0; i < c; ++i) w[i] -= step * g[i];
    w = simplex_project(w).w;

    double obj = objective(w, s, labels, squared);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
    }
  }
  return {best_w};
}

// Weighted score combination; label is the argmax, ties to the lowest index.
inline std::pair<Vec, int> fuse(const std::vector<Vec>& probs,
                                const EnsembleWeights& weights) {
  if (probs.size() != weights.w.size())
    throw dimension_error("fuse: classifier count mismatch");
  if (probs.empty()) throw parameter_error("fuse: no classifiers");
  const std::size_t m = probs[0].size();
  Vec fused(m, 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != m) throw dimension_error("fuse: class count mismatch");
    for (std::size_t k = 0; k < m; ++k) fused[k] += weights.w[i] * probs[i][k];
  }
  int label = 0;
  for (std::size_t k = 1; k < m; ++k)
    if (fused[k] > fused[label]) label = static_cast<int>(k);
  return {fused, label};
}

}  // namespace scenehmm

#endif
