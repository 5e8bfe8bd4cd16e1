#ifndef SCENEHMM_SVM_HPP
#define SCENEHMM_SVM_HPP

// RBF-kernel binary SVM trained by SMO (maximal-violating-pair working set),
// Platt-scaled probabilities, one-vs-rest multiclass wrapper.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scenehmm/common.hpp"

namespace scenehmm {

struct KernelParams {
  double gamma = 1.0;
  double c = 10.0;
  double tol = 1e-3;
  int max_passes = 200000;  // SMO iteration guard
};

inline double rbf(const Vec& x, const Vec& y, double gamma) {
  if (x.size() != y.size()) throw dimension_error("rbf: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += sq(x[i] - y[i]);
  return std::exp(-gamma * d2);
}

inline std::vector<Vec> gram_matrix(const std::vector<Vec>& xs, double gamma) {
  const std::size_t n = xs.size();
  std::vector<Vec> k(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i) {
    k[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      k[i][j] = k[j][i] = rbf(xs[i], xs[j], gamma);
  }
  return k;
}

struct SmoResult {
  Vec alphas;
  double bias = 0.0;
  bool converged = true;
  int iterations = 0;
};

// Solves the standard SVM dual: min 1/2 a'Qa - e'a, 0 <= a_i <= c,
// sum a_i y_i = 0, with Q_ij = y_i y_j K_ij. Working pair is the maximal
// KKT violating pair; ties break to the lowest index. Stops when the
// violation gap drops below tol.
inline SmoResult smo_train(const std::vector<Vec>& gram,
                           const std::vector<int>& labels,
                           const KernelParams& params) {
  const int n = static_cast<int>(gram.size());
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw data_error("smo_train: both classes must be present");

  SmoResult res;
  res.alphas.assign(n, 0.0);
  Vec grad(n, -1.0);  // gradient of the dual objective at alpha = 0

  auto in_up = [&](int i) {
    return (labels[i] > 0 && res.alphas[i] < params.c) ||
           (labels[i] < 0 && res.alphas[i] > 0.0);
  };
  auto in_low = [&](int i) {
    return (labels[i] > 0 && res.alphas[i] > 0.0) ||
           (labels[i] < 0 && res.alphas[i] < params.c);
  };

  int iter = 0;
  for (; iter < params.max_passes; ++iter) {
    // select i maximizing -y_i grad_i over I_up, j minimizing over I_low
    int i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::max();
    double gmin = std::numeric_limits<double>::max();
    for (int t = 0; t < n; ++t) {
      double v = -labels[t] * grad[t];
      if (in_up(t) && v > gmax) { gmax = v; i = t; }
      if (in_low(t) && v < gmin) { gmin = v; j = t; }
    }
    if (i < 0 || j < 0 || gmax - gmin < params.tol) break;

    // analytic update of the (i, j) pair
    const double yi = labels[i], yj = labels[j];
    double quad = gram[i][i] + gram[j][j] - 2.0 * gram[i][j];
    if (quad <= 1e-12) quad = 1e-12;
    // step in alpha_i along the feasible direction (d_i = y_i, d_j = -y_j)
    double delta = (gmax - gmin) / quad;

    // clip to the box for both variables
    double ai_old = res.alphas[i], aj_old = res.alphas[j];
    double max_i = yi > 0 ? params.c - ai_old : ai_old;
    double max_j = yj > 0 ? aj_old : params.c - aj_old;
    delta = std::min(delta, std::min(max_i, max_j));

    res.alphas[i] = ai_old + yi * delta;
    res.alphas[j] = aj_old - yj * delta;
    for (int t = 0; t < n; ++t)
      grad[t] += delta * labels[t] * (gram[t][i] - gram[t][j]);
  }
  res.converged = iter < params.max_passes;
  res.iterations = iter;

  // bias from unbound support vectors: y_i f(x_i) = 1 there
  double sum_b = 0.0;
  int count_b = 0;
  double up_bound = std::numeric_limits<double>::max();
  double low_bound = -std::numeric_limits<double>::max();
  for (int t = 0; t < n; ++t) {
    double yg = -labels[t] * grad[t];  // equals y_t - f(x_t) without bias
    if (res.alphas[t] > 1e-12 && res.alphas[t] < params.c - 1e-12) {
      sum_b += yg;
      ++count_b;
    }
    if (in_up(t)) up_bound = std::min(up_bound, yg);
    if (in_low(t)) low_bound = std::max(low_bound, yg);
  }
  res.bias = count_b > 0 ? sum_b / count_b : (up_bound + low_bound) / 2.0;
  return res;
}

// Maximum KKT violation gap of a solution, for post-hoc verification.
inline double kkt_violation(const std::vector<Vec>& gram,
                            const std::vector<int>& labels, const Vec& alphas,
                            double c) {
  const int n = static_cast<int>(gram.size());
  double gmax = -std::numeric_limits<double>::max();
  double gmin = std::numeric_limits<double>::max();
  for (int t = 0; t < n; ++t) {
    double grad = -1.0;
    for (int s = 0; s < n; ++s)
      grad += labels[t] * labels[s] * gram[t][s] * alphas[s];
    double v = -labels[t] * grad;
    bool up = (labels[t] > 0 && alphas[t] < c) || (labels[t] < 0 && alphas[t] > 0);
    bool low = (labels[t] > 0 && alphas[t] > 0) || (labels[t] < 0 && alphas[t] < c);
    if (up) gmax = std::max(gmax, v);
    if (low) gmin = std::min(gmin, v);
  }
  return std::max(0.0, gmax - gmin);
}

inline double dual_objective(const std::vector<Vec>& gram,
                             const std::vector<int>& labels,
                             const Vec& alphas) {
  const int n = static_cast<int>(gram.size());
  double obj = 0.0;
  for (int i = 0; i < n; ++i) {
    obj -= alphas[i];
    for (int j = 0; j < n; ++j)
      obj += 0.5 * alphas[i] * alphas[j] * labels[i] * labels[j] * gram[i][j];
  }
  return obj;
}

// ---------------------------------------------------------------------------
// Platt scaling

// Probability form P(y=+1 | f) = 1 / (1 + exp(a*f + b)); a < 0 for
// correctly oriented decision values.
inline double platt_predict(double a, double b, double f) {
  double z = a * f + b;
  // numerically safe logistic
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

// Newton fit with backtracking of the regularized cross-entropy against
// smoothed targets (N+ + 1)/(N+ + 2) and 1/(N- + 2).
inline std::pair<double, double> platt_fit(const Vec& decision_values,
                                           const std::vector<int>& labels) {
  const int n = static_cast<int>(decision_values.size());
  int n_pos = 0, n_neg = 0;
  for (int y : labels) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw data_error("platt_fit: both classes must be present");

  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  Vec t(n);
  for (int i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi : lo;

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));

  auto objective = [&](double aa, double bb) {
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = decision_values[i] * aa + bb;
      // cross-entropy of 1/(1+e^z) against target t_i, stable form
      if (z >= 0.0)
        obj += t[i] * z + std::log(1.0 + std::exp(-z));
      else
        obj += (t[i] - 1.0) * z + std::log(1.0 + std::exp(z));
    }
    return obj;
  };

  const double min_step = 1e-10, sigma_reg = 1e-12;
  double fval = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = sigma_reg, h22 = sigma_reg, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = decision_values[i] * a + b;
      double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                          : 1.0 / (1.0 + std::exp(z));
      double q = 1.0 - p;
      double d1 = t[i] - p;
      double d2 = p * q;
      g1 += decision_values[i] * d1;
      g2 += d1;
      h11 += decision_values[i] * decision_values[i] * d2;
      h22 += d2;
      h21 += decision_values[i] * d2;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) return {a, b};

    double det = h11 * h22 - h21 * h21;
    double da = -(h22 * g1 - h21 * g2) / det;
    double db = -(-h21 * g1 + h11 * g2) / det;
    double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= min_step) {
      double fnew = objective(a + step * da, b + step * db);
      if (fnew < fval + 1e-4 * step * gd) {
        a += step * da;
        b += step * db;
        fval = fnew;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step)
      throw error("platt_fit: line search failed");
  }
  throw error("platt_fit: no convergence in 100 iterations");
}

// ---------------------------------------------------------------------------
// One-vs-rest classifier

struct BinarySvm {
  std::vector<Vec> support_vectors;
  Vec dual_coeffs;  // alpha_i * y_i
  double bias = 0.0;
  double platt_a = 0.0;
  double platt_b = 0.0;
  bool converged = true;

  double decision(const Vec& x, double gamma) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
      f += dual_coeffs[i] * rbf(support_vectors[i], x, gamma);
    return f;
  }
};

struct OvrClassifier {
  std::vector<BinarySvm> machines;  // one per class
  double gamma = 1.0;
  int dim = 0;
  std::string descriptor;

  int num_classes() const { return static_cast<int>(machines.size()); }
};

namespace detail {

inline BinarySvm train_binary(const std::vector<Vec>& features,
                              const std::vector<int>& binary_labels,
                              const std::vector<Vec>& gram,
                              const KernelParams& params) {
  const int n = static_cast<int>(features.size());

  // 3-fold out-of-sample decision values for calibration (round-robin folds)
  Vec oos_decision(n, 0.0);
  for (int fold = 0; fold < 3; ++fold) {
    std::vector<int> train_idx, held_idx;
    for (int i = 0; i < n; ++i)
      (i % 3 == fold ? held_idx : train_idx).push_back(i);

    bool pos = false, neg = false;
    for (int i : train_idx) (binary_labels[i] > 0 ? pos : neg) = true;
    if (!pos || !neg) continue;  // degenerate fold, skip its values

    const int nt = static_cast<int>(train_idx.size());
    std::vector<Vec> sub_gram(nt, Vec(nt));
    std::vector<int> sub_labels(nt);
    for (int a = 0; a < nt; ++a) {
      sub_labels[a] = binary_labels[train_idx[a]];
      for (int b = 0; b < nt; ++b)
        sub_gram[a][b] = gram[train_idx[a]][train_idx[b]];
    }
    SmoResult sub = smo_train(sub_gram, sub_labels, params);
    for (int h : held_idx) {
      double f = sub.bias;
      for (int a = 0; a < nt; ++a)
        f += sub.alphas[a] * sub_labels[a] * gram[train_idx[a]][h];
      oos_decision[h] = f;
    }
  }
  auto [pa, pb] = platt_fit(oos_decision, binary_labels);

  SmoResult full = smo_train(gram, binary_labels, params);
  BinarySvm svm;
  svm.bias = full.bias;
  svm.platt_a = pa;
  svm.platt_b = pb;
  svm.converged = full.converged;
  for (int i = 0; i < n; ++i) {
    if (full.alphas[i] > 1e-12) {
      svm.support_vectors.push_back(features[i]);
      svm.dual_coeffs.push_back(full.alphas[i] * binary_labels[i]);
    }
  }
  return svm;
}

}  // namespace detail

inline OvrClassifier ovr_train(const std::vector<Vec>& features,
                               const std::vector<int>& class_labels, int m,
                               const KernelParams& params) {
  if (features.empty()) throw data_error("ovr_train: no samples");
  std::vector<int> counts(m, 0);
  for (int y : class_labels) {
    if (y < 0 || y >= m) throw data_error("ovr_train: label out of range");
    ++counts[y];
  }
  for (int j = 0; j < m; ++j)
    if (counts[j] < 2)
      throw data_error("ovr_train: class " + std::to_string(j) +
                       " has fewer than 2 samples");

  OvrClassifier clf;
  clf.gamma = params.gamma;
  clf.dim = static_cast<int>(features[0].size());
  auto gram = gram_matrix(features, params.gamma);
  for (int j = 0; j < m; ++j) {
    std::vector<int> binary(features.size());
    for (std::size_t i = 0; i < features.size(); ++i)
      binary[i] = class_labels[i] == j ? 1 : -1;
    clf.machines.push_back(detail::train_binary(features, binary, gram, params));
  }
  return clf;
}

// Per-class Platt probabilities normalized to sum 1; uniform fallback when
// every raw value underflows.
inline Vec predict_proba(const OvrClassifier& clf, const Vec& x) {
  if (static_cast<int>(x.size()) != clf.dim)
    throw dimension_error("predict_proba: dimension mismatch");
  Vec p(clf.num_classes());
  double total = 0.0;
  for (int j = 0; j < clf.num_classes(); ++j) {
    const auto& svm = clf.machines[j];
    p[j] = platt_predict(svm.platt_a, svm.platt_b, svm.decision(x, clf.gamma));
    total += p[j];
  }
  if (total < 1e-12) {
    std::fill(p.begin(), p.end(), 1.0 / clf.num_classes());
  } else {
    for (double& v : p) v /= total;
  }
  return p;
}

}  // namespace scenehmm

#endif
