#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "scenehmm/reduce.hpp"

using namespace scenehmm;

namespace {

// Independent oracle: cyclic Jacobi eigenvalue iteration on the covariance
// matrix, no shared code with pca_fit.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<std::vector<double>> covariance(const std::vector<Vec>& samples) {
  const int n = static_cast<int>(samples.size());
  const int d = static_cast<int>(samples[0].size());
  Vec mean(d, 0.0);
  for (const auto& s : samples)
    for (int j = 0; j < d; ++j) mean[j] += s[j];
  for (double& m : mean) m /= n;
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& s : samples)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        cov[i][j] += (s[i] - mean[i]) * (s[j] - mean[j]);
  for (auto& row : cov)
    for (double& v : row) v /= (n - 1);
  return cov;
}

std::vector<Vec> random_samples(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> out(n, Vec(d));
  for (auto& s : out)
    for (double& v : s) v = gauss(rng);
  return out;
}

}  // namespace

TEST_CASE("pca eigenvalues match the Jacobi oracle") {
  auto samples = random_samples(50, 10, 42);
  PcaModel model = pca_fit(samples, 3);
  auto oracle = jacobi_eigenvalues(covariance(samples));
  for (int i = 0; i < 3; ++i)
    CHECK(model.eigenvalues[i] == Catch::Approx(oracle[i]).margin(1e-6));
  CHECK(model.eigenvalues[0] >= model.eigenvalues[1]);
  CHECK(model.eigenvalues[1] >= model.eigenvalues[2]);
}

TEST_CASE("pca components are orthonormal") {
  auto samples = random_samples(40, 8, 7);
  PcaModel model = pca_fit(samples, 5);
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      double dot = 0.0;
      for (int j = 0; j < 8; ++j) dot += model.components[a][j] * model.components[b][j];
      CHECK(dot == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-8));
    }
  }
  // sign convention: largest-magnitude entry non-negative
  for (const auto& comp : model.components) {
    int arg = 0;
    for (int j = 1; j < 8; ++j)
      if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
    CHECK(comp[arg] >= 0.0);
  }
}

TEST_CASE("pca on collinear data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Vec dir = {1.0, 2.0, -1.0};
  std::vector<Vec> samples;
  for (int i = 0; i < 20; ++i) {
    double t = u(rng);
    samples.push_back({t * dir[0], t * dir[1], t * dir[2]});
  }
  PcaModel model = pca_fit(samples, 1);
  CHECK(model.eigenvalues.size() == 1);
  for (const auto& s : samples) {
    Vec rec = pca_reconstruct(model, pca_apply(model, s));
    for (int j = 0; j < 3; ++j) CHECK(rec[j] == Catch::Approx(s[j]).margin(1e-9));
  }

  // rank deficiency below k gets flagged with zero eigenvalues
  PcaModel full = pca_fit(samples, 3);
  CHECK(full.rank_deficient);
  CHECK(full.eigenvalues[1] == 0.0);
  CHECK(full.eigenvalues[2] == 0.0);
}

TEST_CASE("pca_apply basics") {
  auto samples = random_samples(30, 6, 9);
  PcaModel model = pca_fit(samples, 6 - 1);

  Vec at_mean = pca_apply(model, model.mean);
  for (double v : at_mean) CHECK(v == Catch::Approx(0.0).margin(1e-12));

  Vec shifted = model.mean;
  for (int j = 0; j < 6; ++j) shifted[j] += model.components[0][j];
  Vec y = pca_apply(model, shifted);
  CHECK(y[0] == Catch::Approx(1.0).margin(1e-9));
  for (int c = 1; c < 5; ++c) CHECK(y[c] == Catch::Approx(0.0).margin(1e-9));

  CHECK_THROWS_AS(pca_apply(model, Vec(3, 0.0)), dimension_error);
}

TEST_CASE("full-dimension pca is an isometry") {
  auto samples = random_samples(20, 5, 11);
  PcaModel model = pca_fit(samples, 5);
  for (int i = 1; i < 5; ++i) {
    double orig = l2_dist(samples[0], samples[i]);
    double proj = l2_dist(pca_apply(model, samples[0]), pca_apply(model, samples[i]));
    CHECK(proj == Catch::Approx(orig).margin(1e-8));
  }
  // k = d: reconstruction is exact
  Vec rec = pca_reconstruct(model, pca_apply(model, samples[0]));
  for (int j = 0; j < 5; ++j)
    CHECK(rec[j] == Catch::Approx(samples[0][j]).margin(1e-8));
}

TEST_CASE("reconstruction error is non-increasing in k") {
  auto samples = random_samples(30, 8, 13);
  double prev = 1e300;
  for (int k = 1; k <= 7; ++k) {
    PcaModel model = pca_fit(samples, k);
    double err = 0.0;
    for (const auto& s : samples)
      err += sq(l2_dist(s, pca_reconstruct(model, pca_apply(model, s))));
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
}

TEST_CASE("pca parameter validation") {
  auto samples = random_samples(10, 4, 1);
  CHECK_THROWS_AS(pca_fit(samples, 0), parameter_error);
  CHECK_THROWS_AS(pca_fit(samples, 5), parameter_error);
  CHECK_THROWS_AS(pca_fit({samples[0]}, 1), parameter_error);
}

TEST_CASE("kmeans k=1 is the exact mean") {
  std::vector<Vec> samples = {{0.0, 0.0}, {2.0, 2.0}};
  auto centroids = kmeans_fit(samples, 1, 0);
  REQUIRE(centroids.size() == 1);
  CHECK(centroids[0][0] == Catch::Approx(1.0).margin(1e-15));
  CHECK(centroids[0][1] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("kmeans with k equal to sample count") {
  auto samples = random_samples(5, 3, 21);
  auto centroids = kmeans_fit(samples, 5, 77);
  CHECK(kmeans_inertia(samples, centroids) == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("kmeans k=2 matches the exhaustive partition oracle") {
  // two well-separated blobs, <= 12 points: enumerate all 2-partitions
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.3);
  std::vector<Vec> samples;
  for (int i = 0; i < 6; ++i) samples.push_back({gauss(rng), gauss(rng)});
  for (int i = 0; i < 6; ++i) samples.push_back({10 + gauss(rng), 10 + gauss(rng)});

  double best = 1e300;
  const int n = static_cast<int>(samples.size());
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    std::vector<Vec> a, b;
    for (int i = 0; i < n; ++i) (mask >> i & 1 ? a : b).push_back(samples[i]);
    Vec ca(2, 0.0), cb(2, 0.0);
    for (const auto& s : a) { ca[0] += s[0]; ca[1] += s[1]; }
    for (const auto& s : b) { cb[0] += s[0]; cb[1] += s[1]; }
    for (double& v : ca) v /= a.size();
    for (double& v : cb) v /= b.size();
    double inertia = 0.0;
    for (const auto& s : a) inertia += sq(l2_dist(s, ca));
    for (const auto& s : b) inertia += sq(l2_dist(s, cb));
    best = std::min(best, inertia);
  }

  auto centroids = kmeans_fit(samples, 2, 123);
  CHECK(kmeans_inertia(samples, centroids) == Catch::Approx(best).margin(1e-9));
}

TEST_CASE("kmeans parameter validation") {
  std::vector<Vec> samples = {{0.0}, {1.0}};
  CHECK_THROWS_AS(kmeans_fit(samples, 0, 0), parameter_error);
  CHECK_THROWS_AS(kmeans_fit(samples, 3, 0), parameter_error);
}
