#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "scenehmm/hmm.hpp"

using namespace scenehmm;

namespace {

GridSequence make_seq(std::vector<Vec> features, const std::string& id = "") {
  GridSequence seq;
  seq.descriptor_id = DescriptorId::gist;
  seq.g = 1;  // not used by the hmm module
  seq.dim = features.empty() ? 0 : static_cast<int>(features[0].size());
  seq.features = std::move(features);
  seq.id = id;
  return seq;
}

ReferenceBank random_bank(int m, int n, int dim, std::uint64_t seed,
                          int per_class = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GridSequence> storage;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<Vec> feats(n, Vec(dim));
      for (auto& f : feats)
        for (double& v : f) v = u(rng);
      storage.push_back(make_seq(std::move(feats),
                                 "c" + std::to_string(j) + "_" + std::to_string(i)));
    }
  }
  std::vector<std::pair<const GridSequence*, int>> refs;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < per_class; ++i)
      refs.emplace_back(&storage[j * per_class + i], j);
  return build_bank(refs, m);
}

Vec random_vec(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

// ---------------------------------------------------------------------------
// Independent scalar oracle for the forward recursion: recomputes distances,
// softmaxes and the recursion with plain loops, sharing nothing with hmm.hpp.

double oracle_min_dist(const Vec& x, const std::vector<Vec>& exemplars) {
  double best = 1e300;
  for (const auto& e : exemplars) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - e[i]) * (x[i] - e[i]);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

std::vector<Vec> oracle_forward(const GridSequence& seq,
                                const ReferenceBank& bank) {
  const int m = bank.m, n = bank.n;
  std::vector<Vec> alpha(n, Vec(m));
  for (int t = 0; t < n; ++t) {
    Vec em(m);
    double em_total = 0.0;
    for (int j = 0; j < m; ++j) {
      em[j] = std::exp(-oracle_min_dist(seq.features[t], bank.exemplars_at(j, t)));
      em_total += em[j];
    }
    for (double& v : em) v /= em_total;

    if (t == 0) {
      alpha[0] = em;
      continue;
    }
    Vec row(m, 0.0);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      double mix = 0.0;
      for (int k = 0; k < m; ++k) {
        // transition row k softmax
        Vec tr(m);
        double tr_total = 0.0;
        for (int jj = 0; jj < m; ++jj) {
          double s = 0.0;
          const Vec& a = bank.centroid_at(k, t - 1);
          const Vec& b = bank.centroid_at(jj, t);
          for (std::size_t q = 0; q < a.size(); ++q) s += (a[q] - b[q]) * (a[q] - b[q]);
          tr[jj] = std::exp(-std::sqrt(s));
          tr_total += tr[jj];
        }
        mix += (tr[j] / tr_total) * alpha[t - 1][k];
      }
      row[j] = em[j] * mix;
      total += row[j];
    }
    for (double& v : row) v /= total;
    alpha[t] = row;
  }
  return alpha;
}

}  // namespace

TEST_CASE("build_bank collects exemplars and mean centroids") {
  auto s1 = make_seq({{0.0, 0.0}, {1.0, 1.0}}, "a");
  auto s2 = make_seq({{2.0, 2.0}, {3.0, 3.0}}, "b");
  auto s3 = make_seq({{10.0, 10.0}, {11.0, 11.0}}, "c");
  auto s4 = make_seq({{12.0, 12.0}, {13.0, 13.0}}, "d");
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 0}, {&s3, 1}, {&s4, 1}}, 2);

  CHECK(bank.m == 2);
  CHECK(bank.n == 2);
  CHECK(bank.exemplars_at(0, 0).size() == 2);
  CHECK(bank.centroid_at(0, 0) == Vec{1.0, 1.0});   // mean of (0,0),(2,2)
  CHECK(bank.centroid_at(1, 1) == Vec{12.0, 12.0});  // mean of (11,11),(13,13)
}

TEST_CASE("build_bank single image per class") {
  auto s1 = make_seq({{1.0}, {2.0}}, "a");
  auto s2 = make_seq({{5.0}, {6.0}}, "b");
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 1}}, 2);
  CHECK(bank.centroid_at(0, 0) == Vec{1.0});
  CHECK(bank.centroid_at(1, 1) == Vec{6.0});
}

TEST_CASE("build_bank centroids match direct averaging") {
  ReferenceBank bank = random_bank(3, 4, 5, 77, 4);
  for (int j = 0; j < 3; ++j) {
    for (int t = 0; t < 4; ++t) {
      const auto& ex = bank.exemplars_at(j, t);
      Vec mean(5, 0.0);
      for (const auto& e : ex)
        for (int q = 0; q < 5; ++q) mean[q] += e[q];
      for (double& v : mean) v /= ex.size();
      for (int q = 0; q < 5; ++q)
        CHECK(bank.centroid_at(j, t)[q] == Catch::Approx(mean[q]).margin(1e-12));
    }
  }
}

TEST_CASE("build_bank coverage and dimension errors") {
  auto s1 = make_seq({{1.0}}, "a");
  CHECK_THROWS_AS(build_bank({{&s1, 0}}, 2), data_error);
  auto s2 = make_seq({{1.0, 2.0}}, "b");
  CHECK_THROWS_AS(build_bank({{&s1, 0}, {&s2, 1}}, 2), dimension_error);
}

TEST_CASE("emission examples") {
  // symmetric distances -> 0.5/0.5
  auto s1 = make_seq({{1.0, 0.0}}, "a");
  auto s2 = make_seq({{-1.0, 0.0}}, "b");
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 1}}, 2);
  Vec e = emission({0.0, 0.0}, 0, bank);
  CHECK(e[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(e[1] == Catch::Approx(0.5).margin(1e-12));

  // d1 = 1, d2 = 2 -> hand softmax
  auto q1 = make_seq({{1.0}}, "a");
  auto q2 = make_seq({{2.0}}, "b");
  ReferenceBank bank2 = build_bank({{&q1, 0}, {&q2, 1}}, 2);
  Vec e2 = emission({0.0}, 0, bank2);
  CHECK(e2[0] == Catch::Approx(0.73106).margin(1e-4));
  CHECK(e2[1] == Catch::Approx(0.26894).margin(1e-4));

  // exact exemplar match dominates
  Vec e3 = emission({1.0}, 0, bank2);
  CHECK(e3[0] > 0.5);
  CHECK(e3[0] == Catch::Approx(1.0 / (1.0 + std::exp(-1.0))).margin(1e-12));
}

TEST_CASE("emission depends on inputs only through the distance profile") {
  // two different geometries with identical distance profiles (d1=3, d2=5)
  auto a1 = make_seq({{3.0, 0.0}}, "a");
  auto a2 = make_seq({{0.0, 5.0}}, "b");
  ReferenceBank bank_a = build_bank({{&a1, 0}, {&a2, 1}}, 2);
  Vec e_a = emission({0.0, 0.0}, 0, bank_a);

  auto b1 = make_seq({{-3.0, 0.0}}, "a");
  auto b2 = make_seq({{4.0, 3.0}}, "b");  // also distance 5 from origin
  ReferenceBank bank_b = build_bank({{&b1, 0}, {&b2, 1}}, 2);
  Vec e_b = emission({0.0, 0.0}, 0, bank_b);

  CHECK(e_a[0] == Catch::Approx(e_b[0]).margin(1e-12));
  CHECK(e_a[1] == Catch::Approx(e_b[1]).margin(1e-12));
}

TEST_CASE("emission leave-one-out exclusion") {
  auto s1 = make_seq({{0.0}}, "self");
  auto s2 = make_seq({{1.0}}, "other");
  auto s3 = make_seq({{5.0}}, "b1");
  auto s4 = make_seq({{6.0}}, "b2");
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 0}, {&s3, 1}, {&s4, 1}}, 2);

  Vec with_self = emission({0.0}, 0, bank);
  Vec without = emission({0.0}, 0, bank, std::optional<std::string>("self"));
  CHECK(with_self[0] > without[0]);  // zero distance no longer available

  // excluding the only exemplar of a class is an error
  auto t1 = make_seq({{0.0}}, "only");
  auto t2 = make_seq({{1.0}}, "x");
  ReferenceBank bank2 = build_bank({{&t1, 0}, {&t2, 1}}, 2);
  CHECK_THROWS_AS(emission({0.0}, 0, bank2, std::optional<std::string>("only")),
                  data_error);
}

TEST_CASE("transition rows") {
  // identical centroids -> uniform rows
  auto s1 = make_seq({{1.0}, {1.0}}, "a");
  auto s2 = make_seq({{1.0}, {1.0}}, "b");
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 1}}, 2);
  auto rows = transition(1, bank);
  for (const auto& row : rows)
    for (double v : row) CHECK(v == Catch::Approx(0.5).margin(1e-12));

  // distances (0, 10) from centroid k
  auto q1 = make_seq({{0.0}, {0.0}}, "a");
  auto q2 = make_seq({{0.0}, {10.0}}, "b");
  ReferenceBank bank2 = build_bank({{&q1, 0}, {&q2, 1}}, 2);
  auto rows2 = transition(1, bank2);
  CHECK(rows2[0][0] == Catch::Approx(1.0 / (1.0 + std::exp(-10.0))).margin(1e-9));

  CHECK_THROWS_AS(transition(0, bank), parameter_error);
  CHECK_THROWS_AS(transition(2, bank), parameter_error);
}

TEST_CASE("transition rows sum to 1 on random banks") {
  for (std::uint64_t seed : {1, 2, 3}) {
    ReferenceBank bank = random_bank(4, 5, 3, seed);
    for (int t = 1; t < bank.n; ++t) {
      auto rows = transition(t, bank);
      for (const auto& row : rows) {
        double sum = 0.0;
        for (double v : row) sum += v;
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("forward row 0 equals the emission vector") {
  ReferenceBank bank = random_bank(3, 4, 2, 5);
  std::mt19937_64 rng(9);
  GridSequence query = make_seq({random_vec(2, rng), random_vec(2, rng),
                                 random_vec(2, rng), random_vec(2, rng)});
  AlphaMatrix alpha = forward(query, bank);
  Vec em0 = emission(query.features[0], 0, bank);
  for (int j = 0; j < 3; ++j)
    CHECK(alpha.rows[0][j] == Catch::Approx(em0[j]).margin(1e-12));
}

TEST_CASE("coincident centroids make alpha equal the emissions") {
  // same mean per class at every position -> uniform transitions
  auto s1 = make_seq({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, "a1");
  auto s2 = make_seq({{-1.0, 0.0}, {-1.0, 0.0}, {-1.0, 0.0}}, "a2");
  auto s3 = make_seq({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, "b1");
  auto s4 = make_seq({{0.0, -1.0}, {0.0, -1.0}, {0.0, -1.0}}, "b2");
  // both class centroids are (0,0) at all positions
  ReferenceBank bank = build_bank({{&s1, 0}, {&s2, 0}, {&s3, 1}, {&s4, 1}}, 2);

  std::mt19937_64 rng(17);
  GridSequence query = make_seq({random_vec(2, rng), random_vec(2, rng),
                                 random_vec(2, rng)});
  AlphaMatrix alpha = forward(query, bank);
  for (int t = 0; t < 3; ++t) {
    Vec em = emission(query.features[t], t, bank);
    for (int j = 0; j < 2; ++j)
      CHECK(alpha.rows[t][j] == Catch::Approx(em[j]).margin(1e-9));
  }
}

TEST_CASE("forward matches the independent scalar oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ReferenceBank bank = random_bank(2, 3, 2, 100 + seed);
    std::mt19937_64 rng(200 + seed);
    GridSequence query = make_seq({random_vec(2, rng), random_vec(2, rng),
                                   random_vec(2, rng)});
    AlphaMatrix alpha = forward(query, bank);
    auto oracle = oracle_forward(query, bank);
    for (int t = 0; t < 3; ++t)
      for (int j = 0; j < 2; ++j)
        CHECK(alpha.rows[t][j] == Catch::Approx(oracle[t][j]).margin(1e-9));
  }
}

TEST_CASE("forward is permutation-equivariant in class labels") {
  ReferenceBank bank = random_bank(3, 4, 2, 31);
  // swap classes 0 and 2 by rebuilding with permuted exemplars
  ReferenceBank permuted = bank;
  for (int t = 0; t < bank.n; ++t) {
    std::swap(permuted.exemplars[0 * bank.n + t], permuted.exemplars[2 * bank.n + t]);
    std::swap(permuted.exemplar_owner[0 * bank.n + t],
              permuted.exemplar_owner[2 * bank.n + t]);
    std::swap(permuted.centroids[0 * bank.n + t], permuted.centroids[2 * bank.n + t]);
  }
  std::mt19937_64 rng(33);
  GridSequence query = make_seq({random_vec(2, rng), random_vec(2, rng),
                                 random_vec(2, rng), random_vec(2, rng)});
  AlphaMatrix a = forward(query, bank);
  AlphaMatrix b = forward(query, permuted);
  for (int t = 0; t < 4; ++t) {
    CHECK(a.rows[t][0] == Catch::Approx(b.rows[t][2]).margin(1e-12));
    CHECK(a.rows[t][2] == Catch::Approx(b.rows[t][0]).margin(1e-12));
    CHECK(a.rows[t][1] == Catch::Approx(b.rows[t][1]).margin(1e-12));
  }
}

TEST_CASE("feature_vector layout") {
  AlphaMatrix alpha;
  alpha.n = 2;
  alpha.m = 2;
  alpha.rows = {{0.6, 0.4}, {0.3, 0.7}};
  HmmFeatureVector fv = feature_vector(alpha);
  CHECK(fv.v == Vec{0.6, 0.3, 0.4, 0.7});

  // m=15, n=9 -> 135 entries
  AlphaMatrix big;
  big.n = 9;
  big.m = 15;
  big.rows.assign(9, Vec(15, 1.0 / 15));
  CHECK(feature_vector(big).v.size() == 135);
}

TEST_CASE("per-position slices of the feature vector sum to 1") {
  ReferenceBank bank = random_bank(5, 4, 3, 41);
  std::mt19937_64 rng(43);
  GridSequence query = make_seq({random_vec(3, rng), random_vec(3, rng),
                                 random_vec(3, rng), random_vec(3, rng)});
  HmmFeatureVector fv = feature_vector(forward(query, bank));
  for (int t = 0; t < 4; ++t) {
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) sum += fv.v[j * 4 + t];
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }
}
