#ifndef SCENEHMM_COMMON_HPP
#define SCENEHMM_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenehmm {

using Vec = std::vector<double>;

// Error hierarchy. Each subclass maps to one failure category so callers
// (and the CLI exit-code logic) can dispatch on type.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct format_error : error {
  using error::error;
};
struct dimension_error : error {
  using error::error;
};
struct parameter_error : error {
  using error::error;
};
struct data_error : error {
  using error::error;
};

inline double sq(double x) { return x * x; }

inline double l2_dist(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw dimension_error("l2_dist: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

inline double l2_norm(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// Deterministic Fisher-Yates shuffle. std::shuffle's draw sequence is
// implementation defined, so splits would differ across standard libraries.
template <typename T, typename Rng>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace scenehmm

#endif
