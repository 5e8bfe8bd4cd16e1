#ifndef SCENEHMM_DESCRIPTORS_HPP
#define SCENEHMM_DESCRIPTORS_HPP

// Grid partitioning, zigzag ordering and the four per-grid descriptors
// (census-transform histogram, Gabor statistics, Gabor energy, gradient
// orientation histogram).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "scenehmm/common.hpp"
#include "scenehmm/image.hpp"

namespace scenehmm {

enum class DescriptorId { sift, gist, centrist, gabor };

inline std::string to_string(DescriptorId id) {
  switch (id) {
    case DescriptorId::sift: return "sift";
    case DescriptorId::gist: return "gist";
    case DescriptorId::centrist: return "centrist";
    case DescriptorId::gabor: return "gabor";
  }
  throw parameter_error("bad descriptor id");
}

inline DescriptorId descriptor_from_string(const std::string& s) {
  if (s == "sift") return DescriptorId::sift;
  if (s == "gist") return DescriptorId::gist;
  if (s == "centrist") return DescriptorId::centrist;
  if (s == "gabor") return DescriptorId::gabor;
  throw parameter_error("unknown descriptor '" + s + "'");
}

// A rectangular view into a GrayImage.
struct Region {
  const GrayImage* image = nullptr;
  int x0 = 0, y0 = 0, width = 0, height = 0;

  // clamped access, i.e. replicate padding at the region border
  double at_clamped(int r, int c) const {
    r = std::clamp(r, 0, height - 1);
    c = std::clamp(c, 0, width - 1);
    return static_cast<double>(image->at(y0 + r, x0 + c));
  }
  double at(int r, int c) const {
    return static_cast<double>(image->at(y0 + r, x0 + c));
  }
};

struct GridSequence {
  DescriptorId descriptor_id;
  int g = 0;                  // grid side count, n = g*g positions
  std::vector<Vec> features;  // zigzag order
  int dim = 0;
  std::string id;             // owning image id (set by encode callers)
};

// ---------------------------------------------------------------------------
// Partition and zigzag

// Tiles the image into g*g regions in raster order. Non-divisible widths and
// heights put the remainder pixels into the last column/row of regions.
inline std::vector<Region> partition(const GrayImage& image, int g) {
  if (g < 1) throw parameter_error("grid count must be >= 1");
  if (image.width < 2 * g || image.height < 2 * g)
    throw dimension_error("image " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) +
                          " too small for g=" + std::to_string(g));
  const int rw = image.width / g, rh = image.height / g;
  std::vector<Region> regions;
  regions.reserve(static_cast<std::size_t>(g) * g);
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      Region reg;
      reg.image = &image;
      reg.x0 = c * rw;
      reg.y0 = r * rh;
      reg.width = c == g - 1 ? image.width - reg.x0 : rw;
      reg.height = r == g - 1 ? image.height - reg.y0 : rh;
      regions.push_back(reg);
    }
  }
  return regions;
}

// JPEG zigzag: anti-diagonals d = r+c ascending, direction alternating so
// consecutive cells stay lattice neighbors.
inline std::vector<int> zigzag(int g) {
  if (g < 1) throw parameter_error("grid count must be >= 1");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(g) * g);
  for (int d = 0; d <= 2 * (g - 1); ++d) {
    int r_lo = std::max(0, d - (g - 1));
    int r_hi = std::min(d, g - 1);
    if (d % 2 == 0) {
      for (int r = r_hi; r >= r_lo; --r) order.push_back(r * g + (d - r));
    } else {
      for (int r = r_lo; r <= r_hi; ++r) order.push_back(r * g + (d - r));
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// Centrist (census-transform histogram)

// 8-bit census code per interior pixel: bit k (MSB-first over the 8 raster
// neighbors) is 1 iff center >= neighbor. Output is the L1-normalized
// 256-bin code histogram.
inline Vec centrist(const Region& region) {
  if (region.width < 3 || region.height < 3)
    throw dimension_error("centrist needs a region of at least 3x3");
  Vec hist(256, 0.0);
  static constexpr std::array<std::array<int, 2>, 8> kNeighbors = {
      {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
  int count = 0;
  for (int r = 1; r < region.height - 1; ++r) {
    for (int c = 1; c < region.width - 1; ++c) {
      double center = region.at(r, c);
      unsigned code = 0;
      for (const auto& [dr, dc] : kNeighbors) {
        code <<= 1;
        if (center >= region.at(r + dr, c + dc)) code |= 1u;
      }
      hist[code] += 1.0;
      ++count;
    }
  }
  for (double& h : hist) h /= count;
  return hist;
}

// ---------------------------------------------------------------------------
// Gabor bank

struct GaborFilter {
  int radius = 0;  // kernel side = 2*radius+1
  std::vector<double> real;  // zero-mean
  std::vector<double> imag;
  double wavelength = 0.0;
  double orientation = 0.0;
  double sigma = 0.0;
};

struct GaborBank {
  int scales = 0;
  int orientations = 0;
  double base_wavelength = 0.0;
  std::vector<GaborFilter> filters;  // scale-major: filter s*O+k
};

// wavelengths double per scale, sigma = 0.56*lambda, support radius 3*sigma.
// The real part is mean-subtracted so constant inputs give zero response.
inline GaborBank build_gabor_bank(int scales, int orientations,
                                  double base_wavelength) {
  if (scales < 1 || orientations < 1)
    throw parameter_error("gabor bank needs scales >= 1 and orientations >= 1");
  if (base_wavelength < 2.0)
    throw parameter_error("gabor base wavelength must be >= 2");

  GaborBank bank;
  bank.scales = scales;
  bank.orientations = orientations;
  bank.base_wavelength = base_wavelength;
  for (int s = 0; s < scales; ++s) {
    double lambda = base_wavelength * std::pow(2.0, s);
    double sigma = 0.56 * lambda;
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    for (int k = 0; k < orientations; ++k) {
      double theta = k * std::numbers::pi / orientations;
      GaborFilter f;
      f.radius = radius;
      f.wavelength = lambda;
      f.orientation = theta;
      f.sigma = sigma;
      int side = 2 * radius + 1;
      f.real.resize(static_cast<std::size_t>(side) * side);
      f.imag.resize(f.real.size());
      double sum_real = 0.0;
      for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
          double xr = x * std::cos(theta) + y * std::sin(theta);
          double env = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
          double phase = 2.0 * std::numbers::pi * xr / lambda;
          std::size_t idx =
              static_cast<std::size_t>(y + radius) * side + (x + radius);
          f.real[idx] = env * std::cos(phase);
          f.imag[idx] = env * std::sin(phase);
          sum_real += f.real[idx];
        }
      }
      double mean_real = sum_real / static_cast<double>(f.real.size());
      for (double& v : f.real) v -= mean_real;
      bank.filters.push_back(std::move(f));
    }
  }
  return bank;
}

namespace detail {

// Response magnitude statistics of one filter over a region, with replicate
// padding.
struct GaborStats {
  double mean = 0.0;
  double variance = 0.0;
};

inline GaborStats gabor_response_stats(const Region& region,
                                       const GaborFilter& f) {
  const int side = 2 * f.radius + 1;
  const int pw = region.width + 2 * f.radius;
  const int ph = region.height + 2 * f.radius;
  // replicate-padded copy of the region keeps the convolution inner loop
  // free of coordinate clamping
  std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
  for (int r = 0; r < ph; ++r)
    for (int c = 0; c < pw; ++c)
      padded[static_cast<std::size_t>(r) * pw + c] =
          region.at_clamped(r - f.radius, c - f.radius);

  double sum = 0.0, sum_sq = 0.0;
  const std::size_t n = static_cast<std::size_t>(region.width) * region.height;
  for (int r = 0; r < region.height; ++r) {
    for (int c = 0; c < region.width; ++c) {
      double re = 0.0, im = 0.0;
      for (int ky = 0; ky < side; ++ky) {
        const double* src = &padded[static_cast<std::size_t>(r + ky) * pw + c];
        const double* kre = &f.real[static_cast<std::size_t>(ky) * side];
        const double* kim = &f.imag[static_cast<std::size_t>(ky) * side];
        for (int kx = 0; kx < side; ++kx) {
          re += kre[kx] * src[kx];
          im += kim[kx] * src[kx];
        }
      }
      double mag = std::sqrt(re * re + im * im);
      sum += mag;
      sum_sq += mag * mag;
    }
  }
  GaborStats st;
  st.mean = sum / n;
  st.variance = std::max(0.0, sum_sq / n - st.mean * st.mean);
  return st;
}

}  // namespace detail

// Per filter: mean and variance of |response| over the region, concatenated
// filter-major (mean then variance). Length 2*S*O.
inline Vec gabor_feat(const Region& region, const GaborBank& bank) {
  Vec out;
  out.reserve(2 * bank.filters.size());
  for (const auto& f : bank.filters) {
    auto st = detail::gabor_response_stats(region, f);
    out.push_back(st.mean);
    out.push_back(st.variance);
  }
  return out;
}

// Gist realized as per-grid Gabor energy: mean |response| per filter.
inline Vec gist_feat(const Region& region, const GaborBank& bank) {
  Vec out;
  out.reserve(bank.filters.size());
  for (const auto& f : bank.filters)
    out.push_back(detail::gabor_response_stats(region, f).mean);
  return out;
}

// ---------------------------------------------------------------------------
// SIFT-style gradient orientation histogram

// 4x4 spatial cells, 8 orientation bins each, magnitude-weighted hard
// binning with central differences; L2 normalize, clamp at 0.2,
// renormalize. A zero-gradient region yields the zero vector.
inline Vec sift_feat(const Region& region) {
  if (region.width < 8 || region.height < 8)
    throw dimension_error("sift descriptor needs a region of at least 8x8");

  constexpr int kCells = 4, kBins = 8;
  Vec hist(kCells * kCells * kBins, 0.0);
  const int cw = region.width / kCells, ch = region.height / kCells;
  const double bin_width = 2.0 * std::numbers::pi / kBins;

  for (int r = 0; r < region.height; ++r) {
    int cell_r = std::min(r / ch, kCells - 1);
    for (int c = 0; c < region.width; ++c) {
      int cell_c = std::min(c / cw, kCells - 1);
      double dx = region.at_clamped(r, c + 1) - region.at_clamped(r, c - 1);
      double dy = region.at_clamped(r + 1, c) - region.at_clamped(r - 1, c);
      double mag = std::sqrt(dx * dx + dy * dy);
      if (mag == 0.0) continue;
      double theta = std::atan2(dy, dx);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      int bin = std::min(static_cast<int>(theta / bin_width), kBins - 1);
      hist[(cell_r * kCells + cell_c) * kBins + bin] += mag;
    }
  }

  double norm = l2_norm(hist);
  if (norm == 0.0) return hist;
  for (double& h : hist) h = std::min(h / norm, 0.2);
  norm = l2_norm(hist);
  for (double& h : hist) h /= norm;
  return hist;
}

// ---------------------------------------------------------------------------
// encode

struct DescriptorParams {
  GaborBank gabor_bank;   // for DescriptorId::gabor
  GaborBank gist_bank;    // for DescriptorId::gist (S=4, O=8)
};

inline DescriptorParams default_descriptor_params(double gabor_base = 4.0,
                                                  int gabor_scales = 5,
                                                  double gist_base = 4.0) {
  DescriptorParams p;
  p.gabor_bank = build_gabor_bank(gabor_scales, 8, gabor_base);
  p.gist_bank = build_gabor_bank(4, 8, gist_base);
  return p;
}

inline GridSequence encode(const GrayImage& image, DescriptorId id, int g,
                           const DescriptorParams& params) {
  auto regions = partition(image, g);
  std::vector<Vec> raster(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    switch (id) {
      case DescriptorId::sift: raster[i] = sift_feat(regions[i]); break;
      case DescriptorId::gist: raster[i] = gist_feat(regions[i], params.gist_bank); break;
      case DescriptorId::centrist: raster[i] = centrist(regions[i]); break;
      case DescriptorId::gabor: raster[i] = gabor_feat(regions[i], params.gabor_bank); break;
    }
  }
  GridSequence seq;
  seq.descriptor_id = id;
  seq.g = g;
  seq.dim = raster.empty() ? 0 : static_cast<int>(raster[0].size());
  auto order = zigzag(g);
  seq.features.reserve(raster.size());
  for (int idx : order) seq.features.push_back(std::move(raster[idx]));
  return seq;
}

}  // namespace scenehmm

#endif
