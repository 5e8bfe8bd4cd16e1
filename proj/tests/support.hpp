#ifndef SCENEHMM_TESTS_SUPPORT_HPP
#define SCENEHMM_TESTS_SUPPORT_HPP

// Shared test fixtures: synthetic grating datasets and scratch directories.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "scenehmm/image.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("scenehmm_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Sinusoidal grating at a given orientation plus uniform pixel noise.
inline scenehmm::GrayImage make_grating(int size, double theta,
                                        double wavelength, double noise,
                                        std::mt19937_64& rng) {
  scenehmm::GrayImage img;
  img.width = size;
  img.height = size;
  img.pixels.resize(static_cast<std::size_t>(size) * size);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  std::uniform_real_distribution<double> phase_dist(0.0, 2 * std::numbers::pi);
  double phase = phase_dist(rng);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double xr = x * std::cos(theta) + y * std::sin(theta);
      double v = 127.5 + 100.0 * std::sin(2 * std::numbers::pi * xr / wavelength + phase);
      v += jitter(rng);
      img.pixels[static_cast<std::size_t>(y) * size + x] =
          static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

// Class-per-folder dataset of oriented gratings; class k uses orientation
// k*pi/classes.
inline void write_grating_dataset(const fs::path& root, int classes,
                                  int per_class, int size, double noise,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < classes; ++c) {
    fs::path dir = root / ("class" + std::to_string(c));
    fs::create_directories(dir);
    double theta = c * std::numbers::pi / classes;
    for (int i = 0; i < per_class; ++i) {
      auto img = make_grating(size, theta, 8.0, noise, rng);
      auto bytes = scenehmm::encode_pgm(img);
      std::ofstream f(dir / ("img" + std::to_string(1000 + i) + ".pgm"),
                      std::ios::binary);
      f.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    }
  }
}

inline scenehmm::GrayImage constant_image(int w, int h, std::uint8_t value) {
  scenehmm::GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(static_cast<std::size_t>(w) * h, value);
  return img;
}

inline scenehmm::GrayImage random_image(int w, int h, std::uint64_t seed) {
  scenehmm::GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h);
  std::mt19937_64 rng(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

}  // namespace testsupport

#endif
