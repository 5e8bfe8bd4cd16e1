#ifndef SCENEHMM_IMAGE_HPP
#define SCENEHMM_IMAGE_HPP

// Grayscale image decoding (PGM P2/P5, PNG), class-per-folder dataset
// ingestion and deterministic train/test splits.

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "scenehmm/common.hpp"

namespace scenehmm {

constexpr int kMinImageSide = 16;

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width*height

  std::uint8_t at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * width + c];
  }
};

inline void check_image_dims(int w, int h) {
  if (w < kMinImageSide || h < kMinImageSide)
    throw dimension_error("image below minimum " +
                          std::to_string(kMinImageSide) + "x" +
                          std::to_string(kMinImageSide) + " (" +
                          std::to_string(w) + "x" + std::to_string(h) + ")");
}

// ---------------------------------------------------------------------------
// PGM

namespace detail {

inline void skip_pgm_whitespace(const std::uint8_t* data, std::size_t size,
                                std::size_t& pos) {
  while (pos < size) {
    if (std::isspace(data[pos])) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < size && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
}

inline long read_pgm_int(const std::uint8_t* data, std::size_t size,
                         std::size_t& pos) {
  skip_pgm_whitespace(data, size, pos);
  if (pos >= size || !std::isdigit(data[pos]))
    throw format_error("PGM: expected integer in header");
  long v = 0;
  while (pos < size && std::isdigit(data[pos])) {
    v = v * 10 + (data[pos] - '0');
    if (v > 1'000'000'000) throw format_error("PGM: integer overflow");
    ++pos;
  }
  return v;
}

}  // namespace detail

inline GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  const std::uint8_t* d = bytes.data();
  std::size_t size = bytes.size(), pos = 0;
  if (size < 2 || d[0] != 'P' || (d[1] != '2' && d[1] != '5'))
    throw format_error("PGM: missing P2/P5 magic");
  const bool binary = d[1] == '5';
  pos = 2;
  long w = detail::read_pgm_int(d, size, pos);
  long h = detail::read_pgm_int(d, size, pos);
  long maxval = detail::read_pgm_int(d, size, pos);
  if (w <= 0 || h <= 0) throw format_error("PGM: non-positive dimensions");
  if (maxval <= 0 || maxval > 255)
    throw format_error("PGM: unsupported maxval " + std::to_string(maxval));
  check_image_dims(static_cast<int>(w), static_cast<int>(h));

  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  img.pixels.resize(n);
  if (binary) {
    // exactly one whitespace byte separates the header from the raster
    if (pos >= size || !std::isspace(d[pos]))
      throw format_error("PGM: missing raster separator");
    ++pos;
    if (size - pos < n) throw format_error("PGM: truncated pixel data");
    std::memcpy(img.pixels.data(), d + pos, n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long v = detail::read_pgm_int(d, size, pos);
      if (v > maxval) throw format_error("PGM: sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

inline std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  std::string header = "P5\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale or RGB, non-interlaced; inflate via zlib)

namespace detail {

inline std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline std::vector<std::uint8_t> zlib_inflate(
    const std::vector<std::uint8_t>& in, std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  uLongf out_len = static_cast<uLongf>(expected);
  int rc = uncompress(out.data(), &out_len, in.data(),
                      static_cast<uLong>(in.size()));
  if (rc != Z_OK || out_len != expected)
    throw format_error("PNG: corrupt compressed stream");
  return out;
}

inline std::uint8_t paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

}  // namespace detail

inline GrayImage decode_png_gray(const std::vector<std::uint8_t>& bytes) {
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
    throw format_error("PNG: bad signature");

  std::size_t pos = 8;
  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  bool have_ihdr = false, have_iend = false;
  std::vector<std::uint8_t> idat;

  while (pos + 8 <= bytes.size() && !have_iend) {
    std::uint32_t len = detail::be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) throw format_error("PNG: truncated chunk");
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const std::uint8_t* data = &bytes[pos + 8];
    std::uint32_t expect_crc = detail::be32(&bytes[pos + 8 + len]);
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, &bytes[pos + 4], 4), data, len));
    if (crc != expect_crc) throw format_error("PNG: chunk CRC mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw format_error("PNG: bad IHDR length");
      width = static_cast<int>(detail::be32(data));
      height = static_cast<int>(detail::be32(data + 4));
      bit_depth = data[8];
      color_type = data[9];
      if (data[12] != 0) throw format_error("PNG: interlacing unsupported");
      if (bit_depth != 8 || (color_type != 0 && color_type != 2))
        throw format_error("PNG: only 8-bit grayscale or RGB supported");
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      have_iend = true;
    }
    pos += 12 + len;
  }
  if (!have_ihdr || !have_iend || idat.empty())
    throw format_error("PNG: missing required chunks");
  if (width <= 0 || height <= 0) throw format_error("PNG: bad dimensions");
  check_image_dims(width, height);

  const int channels = color_type == 2 ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  std::vector<std::uint8_t> raw =
      detail::zlib_inflate(idat, (stride + 1) * height);

  // undo per-scanline filters in place
  std::vector<std::uint8_t> prev(stride, 0);
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height);
  std::vector<std::uint8_t> line(stride);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = &raw[(stride + 1) * y];
    int filter = src[0];
    for (std::size_t x = 0; x < stride; ++x) {
      int a = x >= static_cast<std::size_t>(channels)
                  ? line[x - channels]
                  : 0;                      // left
      int b = prev[x];                      // up
      int c = x >= static_cast<std::size_t>(channels)
                  ? prev[x - channels]
                  : 0;                      // up-left
      int v = src[1 + x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += detail::paeth(a, b, c); break;
        default: throw format_error("PNG: unknown filter type");
      }
      line[x] = static_cast<std::uint8_t>(v & 0xff);
    }
    for (int x = 0; x < width; ++x) {
      if (channels == 1) {
        img.pixels[static_cast<std::size_t>(y) * width + x] = line[x];
      } else {
        double lum = 0.299 * line[3 * x] + 0.587 * line[3 * x + 1] +
                     0.114 * line[3 * x + 2];
        img.pixels[static_cast<std::size_t>(y) * width + x] =
            static_cast<std::uint8_t>(std::lround(lum));
      }
    }
    prev = line;
  }
  return img;
}

// ---------------------------------------------------------------------------
// Dataset

struct LabeledImage {
  std::string id;   // "<class_name>/<file_stem>"
  int class_index;  // 0..m-1
  GrayImage image;
};

struct LabeledImageSet {
  std::vector<LabeledImage> items;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

inline std::vector<std::uint8_t> read_file_bytes(
    const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline GrayImage decode_image_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  auto bytes = read_file_bytes(p);
  if (ext == ".pgm") return decode_pgm(bytes);
  if (ext == ".png") return decode_png_gray(bytes);
  throw format_error("unsupported image extension " + ext);
}

// Layout: root/<class_name>/<image>.{pgm,png}. Class indices follow
// lexicographic directory order; items are class-major, filename-sorted.
inline LabeledImageSet load_dataset(const std::filesystem::path& root,
                                    std::ostream& warnings = std::cerr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw data_error("dataset root is not a directory: " + root.string());

  std::vector<std::string> class_dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) class_dirs.push_back(e.path().filename().string());
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.size() < 2)
    throw data_error("dataset needs at least 2 class folders, found " +
                     std::to_string(class_dirs.size()));

  LabeledImageSet set;
  set.class_names = class_dirs;
  for (int ci = 0; ci < static_cast<int>(class_dirs.size()); ++ci) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(root / class_dirs[ci]))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    int usable = 0;
    for (const auto& f : files) {
      try {
        GrayImage img = decode_image_file(f);
        set.items.push_back({class_dirs[ci] + "/" + f.stem().string(), ci,
                             std::move(img)});
        ++usable;
      } catch (const error& e) {
        warnings << "warning: skipping " << f.string() << ": " << e.what()
                 << "\n";
      }
    }
    if (usable < 2)
      throw data_error("class '" + class_dirs[ci] +
                       "' has fewer than 2 usable images");
  }
  return set;
}

// ---------------------------------------------------------------------------
// Split

struct SplitSpec {
  std::uint64_t seed = 0;
  int train_per_class = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  bool is_train(const std::string& id) const {
    return std::find(train_ids.begin(), train_ids.end(), id) !=
           train_ids.end();
  }
};

// Per class, min(train_per_class, size-1) ids picked by a seeded shuffle;
// the remainder goes to test. Tiny classes keep at least one test image.
inline SplitSpec make_split(const LabeledImageSet& set, int train_per_class,
                            std::uint64_t seed) {
  if (train_per_class < 1)
    throw parameter_error("train_per_class must be >= 1");

  std::vector<std::vector<std::string>> per_class(set.num_classes());
  for (const auto& item : set.items)
    per_class[item.class_index].push_back(item.id);

  SplitSpec split;
  split.seed = seed;
  split.train_per_class = train_per_class;
  std::mt19937_64 rng(seed);
  for (auto& ids : per_class) {
    deterministic_shuffle(ids, rng);
    std::size_t n_train = std::min<std::size_t>(
        static_cast<std::size_t>(train_per_class), ids.size() - 1);
    std::vector<std::string> train(ids.begin(), ids.begin() + n_train);
    std::vector<std::string> test(ids.begin() + n_train, ids.end());
    // sorted within class for stable serialization
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    split.train_ids.insert(split.train_ids.end(), train.begin(), train.end());
    split.test_ids.insert(split.test_ids.end(), test.begin(), test.end());
  }
  return split;
}

}  // namespace scenehmm

#endif
