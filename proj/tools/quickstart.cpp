// Minimal library walkthrough: synthesize two texture classes, encode them
// into grid sequences, build a reference bank and inspect the forward
// posteriors of a held-out image.

#include <iostream>
#include <random>

#include "scenehmm/descriptors.hpp"
#include "scenehmm/hmm.hpp"

using namespace scenehmm;

namespace {

GrayImage noisy_gradient(int size, bool horizontal, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> jitter(-4, 4);
  GrayImage img;
  img.width = size;
  img.height = size;
  img.pixels.resize(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      int base = (horizontal ? x : y) * 255 / (size - 1);
      int v = std::clamp(base + jitter(rng), 0, 255);
      img.pixels[static_cast<std::size_t>(y) * size + x] =
          static_cast<std::uint8_t>(v);
    }
  return img;
}

}  // namespace

int main() {
  std::mt19937_64 rng(17);
  DescriptorParams params = default_descriptor_params(2.0, 2, 2.0);
  const int g = 3;

  // three training images per class, encoded as zigzag grid sequences
  std::vector<GridSequence> train;
  std::vector<std::pair<const GridSequence*, int>> refs;
  for (int cls = 0; cls < 2; ++cls) {
    for (int i = 0; i < 3; ++i) {
      GrayImage img = noisy_gradient(48, cls == 0, rng);
      GridSequence seq = encode(img, DescriptorId::centrist, g, params);
      seq.id = "class" + std::to_string(cls) + "/" + std::to_string(i);
      train.push_back(std::move(seq));
    }
  }
  for (std::size_t i = 0; i < train.size(); ++i)
    refs.push_back({&train[i], static_cast<int>(i / 3)});
  ReferenceBank bank = build_bank(refs, 2);

  GrayImage query_img = noisy_gradient(48, true, rng);
  GridSequence query = encode(query_img, DescriptorId::centrist, g, params);
  AlphaMatrix alpha = forward(query, bank);
  HmmFeatureVector fv = feature_vector(alpha);

  std::cout << "per-position posterior of class 0:";
  for (int t = 0; t < alpha.n; ++t) std::cout << ' ' << alpha.rows[t][0];
  std::cout << "\nfeature vector length: " << fv.v.size() << '\n';
  return 0;
}
