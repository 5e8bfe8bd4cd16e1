#ifndef SCENEHMM_SERIALIZE_HPP
#define SCENEHMM_SERIALIZE_HPP

// JSON / JSON-lines / CSV persistence for every pipeline artifact.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenehmm/common.hpp"
#include "scenehmm/descriptors.hpp"
#include "scenehmm/ensemble.hpp"
#include "scenehmm/hmm.hpp"
#include "scenehmm/image.hpp"
#include "scenehmm/reduce.hpp"
#include "scenehmm/svm.hpp"

namespace scenehmm {

using json = nlohmann::json;

inline void write_text_file(const std::filesystem::path& p,
                            const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot write " + p.string());
  f << text;
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// FNV-1a, used for the bundle manifest content hashes.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

// ---------------------------------------------------------------------------
// SplitSpec

inline json split_to_json(const SplitSpec& s) {
  return json{{"seed", s.seed},
              {"train_per_class", s.train_per_class},
              {"train", s.train_ids},
              {"test", s.test_ids}};
}

inline SplitSpec split_from_json(const json& j) {
  SplitSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train_per_class = j.at("train_per_class").get<int>();
  s.train_ids = j.at("train").get<std::vector<std::string>>();
  s.test_ids = j.at("test").get<std::vector<std::string>>();
  return s;
}

// ---------------------------------------------------------------------------
// GridSequence / HmmFeatureVector JSON-lines

inline std::string grid_sequence_line(const GridSequence& seq) {
  json j{{"id", seq.id},
         {"descriptor", to_string(seq.descriptor_id)},
         {"g", seq.g},
         {"features", seq.features}};
  return j.dump();
}

inline GridSequence grid_sequence_from_line(const std::string& line) {
  json j = json::parse(line);
  GridSequence seq;
  seq.id = j.at("id").get<std::string>();
  seq.descriptor_id = descriptor_from_string(j.at("descriptor").get<std::string>());
  seq.g = j.at("g").get<int>();
  seq.features = j.at("features").get<std::vector<Vec>>();
  seq.dim = seq.features.empty() ? 0 : static_cast<int>(seq.features[0].size());
  return seq;
}

struct FeatureRecord {
  std::string id;
  std::string descriptor;
  Vec v;
};

inline std::string feature_record_line(const FeatureRecord& r) {
  return json{{"id", r.id}, {"descriptor", r.descriptor}, {"v", r.v}}.dump();
}

inline FeatureRecord feature_record_from_line(const std::string& line) {
  json j = json::parse(line);
  return {j.at("id").get<std::string>(), j.at("descriptor").get<std::string>(),
          j.at("v").get<Vec>()};
}

template <typename T, typename Fn>
void write_jsonl(const std::filesystem::path& p, const std::vector<T>& items,
                 Fn to_line) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot write " + p.string());
  for (const auto& item : items) f << to_line(item) << "\n";
}

template <typename T, typename Fn>
std::vector<T> read_jsonl(const std::filesystem::path& p, Fn from_line) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot read " + p.string());
  std::vector<T> out;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) out.push_back(from_line(line));
  return out;
}

// ---------------------------------------------------------------------------
// PcaModel

inline json pca_to_json(const PcaModel& m) {
  return json{{"mean", m.mean},
              {"components", m.components},
              {"eigenvalues", m.eigenvalues},
              {"rank_deficient", m.rank_deficient}};
}

inline PcaModel pca_from_json(const json& j) {
  PcaModel m;
  m.mean = j.at("mean").get<Vec>();
  m.components = j.at("components").get<std::vector<Vec>>();
  m.eigenvalues = j.at("eigenvalues").get<Vec>();
  m.rank_deficient = j.at("rank_deficient").get<bool>();
  return m;
}

// ---------------------------------------------------------------------------
// ReferenceBank (exemplars flattened with per-(class, position) offsets)

inline json bank_to_json(const ReferenceBank& b) {
  std::vector<Vec> flat;
  std::vector<std::string> owners;
  std::vector<int> offsets;
  for (std::size_t s = 0; s < b.exemplars.size(); ++s) {
    offsets.push_back(static_cast<int>(flat.size()));
    flat.insert(flat.end(), b.exemplars[s].begin(), b.exemplars[s].end());
    owners.insert(owners.end(), b.exemplar_owner[s].begin(),
                  b.exemplar_owner[s].end());
  }
  offsets.push_back(static_cast<int>(flat.size()));
  return json{{"m", b.m},       {"n", b.n},           {"dim", b.dim},
              {"offsets", offsets}, {"exemplars", flat}, {"owners", owners},
              {"centroids", b.centroids}};
}

inline ReferenceBank bank_from_json(const json& j) {
  ReferenceBank b;
  b.m = j.at("m").get<int>();
  b.n = j.at("n").get<int>();
  b.dim = j.at("dim").get<int>();
  auto offsets = j.at("offsets").get<std::vector<int>>();
  auto flat = j.at("exemplars").get<std::vector<Vec>>();
  auto owners = j.at("owners").get<std::vector<std::string>>();
  b.centroids = j.at("centroids").get<std::vector<Vec>>();
  b.exemplars.resize(offsets.size() - 1);
  b.exemplar_owner.resize(offsets.size() - 1);
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    b.exemplars[s].assign(flat.begin() + offsets[s], flat.begin() + offsets[s + 1]);
    b.exemplar_owner[s].assign(owners.begin() + offsets[s],
                               owners.begin() + offsets[s + 1]);
  }
  return b;
}

// ---------------------------------------------------------------------------
// OvrClassifier

inline json ovr_to_json(const OvrClassifier& clf) {
  json machines = json::array();
  for (const auto& m : clf.machines) {
    machines.push_back(json{{"support_vectors", m.support_vectors},
                            {"dual_coeffs", m.dual_coeffs},
                            {"bias", m.bias},
                            {"platt_a", m.platt_a},
                            {"platt_b", m.platt_b},
                            {"converged", m.converged}});
  }
  return json{{"gamma", clf.gamma},
              {"dim", clf.dim},
              {"descriptor", clf.descriptor},
              {"machines", machines}};
}

inline OvrClassifier ovr_from_json(const json& j) {
  OvrClassifier clf;
  clf.gamma = j.at("gamma").get<double>();
  clf.dim = j.at("dim").get<int>();
  clf.descriptor = j.at("descriptor").get<std::string>();
  for (const auto& mj : j.at("machines")) {
    BinarySvm m;
    m.support_vectors = mj.at("support_vectors").get<std::vector<Vec>>();
    m.dual_coeffs = mj.at("dual_coeffs").get<Vec>();
    m.bias = mj.at("bias").get<double>();
    m.platt_a = mj.at("platt_a").get<double>();
    m.platt_b = mj.at("platt_b").get<double>();
    m.converged = mj.at("converged").get<bool>();
    clf.machines.push_back(std::move(m));
  }
  return clf;
}

// ---------------------------------------------------------------------------
// ScoreTensor CSV (one file per classifier)

inline std::string score_csv(const ScoreTensor& s, int classifier) {
  std::ostringstream out;
  out << "image_id";
  for (int k = 0; k < s.m; ++k) out << ",class_" << k;
  out << "\n";
  out << std::setprecision(17);
  for (int j = 0; j < s.num_images(); ++j) {
    out << s.image_ids[j];
    for (int k = 0; k < s.m; ++k) out << "," << s.scores[classifier][j][k];
    out << "\n";
  }
  return out.str();
}

// Parses one classifier's CSV into (image id, probability row) pairs.
inline std::vector<std::pair<std::string, Vec>> score_csv_parse(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("image_id,", 0) != 0)
    throw format_error("score CSV: bad header");
  std::vector<std::pair<std::string, Vec>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    if (!std::getline(ls, cell, ',')) throw format_error("score CSV: bad row");
    std::pair<std::string, Vec> row;
    row.first = cell;
    while (std::getline(ls, cell, ',')) row.second.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// EnsembleWeights

inline json weights_to_json(const std::vector<std::string>& classifier_ids,
                            const EnsembleWeights& w) {
  return json{{"classifiers", classifier_ids}, {"w", w.w}};
}

inline std::pair<std::vector<std::string>, EnsembleWeights> weights_from_json(
    const json& j) {
  return {j.at("classifiers").get<std::vector<std::string>>(),
          {j.at("w").get<Vec>()}};
}

}  // namespace scenehmm

#endif
