#ifndef SCENEHMM_PIPELINE_HPP
#define SCENEHMM_PIPELINE_HPP

// End-to-end orchestration: extract -> train -> fuse -> eval -> sweep, plus
// the on-disk bundle layout and evaluation reports.

#include <algorithm>
#include <array>
#include <filesystem>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "scenehmm/common.hpp"
#include "scenehmm/descriptors.hpp"
#include "scenehmm/ensemble.hpp"
#include "scenehmm/hmm.hpp"
#include "scenehmm/image.hpp"
#include "scenehmm/reduce.hpp"
#include "scenehmm/serialize.hpp"
#include "scenehmm/svm.hpp"

namespace scenehmm {

namespace fs = std::filesystem;

constexpr std::array<DescriptorId, 4> kAllDescriptors = {
    DescriptorId::sift, DescriptorId::gist, DescriptorId::centrist,
    DescriptorId::gabor};

struct DescriptorConfig {
  bool enabled = true;
  int g = 3;
  int pca_dim = 0;  // 0 disables PCA
  int gabor_scales = 5;
  int gabor_orientations = 8;
  double gabor_base_wavelength = 4.0;
  KernelParams svm;  // svm.gamma == 0 selects the median heuristic
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  int train_per_class = 100;
  int jobs = 1;
  int ensemble_iters = 5000;
  bool ensemble_squared = false;
  std::map<std::string, DescriptorConfig> descriptors;

  std::vector<DescriptorId> enabled() const {
    std::vector<DescriptorId> out;
    for (auto id : kAllDescriptors)
      if (descriptors.at(to_string(id)).enabled) out.push_back(id);
    return out;
  }
};

// Grid counts 3/7/5/3 and PCA dims 20/10 for sift/centrist.
inline PipelineConfig default_config() {
  PipelineConfig cfg;
  DescriptorConfig sift;
  sift.g = 7;
  sift.pca_dim = 20;
  DescriptorConfig gist;
  gist.g = 3;
  gist.gabor_scales = 4;
  DescriptorConfig centrist;
  centrist.g = 5;
  centrist.pca_dim = 10;
  DescriptorConfig gabor;
  gabor.g = 3;
  gabor.gabor_scales = 5;
  cfg.descriptors["sift"] = sift;
  cfg.descriptors["gist"] = gist;
  cfg.descriptors["centrist"] = centrist;
  cfg.descriptors["gabor"] = gabor;
  for (auto& [name, d] : cfg.descriptors) d.svm.gamma = 0.0;  // auto
  return cfg;
}

inline void validate_config(const PipelineConfig& cfg) {
  bool any = false;
  for (auto id : kAllDescriptors) {
    auto it = cfg.descriptors.find(to_string(id));
    if (it == cfg.descriptors.end())
      throw parameter_error("config missing descriptor '" + to_string(id) + "'");
    const auto& d = it->second;
    if (d.g != 3 && d.g != 5 && d.g != 7)
      throw parameter_error("config: g must be one of {3,5,7}");
    if (d.pca_dim < 0) throw parameter_error("config: pca_dim must be >= 0");
    if (d.svm.c <= 0 || d.svm.gamma < 0)
      throw parameter_error("config: svm c must be > 0, gamma >= 0");
    any = any || d.enabled;
  }
  if (!any) throw parameter_error("config: no descriptor enabled");
  if (cfg.train_per_class < 1)
    throw parameter_error("config: train_per_class must be >= 1");
  if (cfg.ensemble_iters < 1)
    throw parameter_error("config: ensemble iters must be >= 1");
}

inline json config_to_json(const PipelineConfig& cfg) {
  json descs;
  for (const auto& [name, d] : cfg.descriptors) {
    descs[name] = json{{"enabled", d.enabled},
                       {"g", d.g},
                       {"pca_dim", d.pca_dim},
                       {"gabor_scales", d.gabor_scales},
                       {"gabor_orientations", d.gabor_orientations},
                       {"gabor_base_wavelength", d.gabor_base_wavelength},
                       {"svm",
                        {{"gamma", d.svm.gamma},
                         {"c", d.svm.c},
                         {"tol", d.svm.tol},
                         {"max_passes", d.svm.max_passes}}}};
  }
  return json{{"seed", cfg.seed},
              {"train_per_class", cfg.train_per_class},
              {"jobs", cfg.jobs},
              {"ensemble", {{"iters", cfg.ensemble_iters}, {"squared", cfg.ensemble_squared}}},
              {"descriptors", descs}};
}

inline PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg = default_config();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("train_per_class"))
    cfg.train_per_class = j.at("train_per_class").get<int>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    if (e.contains("iters")) cfg.ensemble_iters = e.at("iters").get<int>();
    if (e.contains("squared")) cfg.ensemble_squared = e.at("squared").get<bool>();
  }
  if (j.contains("descriptors")) {
    for (const auto& [name, dj] : j.at("descriptors").items()) {
      DescriptorConfig& d = cfg.descriptors.at(name);
      if (dj.contains("enabled")) d.enabled = dj.at("enabled").get<bool>();
      if (dj.contains("g")) d.g = dj.at("g").get<int>();
      if (dj.contains("pca_dim")) d.pca_dim = dj.at("pca_dim").get<int>();
      if (dj.contains("gabor_scales"))
        d.gabor_scales = dj.at("gabor_scales").get<int>();
      if (dj.contains("gabor_orientations"))
        d.gabor_orientations = dj.at("gabor_orientations").get<int>();
      if (dj.contains("gabor_base_wavelength"))
        d.gabor_base_wavelength = dj.at("gabor_base_wavelength").get<double>();
      if (dj.contains("svm")) {
        const auto& s = dj.at("svm");
        if (s.contains("gamma")) d.svm.gamma = s.at("gamma").get<double>();
        if (s.contains("c")) d.svm.c = s.at("c").get<double>();
        if (s.contains("tol")) d.svm.tol = s.at("tol").get<double>();
        if (s.contains("max_passes"))
          d.svm.max_passes = s.at("max_passes").get<int>();
      }
    }
  }
  validate_config(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Bundle helpers

inline fs::path bundle_file(const fs::path& bundle, const std::string& name) {
  return bundle / name;
}

inline void update_manifest(const fs::path& bundle) {
  json files;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(bundle))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths)
    files[p.filename().string()] = fnv1a_hex(read_text_file(p));
  json manifest{{"format_version", 1}, {"files", files}};
  write_text_file(bundle / "manifest.json", manifest.dump(2) + "\n");
}

struct DatasetIndex {
  std::vector<std::string> class_names;
  std::map<std::string, int> labels;  // image id -> class index
};

inline json dataset_index_to_json(const DatasetIndex& d) {
  return json{{"class_names", d.class_names}, {"labels", d.labels}};
}

inline DatasetIndex dataset_index_from_json(const json& j) {
  DatasetIndex d;
  d.class_names = j.at("class_names").get<std::vector<std::string>>();
  d.labels = j.at("labels").get<std::map<std::string, int>>();
  return d;
}

// Fixed-chunk parallel map over an index range; each worker writes only its
// own output slots, so results are independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::size_t n_workers = std::min<std::size_t>(jobs, count);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += n_workers) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

// ---------------------------------------------------------------------------
// extract

// Median-heuristic RBF width: 1 / (D * median pairwise squared distance over
// up to 100 deterministically sampled pairs).
inline double auto_gamma(const std::vector<Vec>& features, std::uint64_t seed) {
  if (features.size() < 2) return 1.0;
  std::mt19937_64 rng(seed);
  Vec d2s;
  for (int s = 0; s < 100; ++s) {
    std::size_t i = rng() % features.size();
    std::size_t j = rng() % features.size();
    if (i == j) continue;
    d2s.push_back(sq(l2_dist(features[i], features[j])));
  }
  if (d2s.empty()) return 1.0;
  std::sort(d2s.begin(), d2s.end());
  double median = d2s[d2s.size() / 2];
  double d = static_cast<double>(features[0].size());
  if (median <= 0.0 || d <= 0.0) return 1.0;
  return 1.0 / (d * median);
}

inline void cmd_extract(const PipelineConfig& cfg, const fs::path& dataset_root,
                        const fs::path& bundle) {
  validate_config(cfg);
  fs::create_directories(bundle);
  LabeledImageSet set = load_dataset(dataset_root);
  SplitSpec split = make_split(set, cfg.train_per_class, cfg.seed);

  DatasetIndex index;
  index.class_names = set.class_names;
  for (const auto& item : set.items) index.labels[item.id] = item.class_index;

  write_text_file(bundle / "config.json", config_to_json(cfg).dump(2) + "\n");
  write_text_file(bundle / "split.json", split_to_json(split).dump(2) + "\n");
  write_text_file(bundle / "dataset.json",
                  dataset_index_to_json(index).dump(2) + "\n");

  std::map<std::string, bool> in_train;
  for (const auto& id : split.train_ids) in_train[id] = true;
  for (const auto& id : split.test_ids) in_train[id] = false;

  for (auto desc_id : cfg.enabled()) {
    const std::string name = to_string(desc_id);
    const DescriptorConfig& dc = cfg.descriptors.at(name);

    DescriptorParams params;
    if (desc_id == DescriptorId::gabor)
      params.gabor_bank = build_gabor_bank(dc.gabor_scales,
                                           dc.gabor_orientations,
                                           dc.gabor_base_wavelength);
    if (desc_id == DescriptorId::gist)
      params.gist_bank = build_gabor_bank(4, 8, dc.gabor_base_wavelength);

    std::vector<GridSequence> seqs(set.items.size());
    parallel_for(set.items.size(), cfg.jobs, [&](std::size_t i) {
      seqs[i] = encode(set.items[i].image, desc_id, dc.g, params);
      seqs[i].id = set.items[i].id;
    });
    write_jsonl(bundle / ("grids_" + name + ".jsonl"), seqs,
                grid_sequence_line);

    if (dc.pca_dim > 0) {
      std::vector<Vec> pool;
      for (std::size_t i = 0; i < seqs.size(); ++i)
        if (in_train.at(seqs[i].id))
          pool.insert(pool.end(), seqs[i].features.begin(),
                      seqs[i].features.end());
      PcaModel pca = pca_fit(pool, dc.pca_dim);
      write_text_file(bundle / ("pca_" + name + ".json"),
                      pca_to_json(pca).dump() + "\n");
      for (auto& seq : seqs) {
        for (auto& f : seq.features) f = pca_apply(pca, f);
        seq.dim = dc.pca_dim;
      }
    }

    std::vector<std::pair<const GridSequence*, int>> train_seqs;
    for (const auto& seq : seqs)
      if (in_train.at(seq.id))
        train_seqs.emplace_back(&seq, index.labels.at(seq.id));
    ReferenceBank bank = build_bank(train_seqs, set.num_classes());
    write_text_file(bundle / ("bank_" + name + ".json"),
                    bank_to_json(bank).dump() + "\n");

    std::vector<FeatureRecord> records(seqs.size());
    parallel_for(seqs.size(), cfg.jobs, [&](std::size_t i) {
      std::optional<std::string> exclude;
      if (in_train.at(seqs[i].id)) exclude = seqs[i].id;  // leave-one-out
      AlphaMatrix alpha = forward(seqs[i], bank, exclude);
      records[i] = {seqs[i].id, name, feature_vector(alpha).v};
    });
    write_jsonl(bundle / ("features_" + name + ".jsonl"), records,
                feature_record_line);
  }
  update_manifest(bundle);
}

// ---------------------------------------------------------------------------
// train

struct TrainOutcome {
  bool all_converged = true;
};

inline TrainOutcome cmd_train(const PipelineConfig& cfg,
                              const fs::path& bundle) {
  validate_config(cfg);
  DatasetIndex index = dataset_index_from_json(
      json::parse(read_text_file(bundle / "dataset.json")));
  SplitSpec split =
      split_from_json(json::parse(read_text_file(bundle / "split.json")));
  const int m = static_cast<int>(index.class_names.size());

  TrainOutcome outcome;
  for (auto desc_id : cfg.enabled()) {
    const std::string name = to_string(desc_id);
    auto records = read_jsonl<FeatureRecord>(
        bundle / ("features_" + name + ".jsonl"), feature_record_from_line);
    std::map<std::string, const FeatureRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;

    std::vector<Vec> train_x;
    std::vector<int> train_y;
    std::vector<std::string> train_ids;
    for (const auto& id : split.train_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw data_error("missing feature record for training id " + id);
      train_x.push_back(it->second->v);
      train_y.push_back(index.labels.at(id));
      train_ids.push_back(id);
    }

    KernelParams params = cfg.descriptors.at(name).svm;
    if (params.gamma == 0.0) params.gamma = auto_gamma(train_x, cfg.seed);

    OvrClassifier clf = ovr_train(train_x, train_y, m, params);
    clf.descriptor = name;
    for (const auto& machine : clf.machines)
      outcome.all_converged = outcome.all_converged && machine.converged;
    write_text_file(bundle / ("svm_" + name + ".json"),
                    ovr_to_json(clf).dump() + "\n");

    ScoreTensor scores;
    scores.classifier_ids = {name};
    scores.image_ids = train_ids;
    scores.m = m;
    scores.scores.resize(1);
    scores.scores[0].resize(train_ids.size());
    parallel_for(train_ids.size(), cfg.jobs, [&](std::size_t i) {
      scores.scores[0][i] = predict_proba(clf, train_x[i]);
    });
    write_text_file(bundle / ("scores_" + name + ".csv"), score_csv(scores, 0));
  }
  update_manifest(bundle);
  return outcome;
}

// ---------------------------------------------------------------------------
// fuse

inline void cmd_fuse(const PipelineConfig& cfg, const fs::path& bundle) {
  validate_config(cfg);
  DatasetIndex index = dataset_index_from_json(
      json::parse(read_text_file(bundle / "dataset.json")));

  ScoreTensor tensor;
  tensor.m = static_cast<int>(index.class_names.size());
  for (auto desc_id : cfg.enabled()) {
    const std::string name = to_string(desc_id);
    auto rows = score_csv_parse(
        read_text_file(bundle / ("scores_" + name + ".csv")));
    if (tensor.image_ids.empty()) {
      for (const auto& [id, _] : rows) tensor.image_ids.push_back(id);
    } else {
      if (rows.size() != tensor.image_ids.size())
        throw data_error("score tensors cover different image sets");
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].first != tensor.image_ids[i])
          throw data_error("score tensor id mismatch at row " +
                           std::to_string(i));
    }
    std::vector<Vec> mat;
    for (auto& [_, v] : rows) mat.push_back(std::move(v));
    tensor.classifier_ids.push_back(name);
    tensor.scores.push_back(std::move(mat));
  }

  std::vector<int> labels;
  for (const auto& id : tensor.image_ids) labels.push_back(index.labels.at(id));

  EnsembleWeights w = solve_weights(tensor, labels, cfg.ensemble_iters,
                                    cfg.ensemble_squared);
  json out = weights_to_json(tensor.classifier_ids, w);
  out["objective"] = objective(w.w, tensor, labels, cfg.ensemble_squared);
  const int c = tensor.num_classifiers();
  out["objective_uniform"] =
      objective(Vec(c, 1.0 / c), tensor, labels, cfg.ensemble_squared);
  json singles;
  for (int i = 0; i < c; ++i) {
    Vec e(c, 0.0);
    e[i] = 1.0;
    singles[tensor.classifier_ids[i]] =
        objective(e, tensor, labels, cfg.ensemble_squared);
  }
  out["objective_single"] = singles;
  write_text_file(bundle / "weights.json", out.dump(2) + "\n");
  update_manifest(bundle);
}

// ---------------------------------------------------------------------------
// eval

struct EvaluationReport {
  double accuracy = 0.0;
  Vec per_class_accuracy;
  double mean_per_class_accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // rows = true class
  std::map<std::string, double> single_accuracy;
  std::vector<std::string> classifier_ids;
  Vec weights;
  std::vector<std::string> class_names;
};

inline json report_to_json(const EvaluationReport& r) {
  return json{{"accuracy", r.accuracy},
              {"per_class_accuracy", r.per_class_accuracy},
              {"mean_per_class_accuracy", r.mean_per_class_accuracy},
              {"confusion", r.confusion},
              {"single_accuracy", r.single_accuracy},
              {"classifiers", r.classifier_ids},
              {"weights", r.weights},
              {"class_names", r.class_names}};
}

inline std::string report_table(const EvaluationReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  std::size_t name_w = 8;
  for (const auto& n : r.class_names) name_w = std::max(name_w, n.size() + 1);

  out << std::left << std::setw(static_cast<int>(name_w)) << "Class";
  for (const auto& c : r.classifier_ids)
    out << std::right << std::setw(10) << c;
  out << std::right << std::setw(10) << "Combine" << "\n";
  // per-class single accuracies are not broken out per descriptor here; the
  // table shows overall rows the way the accuracy summary is reported
  for (std::size_t k = 0; k < r.class_names.size(); ++k) {
    out << std::left << std::setw(static_cast<int>(name_w)) << r.class_names[k];
    for (std::size_t i = 0; i < r.classifier_ids.size(); ++i)
      out << std::right << std::setw(10) << "-";
    out << std::right << std::setw(10) << 100.0 * r.per_class_accuracy[k]
        << "\n";
  }
  out << std::left << std::setw(static_cast<int>(name_w)) << "Average";
  for (const auto& c : r.classifier_ids)
    out << std::right << std::setw(10) << 100.0 * r.single_accuracy.at(c);
  out << std::right << std::setw(10) << 100.0 * r.accuracy << "\n";
  return out.str();
}

inline EvaluationReport cmd_eval(const PipelineConfig& cfg,
                                 const fs::path& bundle) {
  validate_config(cfg);
  DatasetIndex index = dataset_index_from_json(
      json::parse(read_text_file(bundle / "dataset.json")));
  SplitSpec split =
      split_from_json(json::parse(read_text_file(bundle / "split.json")));
  auto [clf_ids, weights] = weights_from_json(
      json::parse(read_text_file(bundle / "weights.json")));
  const int m = static_cast<int>(index.class_names.size());

  // per-classifier probabilities on the test set, in split.test order
  std::vector<std::vector<Vec>> probs(clf_ids.size());
  for (std::size_t ci = 0; ci < clf_ids.size(); ++ci) {
    OvrClassifier clf = ovr_from_json(
        json::parse(read_text_file(bundle / ("svm_" + clf_ids[ci] + ".json"))));
    auto records = read_jsonl<FeatureRecord>(
        bundle / ("features_" + clf_ids[ci] + ".jsonl"),
        feature_record_from_line);
    std::map<std::string, const FeatureRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    probs[ci].resize(split.test_ids.size());
    parallel_for(split.test_ids.size(), cfg.jobs, [&, ci](std::size_t i) {
      auto it = by_id.find(split.test_ids[i]);
      if (it == by_id.end())
        throw data_error("missing test feature for " + split.test_ids[i]);
      probs[ci][i] = predict_proba(clf, it->second->v);
    });
  }

  EvaluationReport report;
  report.classifier_ids = clf_ids;
  report.weights = weights.w;
  report.class_names = index.class_names;
  report.confusion.assign(m, std::vector<int>(m, 0));

  std::vector<int> single_correct(clf_ids.size(), 0);
  int correct = 0;
  std::vector<int> class_total(m, 0), class_correct(m, 0);
  for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
    int truth = index.labels.at(split.test_ids[i]);
    std::vector<Vec> image_probs;
    for (std::size_t ci = 0; ci < clf_ids.size(); ++ci) {
      image_probs.push_back(probs[ci][i]);
      int pred = static_cast<int>(std::distance(
          probs[ci][i].begin(),
          std::max_element(probs[ci][i].begin(), probs[ci][i].end())));
      if (pred == truth) ++single_correct[ci];
    }
    auto [fused, label] = fuse(image_probs, weights);
    report.confusion[truth][label]++;
    ++class_total[truth];
    if (label == truth) {
      ++correct;
      ++class_correct[truth];
    }
  }

  const int total = static_cast<int>(split.test_ids.size());
  report.accuracy = static_cast<double>(correct) / total;
  for (int k = 0; k < m; ++k)
    report.per_class_accuracy.push_back(
        class_total[k] > 0 ? static_cast<double>(class_correct[k]) / class_total[k]
                           : 0.0);
  report.mean_per_class_accuracy =
      std::accumulate(report.per_class_accuracy.begin(),
                      report.per_class_accuracy.end(), 0.0) /
      m;
  for (std::size_t ci = 0; ci < clf_ids.size(); ++ci)
    report.single_accuracy[clf_ids[ci]] =
        static_cast<double>(single_correct[ci]) / total;

  write_text_file(bundle / "report.json", report_to_json(report).dump(2) + "\n");
  write_text_file(bundle / "report.txt", report_table(report));
  update_manifest(bundle);
  return report;
}

// ---------------------------------------------------------------------------
// predict

struct Prediction {
  std::string class_name;
  int class_index = 0;
  Vec fused;
  std::map<std::string, Vec> per_classifier;
};

inline Prediction cmd_predict(const PipelineConfig& cfg,
                              const fs::path& image_path,
                              const fs::path& bundle) {
  validate_config(cfg);
  DatasetIndex index = dataset_index_from_json(
      json::parse(read_text_file(bundle / "dataset.json")));
  auto [clf_ids, weights] = weights_from_json(
      json::parse(read_text_file(bundle / "weights.json")));
  GrayImage img = decode_image_file(image_path);

  std::vector<Vec> all_probs;
  Prediction pred;
  for (const auto& name : clf_ids) {
    const DescriptorConfig& dc = cfg.descriptors.at(name);
    DescriptorId desc_id = descriptor_from_string(name);
    DescriptorParams params;
    if (desc_id == DescriptorId::gabor)
      params.gabor_bank = build_gabor_bank(dc.gabor_scales,
                                           dc.gabor_orientations,
                                           dc.gabor_base_wavelength);
    if (desc_id == DescriptorId::gist)
      params.gist_bank = build_gabor_bank(4, 8, dc.gabor_base_wavelength);
    GridSequence seq = encode(img, desc_id, dc.g, params);

    fs::path pca_path = bundle / ("pca_" + name + ".json");
    if (fs::exists(pca_path)) {
      PcaModel pca = pca_from_json(json::parse(read_text_file(pca_path)));
      for (auto& f : seq.features) f = pca_apply(pca, f);
      seq.dim = pca.output_dim();
    }
    ReferenceBank bank = bank_from_json(
        json::parse(read_text_file(bundle / ("bank_" + name + ".json"))));
    HmmFeatureVector fv = feature_vector(forward(seq, bank));

    OvrClassifier clf = ovr_from_json(
        json::parse(read_text_file(bundle / ("svm_" + name + ".json"))));
    Vec p = predict_proba(clf, fv.v);
    pred.per_classifier[name] = p;
    all_probs.push_back(std::move(p));
  }
  auto [fused, label] = fuse(all_probs, weights);
  pred.fused = fused;
  pred.class_index = label;
  pred.class_name = index.class_names[label];
  return pred;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  std::string descriptor;
  int g = 0;
  double accuracy = 0.0;
};

// Runs a single-descriptor pipeline per (descriptor, g) pair and reports the
// test accuracy of each.
inline std::vector<SweepRow> cmd_sweep(const PipelineConfig& base_cfg,
                                       const fs::path& dataset_root,
                                       const fs::path& work_dir,
                                       const std::vector<int>& grids) {
  if (grids.empty()) throw parameter_error("sweep: empty grid list");
  std::vector<SweepRow> rows;
  for (auto desc_id : base_cfg.enabled()) {
    const std::string name = to_string(desc_id);
    for (int g : grids) {
      PipelineConfig cfg = base_cfg;
      for (auto& [n, d] : cfg.descriptors) d.enabled = (n == name);
      cfg.descriptors.at(name).g = g;
      fs::path bundle = work_dir / ("sweep_" + name + "_g" + std::to_string(g));
      cmd_extract(cfg, dataset_root, bundle);
      cmd_train(cfg, bundle);
      cmd_fuse(cfg, bundle);
      EvaluationReport rep = cmd_eval(cfg, bundle);
      rows.push_back({name, g, rep.accuracy});
    }
  }
  std::ostringstream csv;
  csv << "descriptor,g,accuracy\n" << std::setprecision(17);
  for (const auto& r : rows)
    csv << r.descriptor << "," << r.g << "," << r.accuracy << "\n";
  fs::create_directories(work_dir);
  write_text_file(work_dir / "sweep.csv", csv.str());
  return rows;
}

}  // namespace scenehmm

#endif
