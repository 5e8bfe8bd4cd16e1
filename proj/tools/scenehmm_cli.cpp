// Command line front end for the scene classification pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenehmm/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitConvergenceWarning = 4;

scenehmm::PipelineConfig load_config(const std::string& config_path,
                                     std::uint64_t seed_override,
                                     bool seed_given, int jobs) {
  scenehmm::PipelineConfig cfg;
  if (!config_path.empty()) {
    cfg = scenehmm::config_from_json(
        scenehmm::json::parse(scenehmm::read_text_file(config_path)));
  } else {
    cfg = scenehmm::default_config();
  }
  if (seed_given) cfg.seed = seed_override;
  if (jobs > 0) cfg.jobs = jobs;
  scenehmm::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HMM grid-posterior scene classification pipeline"};
  app.require_subcommand(1);

  std::string config_path, bundle = "bundle", dataset, image_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  std::vector<int> grids = {3, 5, 7};

  app.add_option("--config", config_path, "pipeline config JSON");
  app.add_option("--bundle", bundle, "model bundle directory");
  app.add_option("--seed", seed, "split/solver seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs, "worker threads for per-image stages");

  auto* extract = app.add_subcommand("extract", "encode images, fit PCA, build banks, emit HMM features");
  extract->add_option("dataset", dataset, "dataset root (class-per-folder)")->required();
  auto* train = app.add_subcommand("train", "train one-vs-rest SVMs and export training scores");
  auto* fuse_cmd = app.add_subcommand("fuse", "solve ensemble weights on training scores");
  auto* eval_cmd = app.add_subcommand("eval", "evaluate on the test split and write reports");
  auto* predict = app.add_subcommand("predict", "classify a single image");
  predict->add_option("image", image_path, "image file (pgm/png)")->required();
  auto* sweep = app.add_subcommand("sweep", "accuracy vs grid count per descriptor");
  sweep->add_option("dataset", dataset, "dataset root")->required();
  sweep->add_option("--grids", grids, "grid side counts to try");

  CLI11_PARSE(app, argc, argv);

  try {
    scenehmm::PipelineConfig cfg = load_config(config_path, seed, seed_given, jobs);
    if (extract->parsed()) {
      scenehmm::cmd_extract(cfg, dataset, bundle);
    } else if (train->parsed()) {
      auto outcome = scenehmm::cmd_train(cfg, bundle);
      if (!outcome.all_converged) {
        std::cerr << "warning: SMO iteration guard hit; best-so-far model kept\n";
        return kExitConvergenceWarning;
      }
    } else if (fuse_cmd->parsed()) {
      scenehmm::cmd_fuse(cfg, bundle);
    } else if (eval_cmd->parsed()) {
      auto report = scenehmm::cmd_eval(cfg, bundle);
      std::cout << scenehmm::report_table(report);
    } else if (predict->parsed()) {
      auto pred = scenehmm::cmd_predict(cfg, image_path, bundle);
      std::cout << pred.class_name << "\n";
      for (std::size_t k = 0; k < pred.fused.size(); ++k)
        std::cout << "  p(class " << k << ") = " << pred.fused[k] << "\n";
    } else if (sweep->parsed()) {
      auto rows = scenehmm::cmd_sweep(cfg, dataset, bundle, grids);
      for (const auto& r : rows)
        std::cout << r.descriptor << " g=" << r.g
                  << " accuracy=" << r.accuracy << "\n";
      std::cout << "wrote " << (std::filesystem::path(bundle) / "sweep.csv").string()
                << "\n";
    }
  } catch (const scenehmm::parameter_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const scenehmm::format_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const scenehmm::error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const scenehmm::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}
