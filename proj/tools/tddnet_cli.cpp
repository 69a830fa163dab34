// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

// Command-line front end: dataset generation, training entry points and the
// four evaluation sweeps, all reproducible from (config file, master seed).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tddnet/baselines.hpp"
#include "tddnet/cascade.hpp"
#include "tddnet/config.hpp"
#include "tddnet/dataset.hpp"
#include "tddnet/sweeps.hpp"

namespace {

using namespace tddnet;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // key=value
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file");
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--set", opts.overrides,
                  "config override key=value (repeatable)");
  cmd->add_flag("--verbose", opts.verbose, "per-epoch training progress");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    }
    apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) cfg.master_seed = *opts.seed;
  cfg.train.verbose = opts.verbose;
  cfg.validate();
  return cfg;
}

/// Per-class training datasets: loaded from --data files when given,
/// generated in memory otherwise (bit-identical either way).
std::map<ChannelClass, Dataset> training_data(const ExperimentConfig& cfg,
                                              const std::string& data_dir) {
  std::map<ChannelClass, Dataset> per_class;
  if (!data_dir.empty()) {
    for (ChannelClass cls : cfg.classes) {
      const std::string path = data_dir + "/train_" + to_string(cls) + ".tdds";
      per_class.emplace(cls, load_dataset(path));
    }
    return per_class;
  }
  const SampleGenerator gen(cfg, 0);
  for (ChannelClass cls : cfg.classes) {
    std::fprintf(stderr, "generating %d training samples for %s\n",
                 cfg.train_per_class + cfg.val_per_class,
                 to_string(cls).c_str());
    per_class.emplace(cls,
                      make_dataset(gen, cls,
                                   cfg.train_per_class + cfg.val_per_class,
                                   std::nullopt, StreamDomain::train));
  }
  return per_class;
}

/// SNR-mixed classifier datasets: `classifier_<CLASS>.tdds` when the data
/// dir has them (gen-data writes both file sets), generated otherwise.
/// Falls back to the predictor files for hand-built directories.
std::map<ChannelClass, Dataset> classifier_data(const ExperimentConfig& cfg,
                                                const std::string& data_dir) {
  std::map<ChannelClass, Dataset> per_class;
  if (!data_dir.empty()) {
    for (ChannelClass cls : cfg.classes) {
      const std::string path =
          data_dir + "/classifier_" + to_string(cls) + ".tdds";
      per_class.emplace(cls, std::filesystem::exists(path)
                                 ? load_dataset(path)
                                 : load_dataset(data_dir + "/train_" +
                                                to_string(cls) + ".tdds"));
    }
    return per_class;
  }
  const SampleGenerator gen(cfg, 0);
  for (ChannelClass cls : cfg.classes) {
    std::fprintf(stderr, "generating %d classifier samples for %s\n",
                 cfg.classifier_per_class + cfg.classifier_val_per_class,
                 to_string(cls).c_str());
    per_class.emplace(cls, make_classifier_dataset(gen, cls));
  }
  return per_class;
}

std::vector<double> eval_grid(const ExperimentConfig& cfg, bool no_noise) {
  if (no_noise) return {kNoNoiseSnrDb};
  return cfg.snr_grid_db;
}

void write_sweep(const SweepResult& result, const std::string& out_dir,
                 const std::string& name) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + name;
  result.write_csv(path);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), result.rows.size());
}

int cmd_gen_data(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto written = cfg.m_aps * cfg.k_ues > 1
                           ? gen_multilink(cfg, opts.out_dir)
                           : gen_dataset(cfg, 0, opts.out_dir);
  for (const std::string& path : written) {
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int cmd_train_classifier(const CommonOpts& opts, const std::string& data_dir) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto per_class = classifier_data(cfg, data_dir);
  TrainLog log;
  const MlpModel classifier = train_classifier(cfg, per_class, &log);
  std::filesystem::create_directories(opts.out_dir);
  save_model(classifier, opts.out_dir + "/classifier.mdl");
  std::printf("classifier: best val loss %.6g at epoch %d -> %s\n",
              log.best_val_loss, log.best_epoch,
              (opts.out_dir + "/classifier.mdl").c_str());
  return 0;
}

int cmd_train_predictor(const CommonOpts& opts, const std::string& data_dir,
                        const std::string& class_name) {
  const ExperimentConfig cfg = resolve_config(opts);
  const ChannelClass cls = channel_class_from_string(class_name);
  Dataset data;
  if (!data_dir.empty()) {
    data = load_dataset(data_dir + "/train_" + to_string(cls) + ".tdds");
  } else {
    const SampleGenerator gen(cfg, 0);
    data = make_dataset(gen, cls, cfg.train_per_class + cfg.val_per_class,
                        std::nullopt, StreamDomain::train);
  }
  TrainLog log;
  const MlpModel predictor = train_predictor(cfg, data, cls, 0, &log);
  std::filesystem::create_directories(opts.out_dir);
  const std::string path = opts.out_dir + "/predictor_" +
                           std::string(1, "ABCDE"[static_cast<int>(cls)]) +
                           ".mdl";
  save_model(predictor, path);
  std::printf("%s predictor: best val loss %.6g at epoch %d -> %s\n",
              to_string(cls).c_str(), log.best_val_loss, log.best_epoch,
              path.c_str());
  return 0;
}

int cmd_train_all(const CommonOpts& opts, const std::string& data_dir) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto per_class = training_data(cfg, data_dir);
  CascadeLogs logs;
  const TddnetModel model =
      train_cascade(cfg, per_class, classifier_data(cfg, data_dir), &logs);
  save_cascade(model, opts.out_dir, cfg);

  std::ofstream log_out(opts.out_dir + "/train_logs.txt");
  log_out << "== classifier ==\n" << logs.classifier.to_string();
  for (const auto& [cls, log] : logs.predictors) {
    log_out << "== predictor " << to_string(cls) << " ==\n" << log.to_string();
  }
  std::printf("cascade bundle -> %s\n", opts.out_dir.c_str());
  return 0;
}

int cmd_eval_accuracy(const CommonOpts& opts, const std::string& model_dir,
                      bool no_noise) {
  const ExperimentConfig cfg = resolve_config(opts);
  const TddnetModel model = load_cascade(model_dir);
  const SweepResult result =
      run_accuracy_sweep(model, cfg, eval_grid(cfg, no_noise));
  write_sweep(result, opts.out_dir, "accuracy.csv");
  return 0;
}

int cmd_eval_mse(const CommonOpts& opts, const std::string& model_dir,
                 bool no_noise, bool oracle_classifier) {
  const ExperimentConfig cfg = resolve_config(opts);
  const TddnetModel model = load_cascade(model_dir);
  const SweepResult result =
      run_mse_sweep(model, cfg, eval_grid(cfg, no_noise), oracle_classifier);
  write_sweep(result, opts.out_dir, "mse.csv");
  return 0;
}

int cmd_eval_pilot_sweep(const CommonOpts& opts,
                         const std::vector<int>& spacings,
                         const std::string& class_name, double snr_db) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SweepResult result = run_pilot_sweep(
      cfg, spacings, channel_class_from_string(class_name), snr_db);
  write_sweep(result, opts.out_dir, "pilot_sweep.csv");
  return 0;
}

int cmd_eval_mismatch(const CommonOpts& opts, const std::string& model_dir) {
  const ExperimentConfig cfg = resolve_config(opts);
  const TddnetModel model = load_cascade(model_dir);
  const SweepResult result = run_mismatch(model, cfg, cfg.snr_grid_db);
  write_sweep(result, opts.out_dir, "mismatch.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse-uplink-pilot downlink CSI benchmark: TDL channel simulator, "
      "cascaded classifier/predictor networks, and classical baselines"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string data_dir;
  std::string model_dir;
  std::string class_name = "TDL_C";
  std::vector<int> spacings = {8, 16, 24, 32};
  double snr_db = 22.0;
  bool no_noise = false;
  bool oracle_classifier = false;

  auto* gen_data = app.add_subcommand("gen-data", "write training datasets");
  add_common(gen_data, opts);

  auto* train_cls =
      app.add_subcommand("train-classifier", "train the channel classifier");
  add_common(train_cls, opts);
  train_cls->add_option("--data", data_dir, "read datasets from gen-data");

  auto* train_pred = app.add_subcommand("train-predictor",
                                        "train one per-class predictor");
  add_common(train_pred, opts);
  train_pred->add_option("--data", data_dir, "read datasets from gen-data");
  train_pred->add_option("--class", class_name, "channel class")->required();

  auto* train_all =
      app.add_subcommand("train-all", "train the full cascade bundle");
  add_common(train_all, opts);
  train_all->add_option("--data", data_dir, "read datasets from gen-data");

  auto* eval_acc =
      app.add_subcommand("eval-accuracy", "classifier accuracy vs SNR");
  add_common(eval_acc, opts);
  eval_acc->add_option("--model", model_dir, "cascade bundle dir")->required();
  eval_acc->add_flag("--no-noise", no_noise, "evaluate without pilot noise");

  auto* eval_mse =
      app.add_subcommand("eval-mse", "prediction error vs SNR per class");
  add_common(eval_mse, opts);
  eval_mse->add_option("--model", model_dir, "cascade bundle dir")->required();
  eval_mse->add_flag("--no-noise", no_noise, "evaluate without pilot noise");
  eval_mse->add_flag("--oracle-classifier", oracle_classifier,
                     "report oracle-routed rows only");

  auto* eval_pilot = app.add_subcommand(
      "eval-pilot-sweep", "prediction error vs pilot spacing (retrains)");
  add_common(eval_pilot, opts);
  eval_pilot->add_option("--spacings", spacings, "pilot spacings to sweep")
      ->delimiter(',');
  eval_pilot->add_option("--class", class_name, "channel class");
  eval_pilot->add_option("--snr", snr_db, "evaluation SNR in dB");

  auto* eval_mis = app.add_subcommand(
      "eval-mismatch", "matched predictor vs the TDL-A predictor");
  add_common(eval_mis, opts);
  eval_mis->add_option("--model", model_dir, "cascade bundle dir")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_data->parsed()) return cmd_gen_data(opts);
    if (train_cls->parsed()) return cmd_train_classifier(opts, data_dir);
    if (train_pred->parsed())
      return cmd_train_predictor(opts, data_dir, class_name);
    if (train_all->parsed()) return cmd_train_all(opts, data_dir);
    if (eval_acc->parsed()) return cmd_eval_accuracy(opts, model_dir, no_noise);
    if (eval_mse->parsed())
      return cmd_eval_mse(opts, model_dir, no_noise, oracle_classifier);
    if (eval_pilot->parsed())
      return cmd_eval_pilot_sweep(opts, spacings, class_name, snr_db);
    if (eval_mis->parsed()) return cmd_eval_mismatch(opts, model_dir);
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "error: %s\n%s", e.what(), e.log().c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
