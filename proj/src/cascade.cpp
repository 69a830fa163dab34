// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/cascade.hpp"

#include <filesystem>
#include <fstream>

namespace tddnet {

namespace {

char class_letter(ChannelClass cls) {
  return static_cast<char>('A' + static_cast<int>(cls));
}

}  // namespace

MlpSpec classifier_spec(int n_pilots) {
  MlpSpec spec;
  spec.layer_dims = {2 * n_pilots, 22, 22, kNumChannelClasses};
  spec.activations = {Activation::tanh_fn, Activation::sigmoid,
                      Activation::softmax};
  return spec;
}

MlpSpec predictor_spec(int n_pilots, int n_subcarriers) {
  MlpSpec spec;
  spec.layer_dims = {2 * n_pilots, 512, 128, 2 * n_subcarriers};
  spec.activations = {Activation::tanh_fn, Activation::tanh_fn,
                      Activation::linear};
  return spec;
}

void TddnetModel::validate() const {
  const int in_dim = 2 * grid.num_pilots();
  if (classifier.spec != classifier_spec(grid.num_pilots())) {
    throw std::invalid_argument("classifier spec does not match grid");
  }
  for (const MlpModel& p : predictors) {
    if (p.spec.layer_dims.empty() || p.spec.input_dim() != in_dim ||
        p.spec.output_dim() != 2 * n_subcarriers) {
      throw std::invalid_argument("predictor spec does not match grid");
    }
  }
}

ClassifyResult classify(const TddnetModel& model, const PilotCsi& pilot_csi) {
  if (static_cast<int>(pilot_csi.values.size()) != model.grid.num_pilots()) {
    throw std::invalid_argument("pilot CSI does not match model grid");
  }
  ClassifyResult res;
  res.probs = model.classifier.forward(
      flatten_csi(pilot_csi.values).cast<float>().eval());
  Eigen::Index best = 0;
  res.probs.maxCoeff(&best);  // first maximum: ties go to the lowest index
  res.cls = static_cast<ChannelClass>(best);
  return res;
}

PredictResult predict_downlink(const TddnetModel& model,
                               const PilotCsi& pilot_csi, ClassifierMode mode,
                               std::optional<ChannelClass> true_class) {
  ChannelClass routed;
  if (mode == ClassifierMode::oracle) {
    if (!true_class) {
      throw std::invalid_argument("oracle mode needs the true class");
    }
    routed = *true_class;
  } else {
    routed = classify(model, pilot_csi).cls;
  }

  const MlpModel& predictor =
      model.predictors[static_cast<std::size_t>(routed)];
  if (predictor.weights.empty()) {
    throw std::invalid_argument("predictor for class " + to_string(routed) +
                                " is untrained");
  }
  const Eigen::VectorXf out = predictor.forward(
      flatten_csi(pilot_csi.values).cast<float>().eval());

  const auto values = unflatten_csi(out.cast<double>().eval());
  PredictResult res;
  res.used = routed;
  res.dl = Eigen::Map<const Eigen::VectorXcd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  return res;
}

std::uint64_t model_seed(std::uint64_t master_seed, int model_idx,
                         std::uint64_t variant) {
  return derive_seed(master_seed, StreamPurpose::weight_init,
                     StreamDomain::none, variant,
                     static_cast<std::uint64_t>(model_idx));
}

MlpModel train_predictor(const ExperimentConfig& cfg, const Dataset& data,
                         ChannelClass cls, std::uint64_t seed_variant,
                         TrainLog* log) {
  if (data.count() == 0) throw std::invalid_argument("empty dataset");
  if (data.cls != cls) {
    throw std::invalid_argument("dataset class does not match predictor");
  }
  const MlpSpec spec = predictor_spec(static_cast<int>(data.n_pilots),
                                      static_cast<int>(data.n_subcarriers));

  TrainConfig tc = cfg.train;
  tc.validation_fraction = cfg.validation_fraction();
  tc.seed = model_seed(cfg.master_seed, 1 + static_cast<int>(cls), seed_variant);
  return train(spec, data.inputs, data.targets, LossKind::mse, tc, log);
}

MlpModel train_classifier(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          TrainLog* log) {
  if (per_class.empty()) throw std::invalid_argument("no classifier data");

  Eigen::Index n_pilots2 = -1;
  Eigen::Index n_train = 0, n_val = 0;
  for (const auto& [cls, ds] : per_class) {
    if (ds.count() == 0) {
      throw std::invalid_argument("empty dataset for class " + to_string(cls));
    }
    if (n_pilots2 < 0) n_pilots2 = ds.inputs.rows();
    if (ds.inputs.rows() != n_pilots2) {
      throw std::invalid_argument("inconsistent pilot counts across classes");
    }
    const Eigen::Index take =
        std::min<Eigen::Index>(ds.count(), cfg.classifier_per_class);
    n_train += take;
    n_val += std::min<Eigen::Index>(ds.count() - take,
                                    cfg.classifier_val_per_class);
  }

  Eigen::MatrixXf inputs(n_pilots2, n_train);
  Eigen::MatrixXf labels = Eigen::MatrixXf::Zero(kNumChannelClasses, n_train);
  Eigen::MatrixXf val_inputs(n_pilots2, n_val);
  Eigen::MatrixXf val_labels = Eigen::MatrixXf::Zero(kNumChannelClasses, n_val);
  Eigen::Index col = 0, val_col = 0;
  for (const auto& [cls, ds] : per_class) {
    const Eigen::Index take =
        std::min<Eigen::Index>(ds.count(), cfg.classifier_per_class);
    inputs.middleCols(col, take) = ds.inputs.leftCols(take);
    labels.row(static_cast<int>(cls)).segment(col, take).setOnes();
    col += take;

    const Eigen::Index val_take = std::min<Eigen::Index>(
        ds.count() - take, cfg.classifier_val_per_class);
    if (val_take > 0) {
      val_inputs.middleCols(val_col, val_take) = ds.inputs.rightCols(val_take);
      val_labels.row(static_cast<int>(cls)).segment(val_col, val_take)
          .setOnes();
      val_col += val_take;
    }
  }

  const MlpSpec spec = classifier_spec(static_cast<int>(n_pilots2 / 2));
  TrainConfig tc = cfg.classifier_train;
  tc.validation_fraction = cfg.validation_fraction();

  MlpModel best;
  TrainLog best_log;
  for (int r = 0; r < cfg.classifier_restarts; ++r) {
    tc.seed = model_seed(cfg.master_seed, 0, static_cast<std::uint64_t>(r));
    TrainLog rl;
    // Datasets sized beyond classifier_per_class supply the surplus as a
    // validation set shared across restarts; otherwise each restart splits
    // internally.
    const MlpModel m =
        n_val > 0 ? train(spec, inputs, labels, val_inputs, val_labels,
                          LossKind::cross_entropy, tc, &rl)
                  : train(spec, inputs, labels, LossKind::cross_entropy, tc,
                          &rl);
    if (r == 0 || rl.best_val_loss < best_log.best_val_loss) {
      best = m;
      best_log = rl;
    }
  }
  if (log != nullptr) *log = best_log;
  return best;
}

TddnetModel train_cascade(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          const std::map<ChannelClass, Dataset>& classifier_data,
                          CascadeLogs* logs) {
  for (ChannelClass cls : kChannelClasses) {
    const auto it = per_class.find(cls);
    if (it == per_class.end() || it->second.count() == 0) {
      throw std::invalid_argument("missing dataset for class " +
                                  to_string(cls));
    }
  }

  TddnetModel model;
  model.grid = cfg.grid();
  model.n_subcarriers = cfg.n_subcarriers;
  model.classifier = train_classifier(cfg, classifier_data,
                                      logs ? &logs->classifier : nullptr);
  for (ChannelClass cls : kChannelClasses) {
    TrainLog* log = logs ? &logs->predictors[cls] : nullptr;
    model.predictors[static_cast<std::size_t>(cls)] =
        train_predictor(cfg, per_class.at(cls), cls, 0, log);
  }
  model.validate();
  return model;
}

TddnetModel train_cascade(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          CascadeLogs* logs) {
  return train_cascade(cfg, per_class, per_class, logs);
}

void save_cascade(const TddnetModel& model, const std::string& dir,
                  const ExperimentConfig& cfg) {
  model.validate();
  std::filesystem::create_directories(dir);
  save_model(model.classifier, dir + "/classifier.mdl");
  for (ChannelClass cls : kChannelClasses) {
    save_model(model.predictors[static_cast<std::size_t>(cls)],
               dir + "/predictor_" + class_letter(cls) + ".mdl");
  }

  std::ofstream out(dir + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest: " + dir);
  out << "n_subcarriers = " << model.n_subcarriers << '\n'
      << "pilot_spacing = " << model.grid.spacing << '\n'
      << "n_pilots = " << model.grid.num_pilots() << '\n'
      << "flatten_layout = " << kFlattenLayoutId << '\n'
      << "master_seed = " << cfg.master_seed << '\n'
      << "config_hash = " << config_hash(cfg) << '\n';
  if (!out) throw std::runtime_error("manifest write failed: " + dir);
}

TddnetModel load_cascade(const std::string& dir) {
  std::ifstream in(dir + "/manifest.txt");
  if (!in) throw std::runtime_error("cannot open manifest in " + dir);
  int n_subcarriers = -1, spacing = -1, n_pilots = -1, layout = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, line.find(' '));
    const std::string value = line.substr(eq + 1);
    if (key == "n_subcarriers") n_subcarriers = std::stoi(value);
    if (key == "pilot_spacing") spacing = std::stoi(value);
    if (key == "n_pilots") n_pilots = std::stoi(value);
    if (key == "flatten_layout") layout = std::stoi(value);
  }
  if (n_subcarriers < 1 || spacing < 1) {
    throw std::runtime_error("manifest incomplete in " + dir);
  }
  if (layout != kFlattenLayoutId) {
    throw std::runtime_error("bundle uses unknown flatten layout: " + dir);
  }

  TddnetModel model;
  model.n_subcarriers = n_subcarriers;
  model.grid = make_pilot_grid(n_subcarriers, spacing);
  if (n_pilots != model.grid.num_pilots()) {
    throw std::runtime_error("manifest pilot count inconsistent: " + dir);
  }
  model.classifier = load_model(dir + "/classifier.mdl");
  for (ChannelClass cls : kChannelClasses) {
    model.predictors[static_cast<std::size_t>(cls)] =
        load_model(dir + "/predictor_" + class_letter(cls) + ".mdl");
  }
  model.validate();
  return model;
}

}  // namespace tddnet
