// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "tddnet/cascade.hpp"
#include "testutil.hpp"

using namespace tddnet;
using testutil::TempDir;
using testutil::tiny_config;

namespace {

TddnetModel zeros_model(int n = 64, int spacing = 8) {
  TddnetModel m;
  m.grid = make_pilot_grid(n, spacing);
  m.n_subcarriers = n;
  const int n_p = m.grid.num_pilots();
  m.classifier = MlpModel::zeros(classifier_spec(n_p));
  for (auto& p : m.predictors) {
    p = MlpModel::zeros(predictor_spec(n_p, n));
  }
  return m;
}

PilotCsi random_csi(int n_pilots, RandomStream& rng, double snr_db = 20.0) {
  PilotCsi csi;
  csi.snr_db = snr_db;
  for (int i = 0; i < n_pilots; ++i) csi.values.push_back(rng.complex_normal());
  return csi;
}

bool cascades_equal(const TddnetModel& a, const TddnetModel& b) {
  if (a.n_subcarriers != b.n_subcarriers) return false;
  if (a.grid.indices != b.grid.indices) return false;
  if (!testutil::models_bitwise_equal(a.classifier, b.classifier)) return false;
  for (std::size_t i = 0; i < a.predictors.size(); ++i) {
    if (!testutil::models_bitwise_equal(a.predictors[i], b.predictors[i])) {
      return false;
    }
  }
  return true;
}

std::map<ChannelClass, Dataset> tiny_training_data(
    const ExperimentConfig& cfg) {
  const SampleGenerator gen(cfg, 0);
  std::map<ChannelClass, Dataset> per_class;
  for (ChannelClass cls : kChannelClasses) {
    per_class[cls] =
        make_dataset(gen, cls, cfg.train_per_class + cfg.val_per_class,
                     std::nullopt, StreamDomain::train);
  }
  return per_class;
}

}  // namespace

TEST_CASE("network shapes") {
  const MlpSpec c = classifier_spec(11);
  CHECK(c.layer_dims == std::vector<int>{22, 22, 22, 5});
  CHECK(c.activations == std::vector<Activation>{Activation::tanh_fn,
                                                 Activation::sigmoid,
                                                 Activation::softmax});
  const MlpSpec p = predictor_spec(11, 256);
  CHECK(p.layer_dims == std::vector<int>{22, 512, 128, 512});
  CHECK(p.activations == std::vector<Activation>{
                             Activation::tanh_fn, Activation::tanh_fn,
                             Activation::linear});
  CHECK_NOTHROW(c.validate());
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("model validation catches shape mismatches") {
  TddnetModel ok = zeros_model();
  CHECK_NOTHROW(ok.validate());

  TddnetModel bad_cls = zeros_model();
  bad_cls.classifier = MlpModel::zeros(classifier_spec(5));
  CHECK_THROWS(bad_cls.validate());

  TddnetModel bad_pred = zeros_model();
  bad_pred.predictors[2] = MlpModel::zeros(predictor_spec(8, 32));
  CHECK_THROWS(bad_pred.validate());
}

TEST_CASE("classification ties resolve to the lowest class index") {
  const TddnetModel model = zeros_model();  // softmax of zeros: all 0.2
  RandomStream rng(70);
  const PilotCsi csi = random_csi(model.grid.num_pilots(), rng);
  const ClassifyResult res = classify(model, csi);
  CHECK(res.cls == ChannelClass::TDL_A);
  REQUIRE(res.probs.size() == 5);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    CHECK(res.probs(i) == doctest::Approx(0.2));
    sum += res.probs(i);
  }
  CHECK(sum == doctest::Approx(1.0));

  PilotCsi wrong = csi;
  wrong.values.pop_back();
  CHECK_THROWS(classify(model, wrong));
}

TEST_CASE("a biased classifier routes to its favored predictor") {
  TddnetModel model = zeros_model();
  model.classifier.biases[2](3) = 10.0f;  // logits favor class 3
  // Give the routed predictor a recognizable constant output.
  const int n = model.n_subcarriers;
  for (int k = 0; k < 2 * n; ++k) {
    model.predictors[3].biases[2](k) = 0.01f * static_cast<float>(k);
  }
  RandomStream rng(71);
  const PilotCsi csi = random_csi(model.grid.num_pilots(), rng);
  CHECK(classify(model, csi).cls == ChannelClass::TDL_D);

  const PredictResult res =
      predict_downlink(model, csi, ClassifierMode::learned);
  CHECK(res.used == ChannelClass::TDL_D);
  REQUIRE(res.dl.size() == n);
  // Output is unflatten(bias): real block first, then the imaginary block.
  for (int m : {0, 1, n - 1}) {
    CHECK(res.dl(m).real() == doctest::Approx(0.01 * m).epsilon(1e-5));
    CHECK(res.dl(m).imag() == doctest::Approx(0.01 * (m + n)).epsilon(1e-5));
  }
}

TEST_CASE("oracle routing ignores the classifier entirely") {
  RandomStream rng(72);
  TddnetModel a = zeros_model();
  TddnetModel b = zeros_model();
  RandomStream init(73);
  b.classifier = MlpModel::glorot(classifier_spec(b.grid.num_pilots()), init);
  for (auto* m : {&a, &b}) {
    RandomStream pred_init(74);
    for (auto& p : m->predictors) {
      p = MlpModel::glorot(predictor_spec(m->grid.num_pilots(),
                                          m->n_subcarriers),
                           pred_init);
    }
  }

  const PilotCsi csi = random_csi(a.grid.num_pilots(), rng);
  for (ChannelClass cls : kChannelClasses) {
    const PredictResult ra =
        predict_downlink(a, csi, ClassifierMode::oracle, cls);
    const PredictResult rb =
        predict_downlink(b, csi, ClassifierMode::oracle, cls);
    CHECK(ra.used == cls);
    CHECK(rb.used == cls);
    CHECK((ra.dl - rb.dl).cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK_THROWS(predict_downlink(a, csi, ClassifierMode::oracle));  // no class
}

TEST_CASE("an untrained predictor is reported, not silently used") {
  TddnetModel model = zeros_model();
  model.predictors[1] = MlpModel{};  // no layers
  RandomStream rng(75);
  const PilotCsi csi = random_csi(model.grid.num_pilots(), rng);
  CHECK_THROWS(predict_downlink(model, csi, ClassifierMode::oracle,
                                ChannelClass::TDL_B));
}

TEST_CASE("model seeds are stable and pairwise distinct") {
  std::set<std::uint64_t> seen;
  for (int idx = 0; idx < 6; ++idx) {
    for (std::uint64_t variant = 0; variant < 4; ++variant) {
      const std::uint64_t s = model_seed(7, idx, variant);
      CHECK(s == model_seed(7, idx, variant));
      CHECK(seen.insert(s).second);
    }
  }
  CHECK(model_seed(8, 0, 0) != model_seed(7, 0, 0));
}

TEST_CASE("training rejects bad data") {
  const ExperimentConfig cfg = tiny_config();
  const SampleGenerator gen(cfg, 0);
  Dataset empty;
  CHECK_THROWS(train_predictor(cfg, empty, ChannelClass::TDL_A));

  const Dataset b =
      make_dataset(gen, ChannelClass::TDL_B, 8, 20.0, StreamDomain::train);
  CHECK_THROWS(train_predictor(cfg, b, ChannelClass::TDL_A));  // class mismatch

  std::map<ChannelClass, Dataset> none;
  CHECK_THROWS(train_classifier(cfg, none));

  std::map<ChannelClass, Dataset> partial;
  partial[ChannelClass::TDL_B] = b;
  CHECK_THROWS(train_cascade(cfg, partial));  // missing classes
}

TEST_CASE("cascade training is deterministic end to end") {
  const ExperimentConfig cfg = tiny_config();
  const auto per_class = tiny_training_data(cfg);

  CascadeLogs logs;
  const TddnetModel first = train_cascade(cfg, per_class, &logs);
  CHECK_FALSE(logs.classifier.epochs.empty());
  CHECK(logs.predictors.size() == 5);
  CHECK(first.grid.spacing == cfg.pilot_spacing);

  const TddnetModel second = train_cascade(cfg, per_class);
  CHECK(cascades_equal(first, second));

  SUBCASE("bundle round-trip is bitwise faithful") {
    TempDir tmp("cascade");
    const std::string dir = tmp.file("bundle");
    save_cascade(first, dir, cfg);
    for (const char* name :
         {"classifier.mdl", "predictor_A.mdl", "predictor_B.mdl",
          "predictor_C.mdl", "predictor_D.mdl", "predictor_E.mdl",
          "manifest.txt"}) {
      CHECK(std::filesystem::exists(dir + "/" + name));
    }
    const TddnetModel back = load_cascade(dir);
    CHECK(cascades_equal(first, back));

    // The loaded model predicts, and its outputs match the original's.
    const SampleGenerator gen(cfg, 0);
    const EvalSample s = gen.gen_eval(ChannelClass::TDL_C, 20.0,
                                      StreamDomain::test, 0);
    const PredictResult ra = predict_downlink(first, s.pilot_csi,
                                              ClassifierMode::learned);
    const PredictResult rb = predict_downlink(back, s.pilot_csi,
                                              ClassifierMode::learned);
    CHECK(ra.used == rb.used);
    CHECK((ra.dl - rb.dl).cwiseAbs().maxCoeff() == 0.0);

    SUBCASE("a missing predictor file fails the load") {
      std::filesystem::remove(dir + "/predictor_C.mdl");
      CHECK_THROWS(load_cascade(dir));
    }
  }
}

TEST_CASE("bundle manifests are validated") {
  TempDir tmp("manifest");
  const std::string dir = tmp.file("bundle");
  std::filesystem::create_directories(dir);

  SUBCASE("missing manifest") { CHECK_THROWS(load_cascade(dir)); }

  auto write_manifest = [&](const std::string& body) {
    std::ofstream out(dir + "/manifest.txt");
    out << body;
  };

  SUBCASE("incomplete manifest") {
    write_manifest("pilot_spacing = 8\n");
    CHECK_THROWS_WITH_AS(load_cascade(dir), doctest::Contains("incomplete"),
                         std::runtime_error);
  }

  SUBCASE("unknown flatten layout") {
    write_manifest(
        "n_subcarriers = 64\npilot_spacing = 8\nn_pilots = 8\n"
        "flatten_layout = 7\n");
    CHECK_THROWS_WITH_AS(load_cascade(dir), doctest::Contains("layout"),
                         std::runtime_error);
  }

  SUBCASE("inconsistent pilot count") {
    write_manifest(
        "n_subcarriers = 64\npilot_spacing = 8\nn_pilots = 99\n"
        "flatten_layout = 0\n");
    CHECK_THROWS_WITH_AS(load_cascade(dir),
                         doctest::Contains("pilot count"), std::runtime_error);
  }
}

TEST_CASE("a properly trained classifier separates the classes cleanly") {
  // Headline geometry (11 pilots over the full band), moderate data budget;
  // trained with the production recipe on its mixed-SNR datasets and
  // evaluated on noiseless test-domain pilots.
  ExperimentConfig cfg;
  cfg.classifier_per_class = 3600;
  cfg.classifier_val_per_class = 400;
  cfg.test_per_class = 200;
  cfg.master_seed = 7;
  cfg.validate();

  const SampleGenerator gen(cfg, 0);
  std::map<ChannelClass, Dataset> per_class;
  for (ChannelClass cls : kChannelClasses) {
    per_class[cls] = make_classifier_dataset(gen, cls);
  }
  TddnetModel model;
  model.grid = cfg.grid();
  model.n_subcarriers = cfg.n_subcarriers;
  model.classifier = train_classifier(cfg, per_class);

  int correct = 0, total = 0;
  for (ChannelClass cls : kChannelClasses) {
    for (int i = 0; i < cfg.test_per_class; ++i) {
      const EvalSample s =
          gen.gen_eval(cls, kNoNoiseSnrDb, StreamDomain::test, i);
      correct += classify(model, s.pilot_csi).cls == cls;
      ++total;
    }
  }
  const double acc = static_cast<double>(correct) / total;
  MESSAGE("noiseless classifier accuracy: ", acc, " (", correct, "/", total,
          ")");
  CHECK(total == 1000);
  CHECK(acc >= 0.93);
}
