// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_DATASET_HPP
#define TDDNET_DATASET_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tddnet/airlink.hpp"
#include "tddnet/chanmodel.hpp"
#include "tddnet/config.hpp"
#include "tddnet/rffront.hpp"

namespace tddnet {

/// One supervised pair: flattened noisy uplink pilot LS estimates in, the
/// flattened noiseless true downlink channel out.
struct LinkSample {
  Eigen::VectorXf input;   // 2 * N_p
  Eigen::VectorXf target;  // 2 * N
  ChannelClass cls;
  float snr_db = 0.0f;
  std::uint64_t link_id = 0;
};

/// The same sample before flattening, in full precision, as the evaluation
/// sweeps consume it (baselines need the complex pilot estimates, metrics
/// need the complex truth).
struct EvalSample {
  PilotCsi pilot_csi;          // noisy UL LS estimates
  FrequencyResponse dl_truth;  // noiseless true DL effective channel
  ChannelClass cls;
  double snr_db = 0.0;
};

/// Per-link deterministic sample factory.  Holds the link's frozen RF
/// chains and per-class PDPs; every sample is addressed by
/// (class, SNR policy, stream domain, index) and is reproducible from the
/// config's master seed alone.  Uplink sounding and the downlink target are
/// separated by the configured TDD turnaround via channel evolution.
class SampleGenerator {
 public:
  SampleGenerator(const ExperimentConfig& cfg, std::uint64_t link_id);

  const ExperimentConfig& config() const { return cfg_; }
  const RfChainSet& chains() const { return chains_; }
  const PilotGrid& grid() const { return grid_; }
  const PowerDelayProfile& pdp(ChannelClass cls) const;
  std::uint64_t link_id() const { return link_id_; }

  /// snr_db == nullopt draws the sample's SNR uniformly from the config's
  /// training range (the training-SNR policy).
  EvalSample gen_eval(ChannelClass cls, std::optional<double> snr_db,
                      StreamDomain domain, std::uint64_t index) const;

  LinkSample gen(ChannelClass cls, std::optional<double> snr_db,
                 StreamDomain domain, std::uint64_t index) const;

 private:
  ExperimentConfig cfg_;
  std::uint64_t link_id_;
  PilotGrid grid_;
  DopplerSpec doppler_;
  std::map<ChannelClass, PowerDelayProfile> pdps_;
  RfChainSet chains_;
};

/// A stored per-class sample collection, column-per-sample.
struct Dataset {
  std::uint32_t n_subcarriers = 0;
  std::uint32_t n_pilots = 0;
  std::uint8_t flatten_layout = kFlattenLayoutId;
  ChannelClass cls = ChannelClass::TDL_A;
  StreamDomain domain = StreamDomain::train;
  std::uint64_t master_seed = 0;
  Eigen::MatrixXf inputs;   // 2*N_p x count
  Eigen::MatrixXf targets;  // 2*N   x count
  Eigen::VectorXf snr_db;   // count

  Eigen::Index count() const { return inputs.cols(); }
};

/// Generates `count` samples of one class with the training-SNR policy
/// (snr_db == nullopt) or at a fixed SNR.
Dataset make_dataset(const SampleGenerator& gen, ChannelClass cls, int count,
                     std::optional<double> snr_db, StreamDomain domain,
                     std::uint64_t index_offset = 0);

/// Classifier training material for one class, assembled per the config's
/// SNR mix (classifier_fixed_snrs_db / fractions, remainder on the policy):
/// classifier_per_class training columns first, then classifier_val_per_class
/// validation columns with the same mix.
Dataset make_classifier_dataset(const SampleGenerator& gen, ChannelClass cls);

/// Binary round-trip: magic "TDDS", version u16, N u32, N_p u32, flatten
/// layout u8, class u8, count u32, stream-domain tag u8, master seed u64,
/// then per sample (input || target || snr_db) as little-endian f32.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Writes one link's training files under out_dir: per-class
/// `train_<CLASS>.tdds` of (train + val) predictor samples and
/// `classifier_<CLASS>.tdds` of SNR-mixed classifier samples, the RF chain
/// sidecar `link<ID>.chains`, and the canonical config as `config.txt`.
/// Returns the written paths.
std::vector<std::string> gen_dataset(const ExperimentConfig& cfg,
                                     std::uint64_t link_id,
                                     const std::string& out_dir);

/// Multi-link batch: m_aps * k_ues independent links, each generated like
/// gen_dataset into out_dir/link<ID>.  With M = K = 1 this produces exactly
/// the single-link layout of gen_dataset.
std::vector<std::string> gen_multilink(const ExperimentConfig& cfg,
                                       const std::string& out_dir);

}  // namespace tddnet

#endif  // TDDNET_DATASET_HPP
