// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/dataset.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace tddnet {

SampleGenerator::SampleGenerator(const ExperimentConfig& cfg,
                                 std::uint64_t link_id)
    : cfg_(cfg),
      link_id_(link_id),
      grid_(cfg.grid()),
      doppler_(cfg.doppler()) {
  cfg_.validate();
  for (ChannelClass cls : cfg_.classes) {
    pdps_.emplace(cls, load_pdp(cls, cfg_.delay_spread_s));
  }
  // Chains live in the domain-free stream: one frozen draw per link that
  // training and test data share, as a real link's hardware would.
  RandomStream rf_rng(cfg_.master_seed, StreamPurpose::rf_chain,
                      StreamDomain::none, link_id_, 0);
  chains_ = gen_rf_chains(cfg_.rf, cfg_.n_subcarriers, rf_rng);
}

const PowerDelayProfile& SampleGenerator::pdp(ChannelClass cls) const {
  const auto it = pdps_.find(cls);
  if (it == pdps_.end()) {
    throw std::invalid_argument("class not in experiment config: " +
                                to_string(cls));
  }
  return it->second;
}

EvalSample SampleGenerator::gen_eval(ChannelClass cls,
                                     std::optional<double> snr_db,
                                     StreamDomain domain,
                                     std::uint64_t index) const {
  const PowerDelayProfile& profile = pdp(cls);

  RandomStream chan_rng(cfg_.master_seed, StreamPurpose::channel, domain,
                        link_id_, index);
  RandomStream pilot_rng(cfg_.master_seed, StreamPurpose::pilot, domain,
                         link_id_, index);
  RandomStream noise_rng(cfg_.master_seed, StreamPurpose::noise, domain,
                         link_id_, index);

  double snr = 0.0;
  if (snr_db) {
    snr = *snr_db;
  } else {
    snr = cfg_.train_snr_min_db +
          noise_rng.uniform() * (cfg_.train_snr_max_db - cfg_.train_snr_min_db);
  }

  // Uplink sounding.
  const ChannelRealization ch_ul =
      realize_channel(profile, cfg_.beta, chan_rng);
  const FrequencyResponse g_ul =
      freq_response(ch_ul, profile, cfg_.n_subcarriers, cfg_.scs_hz);
  const FrequencyResponse h_ul =
      effective_channel(g_ul, chains_, LinkDirection::UL);
  const PilotBlock block = gen_pilot_symbols(grid_, pilot_rng);
  const auto y = simulate_pilot_rx(h_ul, block, grid_, snr, noise_rng);

  // Downlink truth one TDD turnaround later.
  const ChannelRealization ch_dl =
      evolve_channel(ch_ul, cfg_.tdd_delay_s, doppler_, chan_rng);
  const FrequencyResponse g_dl =
      freq_response(ch_dl, profile, cfg_.n_subcarriers, cfg_.scs_hz);

  EvalSample sample;
  sample.pilot_csi = ls_estimate(y, block, snr);
  sample.dl_truth = effective_channel(g_dl, chains_, LinkDirection::DL);
  sample.cls = cls;
  sample.snr_db = snr;
  return sample;
}

LinkSample SampleGenerator::gen(ChannelClass cls, std::optional<double> snr_db,
                                StreamDomain domain,
                                std::uint64_t index) const {
  const EvalSample e = gen_eval(cls, snr_db, domain, index);
  LinkSample s;
  s.input = flatten_csi(e.pilot_csi.values).cast<float>();
  s.target = flatten_csi(e.dl_truth).cast<float>();
  s.cls = cls;
  s.snr_db = static_cast<float>(e.snr_db);
  s.link_id = link_id_;
  return s;
}

Dataset make_dataset(const SampleGenerator& gen, ChannelClass cls, int count,
                     std::optional<double> snr_db, StreamDomain domain,
                     std::uint64_t index_offset) {
  if (count < 1) throw std::invalid_argument("dataset count must be >= 1");
  const ExperimentConfig& cfg = gen.config();

  Dataset ds;
  ds.n_subcarriers = static_cast<std::uint32_t>(cfg.n_subcarriers);
  ds.n_pilots = static_cast<std::uint32_t>(gen.grid().num_pilots());
  ds.cls = cls;
  ds.domain = domain;
  ds.master_seed = cfg.master_seed;
  ds.inputs.resize(2 * gen.grid().num_pilots(), count);
  ds.targets.resize(2 * cfg.n_subcarriers, count);
  ds.snr_db.resize(count);

  for (int i = 0; i < count; ++i) {
    const LinkSample s =
        gen.gen(cls, snr_db, domain, index_offset + static_cast<std::uint64_t>(i));
    ds.inputs.col(i) = s.input;
    ds.targets.col(i) = s.target;
    ds.snr_db(i) = s.snr_db;
  }
  return ds;
}

Dataset make_classifier_dataset(const SampleGenerator& gen, ChannelClass cls) {
  const ExperimentConfig& cfg = gen.config();
  const int n_train = cfg.classifier_per_class;
  const int n_val = cfg.classifier_val_per_class;

  // Block sizes: one (train, val) pair per fixed SNR, remainder on policy.
  std::vector<std::optional<double>> snrs;
  std::vector<int> takes, val_takes;
  int train_used = 0, val_used = 0;
  for (std::size_t i = 0; i < cfg.classifier_fixed_snrs_db.size(); ++i) {
    const double f = cfg.classifier_fixed_fractions[i];
    snrs.push_back(cfg.classifier_fixed_snrs_db[i]);
    takes.push_back(static_cast<int>(n_train * f));
    val_takes.push_back(static_cast<int>(n_val * f));
    train_used += takes.back();
    val_used += val_takes.back();
  }
  snrs.push_back(std::nullopt);
  takes.push_back(n_train - train_used);
  val_takes.push_back(n_val - val_used);

  Dataset out;
  out.n_subcarriers = static_cast<std::uint32_t>(cfg.n_subcarriers);
  out.n_pilots = static_cast<std::uint32_t>(gen.grid().num_pilots());
  out.cls = cls;
  out.domain = StreamDomain::train;
  out.master_seed = cfg.master_seed;
  out.inputs.resize(2 * gen.grid().num_pilots(), n_train + n_val);
  out.targets.resize(2 * cfg.n_subcarriers, n_train + n_val);
  out.snr_db.resize(n_train + n_val);

  std::uint64_t offset = 0;
  Eigen::Index col = 0, val_col = n_train;
  for (std::size_t b = 0; b < snrs.size(); ++b) {
    const int total = takes[b] + val_takes[b];
    if (total == 0) continue;
    const Dataset d =
        make_dataset(gen, cls, total, snrs[b], StreamDomain::train, offset);
    offset += static_cast<std::uint64_t>(total);
    if (takes[b] > 0) {
      out.inputs.middleCols(col, takes[b]) = d.inputs.leftCols(takes[b]);
      out.targets.middleCols(col, takes[b]) = d.targets.leftCols(takes[b]);
      out.snr_db.segment(col, takes[b]) = d.snr_db.head(takes[b]);
      col += takes[b];
    }
    if (val_takes[b] > 0) {
      out.inputs.middleCols(val_col, val_takes[b]) =
          d.inputs.rightCols(val_takes[b]);
      out.targets.middleCols(val_col, val_takes[b]) =
          d.targets.rightCols(val_takes[b]);
      out.snr_db.segment(val_col, val_takes[b]) = d.snr_db.tail(val_takes[b]);
      val_col += val_takes[b];
    }
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'T', 'D', 'D', 'S'};
constexpr std::uint16_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("dataset file truncated: " + path);
  return v;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);

  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint16_t>(out, kFormatVersion);
  write_pod<std::uint32_t>(out, ds.n_subcarriers);
  write_pod<std::uint32_t>(out, ds.n_pilots);
  write_pod<std::uint8_t>(out, ds.flatten_layout);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(ds.cls));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.count()));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(ds.domain));
  write_pod<std::uint64_t>(out, ds.master_seed);

  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    out.write(reinterpret_cast<const char*>(ds.inputs.col(i).data()),
              static_cast<std::streamsize>(sizeof(float) * ds.inputs.rows()));
    out.write(reinterpret_cast<const char*>(ds.targets.col(i).data()),
              static_cast<std::streamsize>(sizeof(float) * ds.targets.rows()));
    const float snr = ds.snr_db(i);
    out.write(reinterpret_cast<const char*>(&snr), sizeof(float));
  }
  if (!out) throw std::runtime_error("dataset write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a dataset file (bad magic): " + path);
  }
  const auto version = read_pod<std::uint16_t>(in, path);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported dataset version " +
                             std::to_string(version) + ": " + path);
  }

  Dataset ds;
  ds.n_subcarriers = read_pod<std::uint32_t>(in, path);
  ds.n_pilots = read_pod<std::uint32_t>(in, path);
  ds.flatten_layout = read_pod<std::uint8_t>(in, path);
  if (ds.flatten_layout != kFlattenLayoutId) {
    throw std::runtime_error("unknown flatten layout in dataset: " + path);
  }
  const auto cls = read_pod<std::uint8_t>(in, path);
  if (cls >= kNumChannelClasses) {
    throw std::runtime_error("invalid class id in dataset: " + path);
  }
  ds.cls = static_cast<ChannelClass>(cls);
  const auto count = read_pod<std::uint32_t>(in, path);
  ds.domain = static_cast<StreamDomain>(read_pod<std::uint8_t>(in, path));
  ds.master_seed = read_pod<std::uint64_t>(in, path);

  ds.inputs.resize(2 * ds.n_pilots, count);
  ds.targets.resize(2 * ds.n_subcarriers, count);
  ds.snr_db.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(ds.inputs.col(i).data()),
            static_cast<std::streamsize>(sizeof(float) * ds.inputs.rows()));
    in.read(reinterpret_cast<char*>(ds.targets.col(i).data()),
            static_cast<std::streamsize>(sizeof(float) * ds.targets.rows()));
    float snr = 0.0f;
    in.read(reinterpret_cast<char*>(&snr), sizeof(float));
    ds.snr_db(i) = snr;
    if (!in) throw std::runtime_error("dataset file truncated: " + path);
  }
  in.peek();
  if (!in.eof()) {
    throw std::runtime_error("dataset file has trailing bytes: " + path);
  }
  return ds;
}

std::vector<std::string> gen_dataset(const ExperimentConfig& cfg,
                                     std::uint64_t link_id,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SampleGenerator gen(cfg, link_id);

  std::vector<std::string> written;
  for (ChannelClass cls : cfg.classes) {
    const Dataset ds =
        make_dataset(gen, cls, cfg.train_per_class + cfg.val_per_class,
                     std::nullopt, StreamDomain::train);
    const std::string path = out_dir + "/train_" + to_string(cls) + ".tdds";
    save_dataset(ds, path);
    written.push_back(path);

    const std::string cls_path =
        out_dir + "/classifier_" + to_string(cls) + ".tdds";
    save_dataset(make_classifier_dataset(gen, cls), cls_path);
    written.push_back(cls_path);
  }
  const std::string chains_path =
      out_dir + "/link" + std::to_string(link_id) + ".chains";
  save_chains(gen.chains(), chains_path);
  written.push_back(chains_path);

  const std::string cfg_path = out_dir + "/config.txt";
  save_config(cfg, cfg_path);
  written.push_back(cfg_path);
  return written;
}

std::vector<std::string> gen_multilink(const ExperimentConfig& cfg,
                                       const std::string& out_dir) {
  const int n_links = cfg.m_aps * cfg.k_ues;
  std::vector<std::string> written;
  for (int link = 0; link < n_links; ++link) {
    const std::string dir = out_dir + "/link" + std::to_string(link);
    auto paths = gen_dataset(cfg, static_cast<std::uint64_t>(link), dir);
    written.insert(written.end(), paths.begin(), paths.end());
  }
  return written;
}

}  // namespace tddnet
