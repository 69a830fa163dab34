// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "tddnet/hashutil.hpp"

namespace tddnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item));
  return out;
}

long long parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_double_list(const std::vector<double>& vs) {
  std::string s;
  for (double v : vs) {
    if (!s.empty()) s += ',';
    s += fmt_double(v);
  }
  return s;
}

/// One config key: how to set it from text and how to print it.
struct KeyHandler {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<KeyHandler>& key_handlers() {
  static const std::vector<KeyHandler> handlers = {
      {"n_subcarriers",
       [](ExperimentConfig& c, const std::string& v) {
         c.n_subcarriers = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.n_subcarriers); }},
      {"scs_hz",
       [](ExperimentConfig& c, const std::string& v) { c.scs_hz = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.scs_hz); }},
      {"carrier_hz",
       [](ExperimentConfig& c, const std::string& v) { c.carrier_hz = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.carrier_hz); }},
      {"sample_rate_hz",
       [](ExperimentConfig& c, const std::string& v) { c.sample_rate_hz = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.sample_rate_hz); }},
      {"ue_speed_kmph",
       [](ExperimentConfig& c, const std::string& v) { c.ue_speed_kmph = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.ue_speed_kmph); }},
      {"pilot_spacing",
       [](ExperimentConfig& c, const std::string& v) {
         c.pilot_spacing = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.pilot_spacing); }},
      {"snr_grid_db",
       [](ExperimentConfig& c, const std::string& v) {
         c.snr_grid_db.clear();
         for (const auto& item : split_list(v)) {
           c.snr_grid_db.push_back(parse_double(item));
         }
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (double v : c.snr_grid_db) {
           if (!s.empty()) s += ',';
           s += fmt_double(v);
         }
         return s;
       }},
      {"classes",
       [](ExperimentConfig& c, const std::string& v) {
         c.classes.clear();
         for (const auto& item : split_list(v)) {
           c.classes.push_back(channel_class_from_string(item));
         }
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (ChannelClass cls : c.classes) {
           if (!s.empty()) s += ',';
           s += to_string(cls);
         }
         return s;
       }},
      {"rf_mean_gain_re",
       [](ExperimentConfig& c, const std::string& v) {
         c.rf.mean_gain.real(parse_double(v));
       },
       [](const ExperimentConfig& c) { return fmt_double(c.rf.mean_gain.real()); }},
      {"rf_mean_gain_im",
       [](ExperimentConfig& c, const std::string& v) {
         c.rf.mean_gain.imag(parse_double(v));
       },
       [](const ExperimentConfig& c) { return fmt_double(c.rf.mean_gain.imag()); }},
      {"rf_variance",
       [](ExperimentConfig& c, const std::string& v) { c.rf.variance = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.rf.variance); }},
      {"beta",
       [](ExperimentConfig& c, const std::string& v) { c.beta = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.beta); }},
      {"tdd_delay_s",
       [](ExperimentConfig& c, const std::string& v) { c.tdd_delay_s = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.tdd_delay_s); }},
      {"delay_spread_s",
       [](ExperimentConfig& c, const std::string& v) { c.delay_spread_s = parse_double(v); },
       [](const ExperimentConfig& c) { return fmt_double(c.delay_spread_s); }},
      {"m_aps",
       [](ExperimentConfig& c, const std::string& v) {
         c.m_aps = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.m_aps); }},
      {"k_ues",
       [](ExperimentConfig& c, const std::string& v) {
         c.k_ues = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.k_ues); }},
      {"train_per_class",
       [](ExperimentConfig& c, const std::string& v) {
         c.train_per_class = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.train_per_class); }},
      {"val_per_class",
       [](ExperimentConfig& c, const std::string& v) {
         c.val_per_class = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.val_per_class); }},
      {"classifier_per_class",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_per_class = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_per_class);
       }},
      {"classifier_val_per_class",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_val_per_class = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_val_per_class);
       }},
      {"classifier_fixed_snrs_db",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_fixed_snrs_db = parse_double_list(v);
       },
       [](const ExperimentConfig& c) {
         return fmt_double_list(c.classifier_fixed_snrs_db);
       }},
      {"classifier_fixed_fractions",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_fixed_fractions = parse_double_list(v);
       },
       [](const ExperimentConfig& c) {
         return fmt_double_list(c.classifier_fixed_fractions);
       }},
      {"classifier_restarts",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_restarts = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_restarts);
       }},
      {"test_per_class",
       [](ExperimentConfig& c, const std::string& v) {
         c.test_per_class = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.test_per_class); }},
      {"train_snr_min_db",
       [](ExperimentConfig& c, const std::string& v) {
         c.train_snr_min_db = parse_double(v);
       },
       [](const ExperimentConfig& c) { return fmt_double(c.train_snr_min_db); }},
      {"train_snr_max_db",
       [](ExperimentConfig& c, const std::string& v) {
         c.train_snr_max_db = parse_double(v);
       },
       [](const ExperimentConfig& c) { return fmt_double(c.train_snr_max_db); }},
      {"master_seed",
       [](ExperimentConfig& c, const std::string& v) {
         c.master_seed = static_cast<std::uint64_t>(std::stoull(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }},
      {"train_learning_rate",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.learning_rate = parse_double(v);
       },
       [](const ExperimentConfig& c) { return fmt_double(c.train.learning_rate); }},
      {"train_batch_size",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.batch_size = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.train.batch_size); }},
      {"train_max_epochs",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.max_epochs = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.train.max_epochs); }},
      {"train_optimizer",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "adam") {
           c.train.optimizer = OptimizerKind::adam;
         } else if (v == "sgd") {
           c.train.optimizer = OptimizerKind::sgd;
         } else {
           throw std::invalid_argument("optimizer must be adam or sgd: " + v);
         }
       },
       [](const ExperimentConfig& c) {
         return std::string(c.train.optimizer == OptimizerKind::adam ? "adam"
                                                                     : "sgd");
       }},
      {"train_patience",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.early_stop_patience = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.early_stop_patience);
       }},
      {"classifier_learning_rate",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.learning_rate = parse_double(v);
       },
       [](const ExperimentConfig& c) {
         return fmt_double(c.classifier_train.learning_rate);
       }},
      {"classifier_batch_size",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.batch_size = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_train.batch_size);
       }},
      {"classifier_max_epochs",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.max_epochs = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_train.max_epochs);
       }},
      {"classifier_lr_decay_patience",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.lr_decay_patience = static_cast<int>(parse_int(v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.classifier_train.lr_decay_patience);
       }},
      {"classifier_lr_decay_factor",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.lr_decay_factor = parse_double(v);
       },
       [](const ExperimentConfig& c) {
         return fmt_double(c.classifier_train.lr_decay_factor);
       }},
      {"classifier_min_learning_rate",
       [](ExperimentConfig& c, const std::string& v) {
         c.classifier_train.min_learning_rate = parse_double(v);
       },
       [](const ExperimentConfig& c) {
         return fmt_double(c.classifier_train.min_learning_rate);
       }},
  };
  return handlers;
}

const KeyHandler* find_handler(const std::string& key) {
  for (const KeyHandler& h : key_handlers()) {
    if (key == h.name) return &h;
  }
  return nullptr;
}

}  // namespace

TrainConfig classifier_train_defaults() {
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  tc.batch_size = 128;
  tc.max_epochs = 4000;
  tc.lr_decay_patience = 60;
  tc.lr_decay_factor = 0.5;
  tc.min_learning_rate = 3e-6;
  return tc;
}

DopplerSpec ExperimentConfig::doppler() const {
  return make_doppler(ue_speed_kmph / 3.6, carrier_hz);
}

PilotGrid ExperimentConfig::grid() const {
  return make_pilot_grid(n_subcarriers, pilot_spacing);
}

double ExperimentConfig::validation_fraction() const {
  return static_cast<double>(val_per_class) /
         static_cast<double>(train_per_class + val_per_class);
}

void ExperimentConfig::validate() const {
  if (n_subcarriers < 1) throw std::invalid_argument("n_subcarriers < 1");
  if (!(scs_hz > 0) || !(carrier_hz > 0) || !(sample_rate_hz > 0)) {
    throw std::invalid_argument("frequencies must be positive");
  }
  if (ue_speed_kmph < 0) throw std::invalid_argument("negative UE speed");
  if (pilot_spacing < 1 || pilot_spacing > n_subcarriers) {
    throw std::invalid_argument("pilot spacing out of range");
  }
  if (snr_grid_db.empty()) throw std::invalid_argument("empty SNR grid");
  if (classes.empty()) throw std::invalid_argument("no channel classes");
  if (rf.variance < 0) throw std::invalid_argument("negative RF variance");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (tdd_delay_s < 0) throw std::invalid_argument("negative TDD delay");
  if (!(delay_spread_s > 0)) throw std::invalid_argument("delay spread <= 0");
  if (m_aps < 1 || k_ues < 1) throw std::invalid_argument("need M, K >= 1");
  if (train_per_class < 1 || val_per_class < 1 || classifier_per_class < 1 ||
      test_per_class < 1) {
    throw std::invalid_argument("dataset sizes must be >= 1");
  }
  if (classifier_val_per_class < 0) {
    throw std::invalid_argument("classifier_val_per_class must be >= 0");
  }
  if (classifier_restarts < 1) {
    throw std::invalid_argument("classifier_restarts must be >= 1");
  }
  if (classifier_fixed_snrs_db.size() != classifier_fixed_fractions.size()) {
    throw std::invalid_argument(
        "classifier_fixed_snrs_db and classifier_fixed_fractions must pair up");
  }
  double frac_sum = 0.0;
  for (double f : classifier_fixed_fractions) {
    if (f < 0.0) throw std::invalid_argument("negative classifier fraction");
    frac_sum += f;
  }
  if (frac_sum > 1.0 + 1e-9) {
    throw std::invalid_argument("classifier fractions sum above 1");
  }
  if (train_snr_max_db < train_snr_min_db) {
    throw std::invalid_argument("training SNR range inverted");
  }
  train.validate();
  classifier_train.validate();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);

  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    const std::string body = trim(line);
    if (body.empty()) continue;

    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    try {
      apply_config_override(cfg, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
  const KeyHandler* h = find_handler(key);
  if (h == nullptr) throw std::invalid_argument("unknown config key: " + key);
  h->set(cfg, value);
}

std::string config_canonical(const ExperimentConfig& cfg) {
  std::string text;
  for (const KeyHandler& h : key_handlers()) {
    text += h.name;
    text += " = ";
    text += h.get(cfg);
    text += '\n';
  }
  return text;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << config_canonical(cfg);
  if (!out) throw std::runtime_error("config write failed: " + path);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canon = config_canonical(cfg);
  const std::uint64_t h = fnv1a64(canon.data(), canon.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tddnet
