// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/sweeps.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tddnet/baselines.hpp"

namespace tddnet {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SweepRow make_row(const std::string& experiment, const std::string& cls,
                  const std::string& x_name, double x_value,
                  const std::string& method, const std::string& metric,
                  double value, long n_samples, const ExperimentConfig& cfg) {
  return {experiment, cls,   x_name,    x_value,          method,
          metric,     value, n_samples, config_hash(cfg), cfg.master_seed};
}

void add_error_rows(SweepResult& out, const std::string& experiment,
                    const std::string& cls, const std::string& x_name,
                    double x_value, const std::string& method,
                    const NmseAccumulator& acc, const ExperimentConfig& cfg) {
  out.rows.push_back(make_row(experiment, cls, x_name, x_value, method, "nmse",
                              acc.nmse(), acc.num_samples(), cfg));
  out.rows.push_back(make_row(experiment, cls, x_name, x_value, method, "mse",
                              acc.mse(), acc.num_samples(), cfg));
}

/// Baseline predictions evaluated alongside the cascade on every sample.
struct BaselineAccumulators {
  NmseAccumulator linear, wiener, linear_cal, wiener_cal;

  void add(const EvalSample& e, const PilotGrid& grid,
           const WienerFilter& filter, const RfChainSet& chains) {
    const PilotCsi calibrated =
        apply_oracle_calibration(e.pilot_csi, chains, grid);
    linear.add(linear_interp(e.pilot_csi, grid), e.dl_truth);
    wiener.add(filter.apply(e.pilot_csi.values), e.dl_truth);
    linear_cal.add(linear_interp(calibrated, grid), e.dl_truth);
    wiener_cal.add(filter.apply(calibrated.values), e.dl_truth);
  }

  void merge(const BaselineAccumulators& other) {
    linear.merge(other.linear);
    wiener.merge(other.wiener);
    linear_cal.merge(other.linear_cal);
    wiener_cal.merge(other.wiener_cal);
  }

  void emit(SweepResult& out, const std::string& experiment,
            const std::string& cls, const std::string& x_name, double x_value,
            const ExperimentConfig& cfg) const {
    add_error_rows(out, experiment, cls, x_name, x_value, "linear", linear, cfg);
    add_error_rows(out, experiment, cls, x_name, x_value, "wiener", wiener, cfg);
    add_error_rows(out, experiment, cls, x_name, x_value, "linear_oraclecal",
                   linear_cal, cfg);
    add_error_rows(out, experiment, cls, x_name, x_value, "wiener_oraclecal",
                   wiener_cal, cfg);
  }
};

}  // namespace

std::string SweepResult::to_csv() const {
  std::string csv =
      "experiment,class,x_name,x_value,method,metric,value,n_samples,"
      "config_hash,seed\n";
  for (const SweepRow& r : rows) {
    csv += r.experiment + ',' + r.cls + ',' + r.x_name + ',' +
           fmt_double(r.x_value) + ',' + r.method + ',' + r.metric + ',' +
           fmt_double(r.value) + ',' + std::to_string(r.n_samples) + ',' +
           r.config_hash + ',' + std::to_string(r.seed) + '\n';
  }
  return csv;
}

void SweepResult::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);  // binary: no newline mangling
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << to_csv();
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

double SweepResult::value_of(const std::string& experiment,
                             const std::string& cls, double x_value,
                             const std::string& method,
                             const std::string& metric) const {
  for (const SweepRow& r : rows) {
    if (r.experiment == experiment && r.cls == cls && r.x_value == x_value &&
        r.method == method && r.metric == metric) {
      return r.value;
    }
  }
  throw std::out_of_range("no sweep row matches " + experiment + "/" + cls +
                          "/" + method + "/" + metric + " at x=" +
                          fmt_double(x_value));
}

SweepResult run_accuracy_sweep(const TddnetModel& model,
                               const ExperimentConfig& cfg,
                               const std::vector<double>& snr_grid) {
  model.validate();
  const SampleGenerator gen(cfg, 0);

  SweepResult out;
  for (double snr : snr_grid) {
    AccuracyAccumulator pooled;
    for (ChannelClass cls : cfg.classes) {
      AccuracyAccumulator per_class;
      for (int i = 0; i < cfg.test_per_class; ++i) {
        const EvalSample e =
            gen.gen_eval(cls, snr, StreamDomain::test,
                         static_cast<std::uint64_t>(i));
        const bool correct = classify(model, e.pilot_csi).cls == cls;
        per_class.add(correct);
        pooled.add(correct);
      }
      out.rows.push_back(make_row("accuracy", to_string(cls), "snr_db", snr,
                                  "tddnet", "accuracy", per_class.accuracy(),
                                  per_class.total(), cfg));
    }
    out.rows.push_back(make_row("accuracy", "pooled", "snr_db", snr, "tddnet",
                                "accuracy", pooled.accuracy(), pooled.total(),
                                cfg));
  }
  return out;
}

SweepResult run_mse_sweep(const TddnetModel& model, const ExperimentConfig& cfg,
                          const std::vector<double>& snr_grid,
                          bool oracle_only) {
  model.validate();
  const SampleGenerator gen(cfg, 0);
  const PilotGrid grid = cfg.grid();

  struct Pooled {
    NmseAccumulator cascade, oracle;
    BaselineAccumulators baselines;
  };
  std::vector<Pooled> pooled(snr_grid.size());

  SweepResult out;
  for (ChannelClass cls : cfg.classes) {
    const PowerDelayProfile& pdp = gen.pdp(cls);
    for (std::size_t s = 0; s < snr_grid.size(); ++s) {
      const double snr = snr_grid[s];
      const WienerFilter filter(pdp, grid, snr, cfg.scs_hz);
      NmseAccumulator cascade, oracle;
      BaselineAccumulators baselines;
      for (int i = 0; i < cfg.test_per_class; ++i) {
        const EvalSample e = gen.gen_eval(cls, snr, StreamDomain::test,
                                          static_cast<std::uint64_t>(i));
        if (!oracle_only) {
          cascade.add(
              predict_downlink(model, e.pilot_csi, ClassifierMode::learned).dl,
              e.dl_truth);
        }
        oracle.add(predict_downlink(model, e.pilot_csi, ClassifierMode::oracle,
                                    cls)
                       .dl,
                   e.dl_truth);
        baselines.add(e, grid, filter, gen.chains());
      }
      const std::string name = to_string(cls);
      if (!oracle_only) {
        add_error_rows(out, "mse_sweep", name, "snr_db", snr, "tddnet",
                       cascade, cfg);
      }
      add_error_rows(out, "mse_sweep", name, "snr_db", snr, "tddnet_oracle",
                     oracle, cfg);
      baselines.emit(out, "mse_sweep", name, "snr_db", snr, cfg);
      pooled[s].cascade.merge(cascade);
      pooled[s].oracle.merge(oracle);
      pooled[s].baselines.merge(baselines);
    }
  }
  // Class-pooled rows (appended after the per-class blocks): ratios of
  // energy sums across all classes at each SNR, one row set per method.
  for (std::size_t s = 0; s < snr_grid.size(); ++s) {
    const double snr = snr_grid[s];
    if (!oracle_only) {
      add_error_rows(out, "mse_sweep", "pooled", "snr_db", snr, "tddnet",
                     pooled[s].cascade, cfg);
    }
    add_error_rows(out, "mse_sweep", "pooled", "snr_db", snr, "tddnet_oracle",
                   pooled[s].oracle, cfg);
    pooled[s].baselines.emit(out, "mse_sweep", "pooled", "snr_db", snr, cfg);
  }
  return out;
}

SweepResult run_pilot_sweep(const ExperimentConfig& cfg,
                            const std::vector<int>& spacings, ChannelClass cls,
                            double snr_db,
                            std::map<int, MlpModel>* model_cache) {
  SweepResult out;
  for (int spacing : spacings) {
    ExperimentConfig sub = cfg;
    sub.pilot_spacing = spacing;
    sub.validate();
    const SampleGenerator gen(sub, 0);
    const PilotGrid grid = sub.grid();

    // One predictor per spacing: the input width follows the pilot count.
    // The sweep isolates prediction quality, so routing is by true class.
    MlpModel predictor;
    if (model_cache != nullptr && model_cache->count(spacing) != 0) {
      predictor = model_cache->at(spacing);
    } else {
      const Dataset data =
          make_dataset(gen, cls, sub.train_per_class + sub.val_per_class,
                       std::nullopt, StreamDomain::train);
      predictor = train_predictor(sub, data, cls,
                                  static_cast<std::uint64_t>(spacing));
      if (model_cache != nullptr) model_cache->emplace(spacing, predictor);
    }

    const WienerFilter filter(gen.pdp(cls), grid, snr_db, sub.scs_hz);
    NmseAccumulator proposed;
    BaselineAccumulators baselines;
    for (int i = 0; i < sub.test_per_class; ++i) {
      const EvalSample e = gen.gen_eval(cls, snr_db, StreamDomain::test,
                                        static_cast<std::uint64_t>(i));
      const Eigen::VectorXf pred = predictor.forward(
          flatten_csi(e.pilot_csi.values).cast<float>().eval());
      const auto values = unflatten_csi(pred.cast<double>().eval());
      proposed.add(Eigen::Map<const Eigen::VectorXcd>(
                       values.data(), static_cast<Eigen::Index>(values.size())),
                   e.dl_truth);
      baselines.add(e, grid, filter, gen.chains());
    }
    const std::string name = to_string(cls);
    add_error_rows(out, "pilot_sweep", name, "spacing", spacing, "tddnet",
                   proposed, sub);
    baselines.emit(out, "pilot_sweep", name, "spacing", spacing, sub);
  }
  return out;
}

SweepResult run_mismatch(const TddnetModel& model, const ExperimentConfig& cfg,
                         const std::vector<double>& snr_grid) {
  model.validate();
  const SampleGenerator gen(cfg, 0);

  SweepResult out;
  for (ChannelClass cls : cfg.classes) {
    for (double snr : snr_grid) {
      NmseAccumulator matched, mismatched;
      for (int i = 0; i < cfg.test_per_class; ++i) {
        const EvalSample e = gen.gen_eval(cls, snr, StreamDomain::test,
                                          static_cast<std::uint64_t>(i));
        matched.add(predict_downlink(model, e.pilot_csi,
                                     ClassifierMode::oracle, cls)
                        .dl,
                    e.dl_truth);
        mismatched.add(predict_downlink(model, e.pilot_csi,
                                        ClassifierMode::oracle,
                                        ChannelClass::TDL_A)
                           .dl,
                       e.dl_truth);
      }
      const std::string name = to_string(cls);
      add_error_rows(out, "mismatch", name, "snr_db", snr, "matched", matched,
                     cfg);
      add_error_rows(out, "mismatch", name, "snr_db", snr, "tdla_predictor",
                     mismatched, cfg);
    }
  }
  return out;
}

}  // namespace tddnet
