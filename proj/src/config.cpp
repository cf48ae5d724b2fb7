#include "fogkit/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>

#include "fogkit/errors.hpp"

namespace fogkit {

namespace {

using json = nlohmann::json;

struct Entry {
  std::string key;
  std::function<void(PipelineConfig&, const json&)> set;
  std::function<json(const PipelineConfig&)> get;
};

template <class T>
T as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SpecError("config key '" + key + "' has a value of the wrong type: " + v.dump());
  }
}

std::pair<double, double> as_band(const json& v, const std::string& key) {
  const auto b = as<std::vector<double>>(v, key);
  if (b.size() != 2) throw SpecError("config key '" + key + "' expects [lo, hi]");
  return {b[0], b[1]};
}

json masks_json(const std::vector<FeatureMask>& masks) {
  json out = json::array();
  for (auto m : masks) out.push_back(to_string(m));
  return out;
}

std::vector<FeatureMask> parse_masks(const json& v, const std::string& key) {
  std::vector<FeatureMask> out;
  if (v.is_string()) {
    out.push_back(parse_feature_mask(v.get<std::string>()));
  } else {
    for (const auto& s : as<std::vector<std::string>>(v, key)) out.push_back(parse_feature_mask(s));
  }
  return out;
}

#define FOGKIT_SCALAR(KEY, TYPE, FIELD)                                                   \
  Entry {                                                                                 \
    KEY, [](PipelineConfig& c, const json& v) { c.FIELD = as<TYPE>(v, KEY); },             \
        [](const PipelineConfig& c) { return json(c.FIELD); }                             \
  }

#define FOGKIT_BAND(KEY, LO, HI)                                                                          \
  Entry {                                                                                                 \
    KEY, [](PipelineConfig& c, const json& v) { std::tie(c.LO, c.HI) = as_band(v, KEY); },                 \
        [](const PipelineConfig& c) { return json::array({c.LO, c.HI}); }                                 \
  }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      Entry{"master", [](PipelineConfig& c, const json& v) { c.align.master = parse_modality(as<std::string>(v, "master")); },
            [](const PipelineConfig& c) { return json(std::string(to_string(c.align.master))); }},
      FOGKIT_SCALAR("target_rate", double, align.target_rate_hz),
      FOGKIT_SCALAR("edge_hold", bool, align.edge_hold),
      FOGKIT_SCALAR("start_threshold_scale", double, task_start.threshold_scale),
      FOGKIT_SCALAR("start_window", double, task_start.window_s),
      FOGKIT_SCALAR("start_baseline", double, task_start.baseline_s),
      FOGKIT_BAND("eeg.band", preprocess.eeg_band_lo_hz, preprocess.eeg_band_hi_hz),
      FOGKIT_SCALAR("eeg.order", int, preprocess.eeg_order),
      FOGKIT_BAND("emg.band", preprocess.emg_band_lo_hz, preprocess.emg_band_hi_hz),
      FOGKIT_SCALAR("acc.lowpass", double, preprocess.acc_lowpass_hz),
      FOGKIT_SCALAR("notch.freq", double, preprocess.notch_hz),
      FOGKIT_SCALAR("notch.width", double, preprocess.notch_width_hz),
      FOGKIT_SCALAR("filter.order", int, preprocess.order),
      FOGKIT_SCALAR("zero_phase", bool, preprocess.zero_phase),
      Entry{"eeg.reference",
            [](PipelineConfig& c, const json& v) {
              const auto r = as<std::vector<std::string>>(v, "eeg.reference");
              if (r.size() != 2) throw SpecError("config key 'eeg.reference' expects two channel names");
              c.preprocess.reference_a = r[0];
              c.preprocess.reference_b = r[1];
            },
            [](const PipelineConfig& c) { return json::array({c.preprocess.reference_a, c.preprocess.reference_b}); }},
      FOGKIT_SCALAR("window", double, window.window_s),
      FOGKIT_SCALAR("step", double, window.step_s),
      FOGKIT_SCALAR("threshold", double, window.threshold),
      FOGKIT_SCALAR("se.m", int, features.sample_entropy.m),
      FOGKIT_SCALAR("se.r", double, features.sample_entropy.r),
      FOGKIT_SCALAR("emg.deadband", double, features.emg_deadband),
      FOGKIT_SCALAR("eeg.channels", std::size_t, features.eeg_channels),
      FOGKIT_SCALAR("emg.channels", std::size_t, features.emg_channels),
      FOGKIT_SCALAR("acc.channels", std::vector<std::string>, features.acc_channels),
      FOGKIT_BAND("acc.total_power_band", features.tp_lo_hz, features.tp_hi_hz),
      FOGKIT_BAND("fi.freeze_band", features.freezing.freeze_lo_hz, features.freezing.freeze_hi_hz),
      FOGKIT_BAND("fi.locomotion_band", features.freezing.loco_lo_hz, features.freezing.loco_hi_hz),
      Entry{"masks", [](PipelineConfig& c, const json& v) { c.experiment.masks = parse_masks(v, "masks"); },
            [](const PipelineConfig& c) { return masks_json(c.experiment.masks); }},
      FOGKIT_SCALAR("grid.C", std::vector<double>, experiment.grid.C_values),
      FOGKIT_SCALAR("grid.gamma", std::vector<double>, experiment.grid.gamma_values),
      FOGKIT_SCALAR("grid.folds", int, experiment.grid.folds),
      FOGKIT_SCALAR("test_fraction", double, experiment.split.test_fraction),
      FOGKIT_SCALAR("stratified", bool, experiment.split.stratified),
      FOGKIT_SCALAR("replications", int, experiment.replications),
      FOGKIT_SCALAR("seed", std::uint64_t, experiment.seed),
      FOGKIT_SCALAR("jobs", int, experiment.jobs),
      FOGKIT_SCALAR("svm.tolerance", double, experiment.svm.tolerance),
      FOGKIT_SCALAR("svm.max_iterations", std::uint64_t, experiment.svm.max_iterations),
      FOGKIT_SCALAR("svm.positive_weight", double, experiment.svm.positive_weight),
      FOGKIT_SCALAR("svm.negative_weight", double, experiment.svm.negative_weight),
      FOGKIT_SCALAR("synth.subjects", int, synth.subjects),
      FOGKIT_SCALAR("synth.duration", double, synth.duration_s),
      FOGKIT_SCALAR("synth.episodes", int, synth.episodes_per_subject),
      FOGKIT_SCALAR("synth.episode_min", double, synth.episode_min_s),
      FOGKIT_SCALAR("synth.episode_max", double, synth.episode_max_s),
      FOGKIT_SCALAR("synth.lead_in", double, synth.lead_in_s),
      FOGKIT_SCALAR("synth.noise", double, synth.noise),
      FOGKIT_SCALAR("synth.max_clock_offset", std::int64_t, synth.max_clock_offset_ms),
      FOGKIT_SCALAR("log_level", std::string, log_level),
  };
  return entries;
}

#undef FOGKIT_SCALAR
#undef FOGKIT_BAND

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) flatten(*it, key, out);
    else out.emplace_back(key, *it);
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : registry()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const nlohmann::json& value) {
  for (const auto& e : registry()) {
    if (e.key == key) {
      try {
        e.set(cfg, value);
      } catch (const FormatError& err) {
        throw SpecError("config key '" + key + "': " + err.what());
      }
      return;
    }
  }
  throw SpecError("unknown config key '" + key + "'");
}

void merge_config(PipelineConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("config must be a JSON object");
  std::vector<std::pair<std::string, json>> flat;
  flatten(j, "", flat);
  for (const auto& [k, v] : flat) set_config_value(cfg, k, v);
}

PipelineConfig load_config(const std::filesystem::path& file, PipelineConfig base) {
  std::ifstream in(file);
  if (!in) throw NotFound("cannot open config file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  merge_config(base, j);
  return base;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  json out = json::object();
  for (const auto& e : registry()) out[e.key] = e.get(cfg);
  return out;
}

void check_config(const PipelineConfig& cfg) {
  if (!(cfg.align.target_rate_hz > 0.0)) throw SpecError("target_rate must be positive");
  if (!(cfg.task_start.threshold_scale > 0.0) || !(cfg.task_start.window_s > 0.0) ||
      !(cfg.task_start.baseline_s > 0.0)) {
    throw SpecError("task start parameters must be positive");
  }
  check_window_spec(cfg.window, cfg.align.target_rate_hz);
  if (cfg.preprocess.order < 1 || cfg.preprocess.eeg_order < 1) throw SpecError("filter order must be >= 1");
  if (cfg.features.sample_entropy.m < 1 || !(cfg.features.sample_entropy.r > 0.0)) {
    throw SpecError("sample entropy needs m >= 1 and r > 0");
  }
  if (cfg.features.emg_deadband < 0.0) throw SpecError("emg.deadband must be non-negative");
  if (cfg.experiment.jobs < 1) throw SpecError("jobs must be >= 1");
  check_experiment_config(cfg.experiment);
  static const char* levels[] = {"error", "warn", "info", "debug"};
  if (std::find(std::begin(levels), std::end(levels), cfg.log_level) == std::end(levels)) {
    throw SpecError("log level must be one of error, warn, info, debug");
  }
}

}  // namespace fogkit
