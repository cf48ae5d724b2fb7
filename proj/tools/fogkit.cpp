// Command-line front end. Exit codes: 0 success, 1 input or validation
// error (including bad flags), 2 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fogkit/config.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/pipeline.hpp"
#include "fogkit/recording_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fogkit;
using json = nlohmann::json;

namespace {

enum class Level { Error = 0, Warn, Info, Debug };

Level g_level = Level::Info;

Level parse_level(const std::string& s) {
  if (s == "error") return Level::Error;
  if (s == "warn") return Level::Warn;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  throw SpecError("log level must be one of error, warn, info, debug");
}

void log(Level lvl, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl <= g_level) std::cerr << "[fogkit " << names[static_cast<int>(lvl)] << "] " << msg << '\n';
}

void flush_warnings(const Diagnostics& d) {
  for (const auto& w : d.warnings) log(Level::Warn, w);
}

// Options shared by every subcommand.
struct Common {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;
  std::optional<std::string> log_level;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Flags that map onto config keys; each is applied only when given.
struct Overrides {
  std::optional<std::string> master;
  std::optional<double> target_rate;
  bool edge_hold{false};
  std::optional<double> start_threshold_scale;
  std::optional<double> window, step, threshold;
  std::vector<std::string> masks;
  std::optional<int> replications, folds;
  std::optional<double> test_fraction;
  std::optional<int> subjects, episodes;
  std::optional<double> duration;
};

void add_common(CLI::App* sub, Common& c, bool needs_out) {
  sub->add_option("--config", c.config_file, "JSON config file (nested or dotted keys)")->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "Override one config key: key=<json value>");
  sub->add_option("--log-level", c.log_level, "error|warn|info|debug (env FOGKIT_LOG_LEVEL)");
  sub->add_option("--jobs", c.jobs, "Worker cap");
  sub->add_option("--seed", c.seed, "Master seed");
  auto* out = sub->add_option("--out", c.out, "Output directory");
  if (needs_out) out->required();
}

PipelineConfig resolve(const Common& c, const Overrides& o) {
  PipelineConfig cfg;
  if (c.config_file) cfg = load_config(*c.config_file, cfg);
  if (const char* env = std::getenv("FOGKIT_LOG_LEVEL"); env && *env) cfg.log_level = env;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw SpecError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;  // bare strings need no quotes
    }
    set_config_value(cfg, key, value);
  }
  if (c.log_level) cfg.log_level = *c.log_level;
  if (c.jobs) cfg.experiment.jobs = *c.jobs;
  if (c.seed) cfg.experiment.seed = *c.seed;
  if (o.master) set_config_value(cfg, "master", *o.master);
  if (o.target_rate) cfg.align.target_rate_hz = *o.target_rate;
  if (o.edge_hold) cfg.align.edge_hold = true;
  if (o.start_threshold_scale) cfg.task_start.threshold_scale = *o.start_threshold_scale;
  if (o.window) cfg.window.window_s = *o.window;
  if (o.step) cfg.window.step_s = *o.step;
  if (o.threshold) cfg.window.threshold = *o.threshold;
  if (!o.masks.empty()) set_config_value(cfg, "masks", o.masks);
  if (o.replications) cfg.experiment.replications = *o.replications;
  if (o.folds) cfg.experiment.grid.folds = *o.folds;
  if (o.test_fraction) cfg.experiment.split.test_fraction = *o.test_fraction;
  if (o.subjects) cfg.synth.subjects = *o.subjects;
  if (o.episodes) cfg.synth.episodes_per_subject = *o.episodes;
  if (o.duration) cfg.synth.duration_s = *o.duration;
  cfg.experiment.window = cfg.window;
  check_config(cfg);
  g_level = parse_level(cfg.log_level);
  return cfg;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  out << text;
}

// Logs the resolved config and, when an output directory is set, writes it
// next to the results.
void record_config(const PipelineConfig& cfg, const std::string& command, const std::string& out) {
  const json j = config_to_json(cfg);
  log(Level::Info, command + " config " + j.dump());
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "config.resolved.json", j.dump(2) + "\n");
  }
}

FeatureTable features_from(const std::string& in, const std::string& features_csv, const PipelineConfig& cfg) {
  if (!features_csv.empty()) {
    if (!fs::exists(features_csv)) throw NotFound("feature file not found: " + features_csv);
    return read_feature_csv(features_csv);
  }
  if (in.empty()) throw SpecError("either --in or --features is required");
  const auto data = load_dataset(in);
  Diagnostics d;
  FeatureTable t = dataset_features(data, cfg, &d);
  flush_warnings(d);
  return t;
}

void write_reports(const std::vector<ExperimentReport>& reports, const fs::path& out) {
  write_runs_csv(reports, out / "runs.csv");
  write_summary(reports, out / "summary.txt");
  write_roc_csv(reports, out / "roc.csv");
  write_report_json(reports, out / "report.json");
  std::cout << format_summary(reports);
}

// Generic wide-CSV import described by a column map:
//   {"subject_id": "...", "task_id": "...",
//    "subsystems": {"acc": {"file": "acc.csv", "time_column": "t", "time_scale_ms": 1,
//                           "rate_hz": 500, "world_clock_offset_ms": 0,
//                           "channels": [{"name": "LTibia_X", "column": "ax", "flags": []}]}},
//    "labels": "labels.csv"}
// Relative paths resolve against the map's directory.
Recording convert_wide_csv(const fs::path& map_file) {
  std::ifstream in(map_file);
  if (!in) throw NotFound("column map not found: " + map_file.string());
  json map;
  try {
    map = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(map_file.string() + ": " + e.what());
  }
  const fs::path base = map_file.parent_path();
  Recording r;
  try {
    r.subject_id = map.at("subject_id").get<std::string>();
    r.task_id = map.value("task_id", std::string("task1"));
    for (const auto& [stem, sub] : map.at("subsystems").items()) {
      const Modality m = parse_modality(stem);
      const fs::path file = base / sub.at("file").get<std::string>();
      std::ifstream csv(file);
      if (!csv) throw NotFound("data file not found: " + file.string());
      std::string line;
      if (!std::getline(csv, line)) throw FormatError(file.string() + ": empty file");
      auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
          while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
          f.push_back(item);
        }
        return f;
      };
      const auto header = split(line);
      auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw FormatError(file.string() + ": no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
      };
      const std::size_t tcol = column(sub.at("time_column").get<std::string>());
      const double tscale = sub.value("time_scale_ms", 1.0);
      const double rate = sub.at("rate_hz").get<double>();
      r.world_clock_offset_ms[m] = sub.value("world_clock_offset_ms", std::int64_t{0});
      std::vector<std::size_t> cols;
      std::vector<TimeSeries> series;
      for (const auto& ch : sub.at("channels")) {
        TimeSeries ts;
        ts.channel.name = ch.at("name").get<std::string>();
        ts.channel.modality = m;
        ts.channel.native_rate_hz = rate;
        for (const auto& f : ch.value("flags", json::array())) {
          const auto flag = f.get<std::string>();
          if (flag == "reference") ts.channel.roles.reference = true;
          else if (flag == "eog") ts.channel.roles.eog = true;
          else if (flag == "excluded") ts.channel.roles.excluded = true;
          else throw FormatError("unknown channel flag '" + flag + "'");
        }
        ts.rate_hz = rate;
        cols.push_back(column(ch.at("column").get<std::string>()));
        series.push_back(std::move(ts));
      }
      std::size_t lineno = 1;
      bool first = true;
      while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
          throw FormatError(file.string() + " line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields");
        }
        try {
          if (first) {
            const auto t0 = std::llround(std::stod(f[tcol]) * tscale);
            for (auto& ts : series) ts.t0_ms = t0;
            first = false;
          }
          for (std::size_t c = 0; c < cols.size(); ++c) series[c].samples.push_back(std::stod(f[cols[c]]));
        } catch (const std::logic_error&) {
          throw FormatError(file.string() + " line " + std::to_string(lineno) + ": malformed number");
        }
      }
      for (auto& ts : series) r.series.push_back(std::move(ts));
    }
    if (map.contains("labels")) r.label_track = load_labels(base / map.at("labels").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(map_file.string() + ": " + e.what());
  }
  r.validation = validate_recording(r);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fogkit: multimodal freezing-of-gait detection pipeline"};
  app.require_subcommand(1);
  Common c;
  Overrides o;
  std::string in, features_csv, map_file, model_file;
  std::optional<double> fixed_C, fixed_gamma;
  std::string train_mask = "ALL";

  auto add_align_flags = [&](CLI::App* s) {
    s->add_option("--master", o.master, "Master subsystem (default ACC)");
    s->add_option("--target-rate", o.target_rate, "Aligned rate in Hz (default 500)");
    s->add_flag("--edge-hold", o.edge_hold, "Hold edge values instead of failing outside the source span");
    s->add_option("--start-threshold-scale", o.start_threshold_scale, "Task-start threshold multiplier");
  };
  auto add_window_flags = [&](CLI::App* s) {
    s->add_option("--window", o.window, "Window length in seconds (default 3)");
    s->add_option("--step", o.step, "Window step in seconds (default 0.3)");
    s->add_option("--threshold", o.threshold, "PFG labeling threshold (default 0.8)");
  };
  auto add_eval_flags = [&](CLI::App* s) {
    s->add_option("--in", in, "Dataset directory");
    s->add_option("--features", features_csv, "Feature CSV instead of a dataset");
    s->add_option("--mask", o.masks, "Feature masks: EEG, EMG, ACC, ALL or joined with '+'");
    s->add_option("--replications", o.replications, "Replications (default 20)");
    s->add_option("--folds", o.folds, "Cross-validation folds (default 5)");
    s->add_option("--test-fraction", o.test_fraction, "Test fraction (default 0.25)");
  };

  auto* convert = app.add_subcommand("convert", "Import a wide CSV export via a column map");
  add_common(convert, c, true);
  convert->add_option("--map", map_file, "Column map JSON")->required();

  auto* validate = app.add_subcommand("validate", "Check recordings and print a validation report");
  add_common(validate, c, false);
  validate->add_option("--in", in, "Dataset or recording directory")->required();

  auto* align = app.add_subcommand("align", "Align every subsystem onto the master grid");
  add_common(align, c, true);
  align->add_option("--in", in, "Dataset directory")->required();
  add_align_flags(align);

  auto* preprocess = app.add_subcommand("preprocess", "Filter, re-reference and normalize");
  add_common(preprocess, c, true);
  preprocess->add_option("--in", in, "Dataset directory")->required();
  add_align_flags(preprocess);

  auto* segment = app.add_subcommand("segment", "Write the sliding-window manifest");
  add_common(segment, c, true);
  segment->add_option("--in", in, "Dataset directory")->required();
  add_align_flags(segment);
  add_window_flags(segment);

  auto* features = app.add_subcommand("features", "Extract the feature table");
  add_common(features, c, true);
  features->add_option("--in", in, "Dataset directory")->required();
  add_align_flags(features);
  add_window_flags(features);

  auto* train = app.add_subcommand("train", "Train one SVM on a feature table");
  add_common(train, c, true);
  train->add_option("--features", features_csv, "Feature CSV")->required();
  train->add_option("--mask", train_mask, "Feature mask (default ALL)");
  train->add_option("--C", fixed_C, "Fixed C (skips the grid search together with --gamma)");
  train->add_option("--gamma", fixed_gamma, "Fixed gamma");
  train->add_option("--folds", o.folds, "Cross-validation folds (default 5)");

  auto* eval_dep = app.add_subcommand("eval-dependent", "Per-subject split, grid search, train and test");
  add_common(eval_dep, c, true);
  add_align_flags(eval_dep);
  add_window_flags(eval_dep);
  add_eval_flags(eval_dep);

  auto* eval_ind = app.add_subcommand("eval-independent", "Pooled split, grid search, train and test");
  add_common(eval_ind, c, true);
  add_align_flags(eval_ind);
  add_window_flags(eval_ind);
  add_eval_flags(eval_ind);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  add_common(synth, c, true);
  synth->add_option("--subjects", o.subjects, "Subjects (default 2)");
  synth->add_option("--duration", o.duration, "Seconds per subject (default 120)");
  synth->add_option("--episodes", o.episodes, "FOG episodes per subject (default 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const PipelineConfig cfg = resolve(c, o);
    const fs::path out = c.out;

    if (*convert) {
      record_config(cfg, "convert", c.out);
      const Recording r = convert_wide_csv(map_file);
      save_recording(r, out / r.subject_id / r.task_id);
      log(Level::Info, "converted " + r.subject_id + "/" + r.task_id);
      return r.validation.passed() ? 0 : 1;
    }
    if (*validate) {
      record_config(cfg, "validate", c.out);
      bool ok = true;
      for (const auto& dir : find_recordings(in)) {
        const Recording r = load_recording(dir);
        std::cout << dir.string() << ": " << (r.validation.passed() ? "ok" : "FAILED") << '\n';
        for (const auto& ch : r.validation.channels) {
          std::cout << "  " << ch.name << ' ' << to_string(ch.modality) << ' ' << ch.rate_hz << " Hz "
                    << ch.duration_s << " s gaps=" << ch.gap_count << '\n';
        }
        for (const auto& issue : r.validation.issues) {
          std::cout << "  " << (issue.severity == Severity::Error ? "error" : "warning") << ": "
                    << (issue.channel.empty() ? "" : issue.channel + ": ") << issue.message << '\n';
        }
        ok = ok && r.validation.passed();
      }
      return ok ? 0 : 1;
    }
    if (*synth) {
      record_config(cfg, "synth", c.out);
      const auto data = synth_dataset(cfg.synth, cfg.experiment.seed);
      save_dataset(data, out);
      log(Level::Info, "wrote " + std::to_string(data.size()) + " recordings to " + out.string());
      return 0;
    }
    if (*align || *preprocess) {
      record_config(cfg, *align ? "align" : "preprocess", c.out);
      std::vector<Recording> result;
      for (const auto& r : load_dataset(in)) {
        Recording a = r.aligned ? r : align_recording(r, cfg.align);
        if (const TimeSeries* x = a.find("LTibia_X"); *align && x) {
          const TimeSeries* y = a.find("LTibia_Y");
          const TimeSeries* z = a.find("LTibia_Z");
          if (y && z) {
            try {
              const double t = detect_task_start(acc_magnitude(*x, *y, *z), cfg.task_start);
              log(Level::Info, r.subject_id + "/" + r.task_id + " task start at " + format_double(t) + " ms");
            } catch (const NotFound&) {
              log(Level::Warn, r.subject_id + "/" + r.task_id + ": no task start detected");
            }
          }
        }
        if (*preprocess && !a.preprocessed) {
          Diagnostics d;
          a = preprocess_recording(a, cfg.preprocess, &d);
          flush_warnings(d);
        }
        result.push_back(std::move(a));
      }
      save_dataset(result, out);
      return 0;
    }
    if (*segment) {
      record_config(cfg, "segment", c.out);
      std::vector<Segment> all;
      std::vector<Recording> keep;
      for (const auto& r : load_dataset(in)) {
        Recording a = r.aligned ? r : align_recording(r, cfg.align);
        if (!a.labels && a.label_track) a.labels = rasterize_labels(a, *a.label_track);
        keep.push_back(std::move(a));
      }
      for (const auto& r : keep) {
        auto segs = segment_recording(r, cfg.window);
        all.insert(all.end(), segs.begin(), segs.end());
      }
      write_segment_manifest(all, out / "segments.csv");
      log(Level::Info, "wrote " + std::to_string(all.size()) + " segments");
      return 0;
    }
    if (*features) {
      record_config(cfg, "features", c.out);
      const FeatureTable t = features_from(in, "", cfg);
      write_feature_csv(t, out / "features.csv");
      log(Level::Info, "wrote " + std::to_string(t.size()) + " feature rows");
      return 0;
    }
    if (*train) {
      record_config(cfg, "train", c.out);
      const FeatureTable t = features_from("", features_csv, cfg).select(parse_feature_mask(train_mask));
      Diagnostics d;
      const Standardizer st = standardize_fit(t.rows, &d);
      const Matrix Z = standardize_apply(st, t.rows);
      double C = 0.0, gamma = 0.0;
      if (fixed_C && fixed_gamma) {
        C = *fixed_C;
        gamma = *fixed_gamma;
      } else {
        const auto gs = grid_search_cv(Z, t.label, cfg.experiment.grid, cfg.experiment.seed, cfg.experiment.svm,
                                       cfg.experiment.jobs, &d);
        C = gs.best_C;
        gamma = gs.best_gamma;
        std::ofstream grid(out / "grid.csv");
        grid << "C,gamma,mean_accuracy\n";
        for (const auto& p : gs.table) {
          grid << format_double(p.C) << ',' << format_double(p.gamma) << ',' << format_double(p.mean_accuracy) << '\n';
        }
      }
      SvmOptions opts = cfg.experiment.svm;
      opts.standardize = false;
      SvmModel model = svm_train(Z, t.label, C, gamma, opts, nullptr, &d);
      model.standardizer = st;
      save_model(model, out / "model.json");
      flush_warnings(d);
      log(Level::Info, "trained C=" + format_double(C) + " gamma=" + format_double(gamma) + " with " +
                           std::to_string(model.support_vectors.size()) + " support vectors");
      return 0;
    }
    if (*eval_dep || *eval_ind) {
      record_config(cfg, *eval_dep ? "eval-dependent" : "eval-independent", c.out);
      const FeatureTable t = features_from(in, features_csv, cfg);
      Diagnostics d;
      const auto reports = *eval_dep ? run_subject_dependent(t, cfg.experiment, &d)
                                     : run_subject_independent(t, cfg.experiment, &d);
      flush_warnings(d);
      write_reports(reports, out);
      return 0;
    }
    return 1;
  } catch (const Error& e) {
    log(Level::Error, e.what());
    return 1;
  } catch (const std::exception& e) {
    log(Level::Error, std::string("internal error: ") + e.what());
    return 2;
  }
}
