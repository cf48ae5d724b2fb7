#include "fogkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "fogkit/errors.hpp"
#include "fogkit/recording_io.hpp"

namespace fogkit {

Recording prepare_recording(const Recording& raw, const PipelineConfig& cfg, Diagnostics* diag) {
  if (!raw.label_track && !raw.labels) throw LabelError("recording " + raw.subject_id + " has no labels");
  Recording r = raw.aligned ? raw : align_recording(raw, cfg.align);
  if (!r.labels && r.label_track) r.labels = rasterize_labels(r, *r.label_track);
  if (!r.preprocessed) r = preprocess_recording(r, cfg.preprocess, diag);
  return r;
}

FeatureTable recording_features(const Recording& prepared, const PipelineConfig& cfg, Diagnostics* diag) {
  if (!prepared.aligned || prepared.series.empty()) throw AlignmentError("feature extraction needs an aligned recording");
  const double rate = prepared.series.front().rate_hz;
  const auto segments = segment_recording(prepared, cfg.window);
  return extract_feature_table(segments, FeatureMask::All, rate, cfg.features, diag);
}

FeatureTable dataset_features(std::span<const Recording> raw, const PipelineConfig& cfg, Diagnostics* diag) {
  std::vector<FeatureTable> tables(raw.size());
  std::vector<Diagnostics> diags(raw.size());
  std::vector<std::exception_ptr> errors(raw.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < raw.size(); i = next++) {
      try {
        tables[i] = recording_features(prepare_recording(raw[i], cfg, &diags[i]), cfg, &diags[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.experiment.jobs), 1,
                                                      std::max<std::size_t>(1, raw.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  FeatureTable out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (diag) {
      for (auto& w : diags[i].warnings) diag->warn(raw[i].subject_id + ": " + w);
    }
    if (tables[i].size() > 0) out.append(tables[i]);
  }
  return out;
}

std::vector<std::filesystem::path> find_recordings(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw NotFound("input directory not found: " + root.string());
  std::vector<fs::path> out;
  if (fs::exists(root / "meta.json")) out.push_back(root);
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / "meta.json")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw NotFound("no recording (meta.json) found under " + root.string());
  return out;
}

std::vector<Recording> load_dataset(const std::filesystem::path& root) {
  std::vector<Recording> out;
  for (const auto& dir : find_recordings(root)) out.push_back(load_recording(dir));
  return out;
}

void save_dataset(std::span<const Recording> recordings, const std::filesystem::path& root) {
  for (const auto& r : recordings) save_recording(r, root / r.subject_id / r.task_id);
}

}  // namespace fogkit
