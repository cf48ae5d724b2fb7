#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "fogkit/config.hpp"

namespace fogkit {

// Align, rasterize labels and preprocess one raw recording.
Recording prepare_recording(const Recording& raw, const PipelineConfig& cfg, Diagnostics* diag = nullptr);

// Segments a prepared recording and extracts the full feature vector
// (all modalities) for every window.
FeatureTable recording_features(const Recording& prepared, const PipelineConfig& cfg, Diagnostics* diag = nullptr);

// prepare_recording + recording_features over a dataset, rows concatenated
// in input order. Up to cfg.experiment.jobs recordings run concurrently.
FeatureTable dataset_features(std::span<const Recording> raw, const PipelineConfig& cfg,
                              Diagnostics* diag = nullptr);

// Recording directories (those holding meta.json) under root, sorted by
// path; root itself counts when it holds meta.json. Throws NotFound when root
// is missing or holds no recording.
std::vector<std::filesystem::path> find_recordings(const std::filesystem::path& root);
std::vector<Recording> load_dataset(const std::filesystem::path& root);
// Writes each recording to root/<subject>/<task>/.
void save_dataset(std::span<const Recording> recordings, const std::filesystem::path& root);

}  // namespace fogkit
