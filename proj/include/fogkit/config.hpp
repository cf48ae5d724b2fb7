#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fogkit/align.hpp"
#include "fogkit/experiment.hpp"
#include "fogkit/features.hpp"
#include "fogkit/preprocess.hpp"
#include "fogkit/segment.hpp"
#include "fogkit/synth.hpp"
#include "json.hpp"

namespace fogkit {

// Every tunable of the pipeline. Merge order is defaults <- config file <-
// command-line flags.
struct PipelineConfig {
  AlignmentPlan align;
  TaskStartOptions task_start;
  PreprocessConfig preprocess;
  WindowSpec window;
  FeatureConfig features;
  ExperimentConfig experiment;
  SynthParams synth;
  std::string log_level{"info"};
};

// Dotted configuration keys in canonical order.
const std::vector<std::string>& config_keys();

// Sets one key. Throws SpecError on an unknown key or a value of the wrong
// shape.
void set_config_value(PipelineConfig& cfg, const std::string& key, const nlohmann::json& value);

// Applies a JSON object whose keys are dotted ("eeg.band") or nested
// ({"eeg": {"band": ...}}); arrays are leaf values.
void merge_config(PipelineConfig& cfg, const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& file, PipelineConfig base = {});

// Flat object over config_keys(); merge_config(defaults, to_json(c)) == c.
nlohmann::json config_to_json(const PipelineConfig& cfg);

// Throws SpecError when any component invariant fails.
void check_config(const PipelineConfig& cfg);

}  // namespace fogkit
