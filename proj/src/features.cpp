#include "fogkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fogkit/errors.hpp"
#include "fogkit/recording_io.hpp"

namespace fogkit {

FeatureMask parse_feature_mask(std::string_view text) {
  FeatureMask mask = FeatureMask::None;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t plus = text.find('+', start);
    if (plus == std::string_view::npos) plus = text.size();
    std::string part(text.substr(start, plus - start));
    std::transform(part.begin(), part.end(), part.begin(), [](unsigned char c) { return std::toupper(c); });
    if (part == "EEG") mask = mask | FeatureMask::EEG;
    else if (part == "EMG") mask = mask | FeatureMask::EMG;
    else if (part == "ACC") mask = mask | FeatureMask::ACC;
    else if (part == "ALL") mask = mask | FeatureMask::All;
    else throw SpecError("unknown feature mask '" + std::string(text) + "'");
    start = plus + 1;
  }
  return mask;
}

std::string to_string(FeatureMask mask) {
  if (mask == FeatureMask::All) return "ALL";
  std::string out;
  for (auto [bit, name] : {std::pair{FeatureMask::EEG, "EEG"}, std::pair{FeatureMask::EMG, "EMG"},
                           std::pair{FeatureMask::ACC, "ACC"}}) {
    if (has(mask, bit)) out += out.empty() ? name : std::string("+") + name;
  }
  return out.empty() ? "NONE" : out;
}

void FeatureVector::append(const FeatureVector& other) {
  values.insert(values.end(), other.values.begin(), other.values.end());
  manifest.insert(manifest.end(), other.manifest.begin(), other.manifest.end());
  mask = mask | other.mask;
}

EmgFeatures emg_features(std::span<const double> x, double deadband) {
  EmgFeatures f;
  const std::size_t n = x.size();
  if (n == 0) return f;
  double abs_sum = 0.0;
  for (double v : x) abs_sum += std::abs(v);
  f.mav = abs_sum / static_cast<double>(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double diff = std::abs(x[k] - x[k + 1]);
    f.wl += diff;
    if (x[k] * x[k + 1] < 0.0 && diff > deadband) f.zc += 1.0;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double left = x[k] - x[k - 1];
    const double right = x[k] - x[k + 1];
    if (left * right > 0.0 && std::abs(left) > deadband && std::abs(right) > deadband) f.ssc += 1.0;
  }
  return f;
}

std::array<double, kRhythmCount> rhythm_energies(std::span<const double> x) {
  constexpr std::size_t block = std::size_t{1} << kRhythmLevels;
  if (x.size() < block) throw LengthError("rhythm energies need at least 64 samples");
  const std::size_t padded = (x.size() + block - 1) / block * block;
  std::vector<double> buf(padded, 0.0);
  std::copy(x.begin(), x.end(), buf.begin());
  const DwtCoefficients c = dwt(buf, kRhythmLevels);
  std::array<double, kRhythmCount> e{};
  e[static_cast<std::size_t>(Rhythm::Delta)] = wavelet_energy(c.approx);
  e[static_cast<std::size_t>(Rhythm::Theta)] = wavelet_energy(c.details[5]);
  e[static_cast<std::size_t>(Rhythm::Alpha)] = wavelet_energy(c.details[4]);
  e[static_cast<std::size_t>(Rhythm::Beta)] = wavelet_energy(c.details[3]);
  e[static_cast<std::size_t>(Rhythm::Gamma)] = wavelet_energy(c.details[2]);
  return e;
}

FeatureVector eeg_features(std::span<const ChannelView> channels, const FeatureConfig& cfg, Diagnostics* diag) {
  if (cfg.eeg_channels != 0 && channels.size() != cfg.eeg_channels) {
    throw ChannelError("EEG features expect " + std::to_string(cfg.eeg_channels) + " channels, got " +
                       std::to_string(channels.size()));
  }
  FeatureVector fv;
  fv.mask = FeatureMask::EEG;
  for (const auto& ch : channels) {
    const auto e = rhythm_energies(ch.samples);
    const std::string prefix = "EEG:" + ch.channel->name + ":";
    fv.values.push_back(e[static_cast<std::size_t>(Rhythm::Delta)]);
    fv.values.push_back(e[static_cast<std::size_t>(Rhythm::Theta)]);
    fv.values.push_back(e[static_cast<std::size_t>(Rhythm::Alpha)]);
    fv.values.push_back(total_wavelet_entropy(e, diag));
    for (const char* name : {"WE_delta", "WE_theta", "WE_alpha", "TWE"}) fv.manifest.push_back(prefix + name);
  }
  return fv;
}

FeatureVector emg_block(std::span<const ChannelView> channels, const FeatureConfig& cfg) {
  if (cfg.emg_channels != 0 && channels.size() != cfg.emg_channels) {
    throw ChannelError("EMG features expect " + std::to_string(cfg.emg_channels) + " channels, got " +
                       std::to_string(channels.size()));
  }
  FeatureVector fv;
  fv.mask = FeatureMask::EMG;
  for (const auto& ch : channels) {
    const EmgFeatures f = emg_features(ch.samples, cfg.emg_deadband);
    fv.values.insert(fv.values.end(), {f.mav, f.zc, f.ssc, f.wl});
    const std::string prefix = "EMG:" + ch.channel->name + ":";
    for (const char* name : {"MAV", "ZC", "SSC", "WL"}) fv.manifest.push_back(prefix + name);
  }
  return fv;
}

FeatureVector acc_features(std::span<const ChannelView> channels, double rate_hz, const FeatureConfig& cfg,
                           Diagnostics* diag) {
  if (cfg.acc_channels.empty()) throw ChannelError("no ACC feature channels configured");
  FeatureVector fv;
  fv.mask = FeatureMask::ACC;
  for (const auto& name : cfg.acc_channels) {
    auto it = std::find_if(channels.begin(), channels.end(),
                           [&](const ChannelView& cv) { return cv.channel->name == name; });
    if (it == channels.end()) throw ChannelError("ACC feature channel " + name + " not present");
    const auto x = it->samples;
    const double se = sample_entropy(x, cfg.sample_entropy, diag);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(1, x.size()));
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(std::max<std::size_t>(1, x.size())));
    const Periodogram p = periodogram(x, rate_hz);
    fv.values.insert(fv.values.end(), {se, sd, p.band_power(cfg.tp_lo_hz, cfg.tp_hi_hz),
                                       freezing_index(p, cfg.freezing)});
    const std::string prefix = "ACC:" + name + ":";
    for (const char* n : {"SE", "STD", "TP", "FI"}) fv.manifest.push_back(prefix + n);
  }
  return fv;
}

FeatureVector extract_features(const Segment& seg, FeatureMask mask, double rate_hz, const FeatureConfig& cfg,
                               Diagnostics* diag) {
  if (mask == FeatureMask::None) throw SpecError("feature mask is empty");
  FeatureVector out;
  if (has(mask, FeatureMask::EEG)) out.append(eeg_features(seg.of(Modality::EEG), cfg, diag));
  if (has(mask, FeatureMask::EMG)) out.append(emg_block(seg.of(Modality::EMG), cfg));
  if (has(mask, FeatureMask::ACC)) out.append(acc_features(seg.of(Modality::ACC), rate_hz, cfg, diag));
  return out;
}

void FeatureTable::append(const FeatureTable& other) {
  if (rows.empty() && manifest.empty()) manifest = other.manifest;
  if (other.manifest != manifest) throw FormatError("feature tables have different manifests");
  subject.insert(subject.end(), other.subject.begin(), other.subject.end());
  task.insert(task.end(), other.task.begin(), other.task.end());
  start_index.insert(start_index.end(), other.start_index.begin(), other.start_index.end());
  label.insert(label.end(), other.label.begin(), other.label.end());
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

FeatureTable FeatureTable::select(FeatureMask mask) const {
  if (mask == FeatureMask::None) throw SpecError("feature mask is empty");
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < manifest.size(); ++c) {
    const std::string_view name = manifest[c];
    const std::string_view mod = name.substr(0, name.find(':'));
    if ((mod == "EEG" && has(mask, FeatureMask::EEG)) || (mod == "EMG" && has(mask, FeatureMask::EMG)) ||
        (mod == "ACC" && has(mask, FeatureMask::ACC))) {
      cols.push_back(c);
    }
  }
  if (cols.empty()) throw SpecError("feature table has no columns for mask " + to_string(mask));
  FeatureTable out;
  out.subject = subject;
  out.task = task;
  out.start_index = start_index;
  out.label = label;
  for (std::size_t c : cols) out.manifest.push_back(manifest[c]);
  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (std::size_t c : cols) r.push_back(row[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

FeatureTable FeatureTable::subset(std::span<const std::size_t> indices) const {
  FeatureTable out;
  out.manifest = manifest;
  for (std::size_t i : indices) {
    out.subject.push_back(subject[i]);
    out.task.push_back(task[i]);
    out.start_index.push_back(start_index[i]);
    out.label.push_back(label[i]);
    out.rows.push_back(rows[i]);
  }
  return out;
}

FeatureTable extract_feature_table(std::span<const Segment> segments, FeatureMask mask, double rate_hz,
                                   const FeatureConfig& cfg, Diagnostics* diag) {
  FeatureTable t;
  for (const auto& seg : segments) {
    FeatureVector fv = extract_features(seg, mask, rate_hz, cfg, diag);
    if (t.rows.empty()) t.manifest = fv.manifest;
    t.subject.push_back(seg.subject_id);
    t.task.push_back(seg.task_id);
    t.start_index.push_back(seg.start_index);
    t.label.push_back(seg.label);
    t.rows.push_back(std::move(fv.values));
  }
  return t;
}

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  out << "subject,task,start_index,label";
  for (const auto& name : table.manifest) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.subject[i] << ',' << table.task[i] << ',' << table.start_index[i] << ',' << table.label[i];
    for (double v : table.rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureTable read_feature_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open " + file.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    return f;
  };
  std::string line;
  if (!std::getline(in, line)) throw FormatError(file.string() + ": empty feature file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "subject" || header[1] != "task" || header[2] != "start_index" ||
      header[3] != "label") {
    throw FormatError(file.string() + ": header must start with subject,task,start_index,label");
  }
  FeatureTable t;
  t.manifest.assign(header.begin() + 4, header.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) {
      throw FormatError(file.string() + " line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    try {
      t.subject.push_back(f[0]);
      t.task.push_back(f[1]);
      t.start_index.push_back(std::stoull(f[2]));
      const int lab = std::stoi(f[3]);
      if (lab != 1 && lab != -1) throw FormatError("label must be +1 or -1");
      t.label.push_back(lab);
      std::vector<double> row;
      row.reserve(f.size() - 4);
      for (std::size_t c = 4; c < f.size(); ++c) {
        std::size_t used = 0;
        const double v = std::stod(f[c], &used);
        if (used != f[c].size() || !std::isfinite(v)) throw FormatError("bad value");
        row.push_back(v);
      }
      t.rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw FormatError(file.string() + " line " + std::to_string(lineno) + ": malformed field");
    } catch (const FormatError& e) {
      throw FormatError(file.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

}  // namespace fogkit
