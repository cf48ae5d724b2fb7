#include "fogkit/recording_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fogkit/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fogkit {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

RoleFlags parse_flags(const json& flags, const std::string& channel) {
  RoleFlags r;
  for (const auto& f : flags) {
    const auto s = f.get<std::string>();
    if (s == "reference") r.reference = true;
    else if (s == "eog") r.eog = true;
    else if (s == "excluded") r.excluded = true;
    else throw FormatError("channel " + channel + ": unknown role flag '" + s + "'");
  }
  return r;
}

json flags_json(const RoleFlags& r) {
  json a = json::array();
  if (r.reference) a.push_back("reference");
  if (r.eog) a.push_back("eog");
  if (r.excluded) a.push_back("excluded");
  return a;
}

struct SubsystemMeta {
  Modality modality;
  double rate_hz;
  std::int64_t t0_ms;
  std::int64_t offset_ms;
  std::vector<ChannelDescriptor> channels;
};

void load_subsystem_csv(const fs::path& file, const SubsystemMeta& meta, Recording& r) {
  const std::string text = read_file(file);
  const auto lines = lines_of(text);
  const std::string fname = file.filename().string();
  if (lines.empty()) throw FormatError(fname + ": missing header row");

  const auto header = split_csv(lines[0]);
  if (header.empty() || trim(header[0]) != "timestamp_ms") {
    throw FormatError(fname + ": first header column must be timestamp_ms");
  }
  if (header.size() != meta.channels.size() + 1) {
    throw FormatError(fname + ": header declares " + std::to_string(header.size() - 1) +
                      " channels, meta.json declares " + std::to_string(meta.channels.size()));
  }
  for (std::size_t c = 0; c < meta.channels.size(); ++c) {
    if (trim(header[c + 1]) != meta.channels[c].name) {
      throw FormatError(fname + ": header column " + std::to_string(c + 1) + " is '" +
                        std::string(trim(header[c + 1])) + "', meta.json says '" +
                        meta.channels[c].name + "'");
    }
  }

  const std::size_t nch = meta.channels.size();
  std::vector<TimeSeries> out(nch);
  for (std::size_t c = 0; c < nch; ++c) {
    out[c].channel = meta.channels[c];
    out[c].rate_hz = meta.rate_hz;
    out[c].t0_ms = meta.t0_ms;
    out[c].samples.reserve(lines.size());
  }

  const double period = 1000.0 / meta.rate_hz;
  std::int64_t prev_ts = 0;
  std::size_t gaps = 0;
  std::size_t k = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv(lines[li]);
    const std::string where = fname + " line " + std::to_string(li + 1);
    if (fields.size() != nch + 1) {
      throw FormatError(where + ": expected " + std::to_string(nch + 1) + " fields, found " +
                        std::to_string(fields.size()));
    }
    std::int64_t ts = 0;
    if (!parse_int(fields[0], ts)) throw FormatError(where + ": bad timestamp");
    if (k == 0) {
      if (ts != meta.t0_ms) {
        throw FormatError(where + ": first timestamp " + std::to_string(ts) +
                          " disagrees with meta.json t0_ms " + std::to_string(meta.t0_ms));
      }
    } else {
      if (ts <= prev_ts) {
        throw IntegrityError(where + ": non-monotonic timestamp " + std::to_string(ts) +
                             " after " + std::to_string(prev_ts));
      }
      if (static_cast<double>(ts - prev_ts) > 1.5 * period + 0.5) ++gaps;
    }
    prev_ts = ts;
    for (std::size_t c = 0; c < nch; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c + 1], v)) {
        throw FormatError(where + ": bad value in column " + meta.channels[c].name);
      }
      if (!std::isfinite(v)) {
        throw IntegrityError("channel " + meta.channels[c].name + " sample " + std::to_string(k) +
                             ": non-finite value");
      }
      out[c].samples.push_back(v);
    }
    ++k;
  }
  for (auto& ts : out) {
    ts.gap_count = gaps;
    r.series.push_back(std::move(ts));
  }
}

}  // namespace

LabelTrack load_labels(const fs::path& file) {
  const std::string text = read_file(file);
  std::vector<Interval> intervals;
  const auto lines = lines_of(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto line = trim(lines[li]);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (li == 0 && trim(fields[0]) == "start_ms") continue;
    Interval iv;
    if (fields.size() != 2 || !parse_int(fields[0], iv.start_ms) || !parse_int(fields[1], iv.end_ms)) {
      throw FormatError(file.filename().string() + " line " + std::to_string(li + 1) +
                        ": expected start_ms,end_ms");
    }
    intervals.push_back(iv);
  }
  return make_label_track(std::move(intervals), file.stem().string());
}

void save_labels(const LabelTrack& track, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  out << "start_ms,end_ms\n";
  for (const auto& iv : track.intervals) out << iv.start_ms << ',' << iv.end_ms << '\n';
}

Recording load_recording(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) throw FormatError("missing metadata file " + meta_path.string());

  json meta;
  try {
    meta = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }

  Recording r;
  std::vector<SubsystemMeta> subsystems;
  try {
    if (meta.value("format_version", kFormatVersion) != kFormatVersion) {
      throw FormatError(meta_path.string() + ": unsupported format_version");
    }
    r.subject_id = meta.at("subject_id").get<std::string>();
    r.task_id = meta.at("task_id").get<std::string>();
    r.aligned = meta.value("aligned", false);
    r.preprocessed = meta.value("preprocessed", false);
    r.ica_cleaned = meta.value("ica_cleaned", false);
    for (const auto& [key, sub] : meta.at("subsystems").items()) {
      SubsystemMeta sm;
      sm.modality = parse_modality(key);
      sm.rate_hz = sub.at("rate_hz").get<double>();
      if (!(sm.rate_hz > 0.0)) throw FormatError(key + ": rate_hz must be positive");
      sm.t0_ms = sub.at("t0_ms").get<std::int64_t>();
      sm.offset_ms = sub.value("world_clock_offset_ms", std::int64_t{0});
      for (const auto& ch : sub.at("channels")) {
        ChannelDescriptor d;
        d.name = ch.at("name").get<std::string>();
        d.modality = sm.modality;
        d.native_rate_hz = ch.value("native_rate_hz", sm.rate_hz);
        d.roles = parse_flags(ch.value("flags", json::array()), d.name);
        sm.channels.push_back(std::move(d));
      }
      subsystems.push_back(std::move(sm));
    }
  } catch (const json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }

  // Canonical order regardless of key order in the file.
  std::sort(subsystems.begin(), subsystems.end(),
            [](const SubsystemMeta& a, const SubsystemMeta& b) { return a.modality < b.modality; });
  for (const auto& sm : subsystems) {
    const fs::path csv = dir / (std::string(file_stem(sm.modality)) + ".csv");
    if (!fs::exists(csv)) throw FormatError("missing data file " + csv.string());
    r.world_clock_offset_ms[sm.modality] = sm.offset_ms;
    load_subsystem_csv(csv, sm, r);
  }

  const fs::path labels = dir / "labels.csv";
  if (fs::exists(labels)) {
    r.label_track = load_labels(labels);
    r.label_track->annotator_id = meta.value("annotator_id", std::string{});
  }

  r.validation = validate_recording(r);
  return r;
}

void save_recording(const Recording& r, const fs::path& dir) {
  fs::create_directories(dir);
  json meta;
  meta["format_version"] = kFormatVersion;
  meta["subject_id"] = r.subject_id;
  meta["task_id"] = r.task_id;
  meta["aligned"] = r.aligned;
  meta["preprocessed"] = r.preprocessed;
  meta["ica_cleaned"] = r.ica_cleaned;
  if (r.label_track && !r.label_track->annotator_id.empty()) meta["annotator_id"] = r.label_track->annotator_id;
  json subs = json::object();

  for (Modality m : kAllModalities) {
    const auto chans = r.channels_of(m);
    if (chans.empty()) continue;
    const TimeSeries& first = *chans.front();
    for (const TimeSeries* ts : chans) {
      if (ts->rate_hz != first.rate_hz || ts->t0_ms != first.t0_ms || ts->size() != first.size()) {
        throw FormatError(std::string(to_string(m)) +
                          " channels must share rate, t0 and length to be saved as one subsystem");
      }
    }
    json sub;
    sub["rate_hz"] = first.rate_hz;
    sub["t0_ms"] = first.t0_ms;
    sub["world_clock_offset_ms"] = r.offset_ms(m);
    json channels = json::array();
    for (const TimeSeries* ts : chans) {
      json ch;
      ch["name"] = ts->channel.name;
      ch["flags"] = flags_json(ts->channel.roles);
      if (ts->channel.native_rate_hz != first.rate_hz) ch["native_rate_hz"] = ts->channel.native_rate_hz;
      channels.push_back(std::move(ch));
    }
    sub["channels"] = std::move(channels);
    subs[std::string(file_stem(m))] = std::move(sub);

    std::ofstream out(dir / (std::string(file_stem(m)) + ".csv"), std::ios::binary);
    if (!out) throw FormatError("cannot write into " + dir.string());
    std::string line = "timestamp_ms";
    for (const TimeSeries* ts : chans) line += "," + ts->channel.name;
    out << line << '\n';
    for (std::size_t k = 0; k < first.size(); ++k) {
      line = std::to_string(std::llround(first.time_ms(k)));
      for (const TimeSeries* ts : chans) {
        line += ',';
        line += format_double(ts->samples[k]);
      }
      out << line << '\n';
    }
  }
  meta["subsystems"] = std::move(subs);
  std::ofstream mout(dir / "meta.json", std::ios::binary);
  mout << meta.dump(2) << '\n';

  if (r.label_track) save_labels(*r.label_track, dir / "labels.csv");
}

ValidationReport validate_recording(const Recording& r) {
  ValidationReport rep;
  std::set<std::string> names;
  double longest = 0.0;
  for (const auto& ts : r.series) longest = std::max(longest, ts.rate_hz > 0 ? ts.duration_s() : 0.0);

  for (const auto& ts : r.series) {
    ChannelSummary s;
    s.name = ts.channel.name;
    s.modality = ts.channel.modality;
    s.rate_hz = ts.rate_hz;
    s.gap_count = ts.gap_count;
    if (!names.insert(ts.channel.name).second) {
      rep.issues.push_back({Severity::Error, ts.channel.name, -1, "duplicate channel name"});
    }
    if (!(ts.rate_hz > 0.0)) {
      rep.issues.push_back({Severity::Error, ts.channel.name, -1, "sample rate must be positive"});
      rep.channels.push_back(s);
      continue;
    }
    s.duration_s = ts.duration_s();
    std::int64_t first_bad = -1;
    for (std::size_t k = 0; k < ts.samples.size(); ++k) {
      if (!std::isfinite(ts.samples[k])) {
        if (s.nan_count++ == 0) first_bad = static_cast<std::int64_t>(k);
      }
    }
    if (s.nan_count > 0) {
      rep.issues.push_back({Severity::Error, ts.channel.name, first_bad,
                            std::to_string(s.nan_count) + " non-finite sample(s), first at index " +
                                std::to_string(first_bad)});
    }
    if (ts.samples.empty()) {
      rep.issues.push_back({Severity::Warning, ts.channel.name, -1, "channel has no samples"});
    } else if (longest - s.duration_s > 1.0) {
      rep.issues.push_back({Severity::Warning, ts.channel.name, -1,
                            "duration " + format_double(s.duration_s) + " s differs from longest sibling (" +
                                format_double(longest) + " s) by more than 1 s"});
    }
    if (ts.gap_count > 0) {
      rep.issues.push_back({Severity::Warning, ts.channel.name, -1,
                            std::to_string(ts.gap_count) + " timestamp gap(s)"});
    }
    rep.channels.push_back(std::move(s));
  }
  if (r.labels && !r.series.empty() && r.labels->size() != r.aligned_length()) {
    rep.issues.push_back({Severity::Error, "", -1, "label count differs from aligned sample count"});
  }
  return rep;
}

}  // namespace fogkit
