#include "fogkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "fogkit/errors.hpp"

namespace fogkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Distribution code is written out so the stream does not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  double spare_{0.0};
  bool has_spare_{false};
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SubjectState {
  std::vector<Interval> episodes;  // world ms
  double walk_start_ms;
  double cadence_hz;
  double tremor_hz;

  // 0 standing, 1 walking, 2 FOG.
  int state(double t_ms) const {
    if (t_ms < walk_start_ms) return 0;
    for (const auto& e : episodes) {
      if (t_ms >= static_cast<double>(e.start_ms) && t_ms < static_cast<double>(e.end_ms)) return 2;
    }
    return 1;
  }
};

struct Subsystem {
  Modality modality;
  double rate_hz;
  std::int64_t offset_ms;
  std::int64_t t0_ms;
  std::size_t n;
};

ChannelDescriptor descriptor(std::string name, Modality m, double rate) {
  ChannelDescriptor d;
  d.name = std::move(name);
  d.modality = m;
  d.native_rate_hz = rate;
  if (d.name == "TP9" || d.name == "TP10") d.roles.reference = true;
  if (d.name == "IO") d.roles.eog = true;
  return d;
}

}  // namespace

const std::vector<std::string>& eeg_montage() {
  static const std::vector<std::string> names = {"FP1", "FP2", "F3",  "F4",  "C3",  "C4",  "P3",
                                                 "P4",  "O1",  "O2",  "F7",  "F8",  "P7",  "P8",
                                                 "Fz",  "Cz",  "Pz",  "FC1", "FC2", "CP1", "CP2",
                                                 "FC5", "FC6", "CP5", "CP6", "TP9", "TP10", "IO"};
  return names;
}

const std::vector<std::string>& emg_channel_names() {
  static const std::vector<std::string> names = {"RGastrocnemius", "LTibialisAnterior", "RTibialisAnterior"};
  return names;
}

std::vector<std::string> acc_channel_names() {
  std::vector<std::string> out;
  for (const char* sensor : {"LTibia", "RTibia", "Lumbar", "Wrist"}) {
    for (const char* axis : {"X", "Y", "Z"}) out.push_back(std::string(sensor) + "_" + axis);
  }
  return out;
}

std::vector<Recording> synth_dataset(const SynthParams& p, std::uint64_t seed) {
  if (p.subjects < 1) throw SpecError("synth needs at least one subject");
  if (!(p.duration_s > p.lead_in_s) || p.lead_in_s < 0.0) throw SpecError("synth duration must exceed the lead-in");
  if (p.episodes_per_subject < 0) throw SpecError("episode count must be non-negative");
  if (!(p.episode_min_s > 0.0) || p.episode_max_s < p.episode_min_s) throw SpecError("bad episode length range");
  for (double r : {p.eeg_rate_hz, p.emg_rate_hz, p.acc_rate_hz, p.sc_rate_hz}) {
    if (!(r > 0.0)) throw SpecError("synth rates must be positive");
  }
  if (p.max_clock_offset_ms < 0) throw SpecError("clock offset bound must be non-negative");

  // Episodes take at most 60% of their slot.
  const double walk_s = p.duration_s - p.lead_in_s;
  double max_len_s = p.episode_max_s;
  if (p.episodes_per_subject > 0) {
    max_len_s = std::min(max_len_s, 0.6 * walk_s / p.episodes_per_subject);
    if (p.episode_min_s > max_len_s) throw SpecError("episodes do not fit: lengthen the recording or shorten episodes");
  }

  std::vector<Recording> out;
  for (int s = 0; s < p.subjects; ++s) {
    Rng rng(mix(seed ^ mix(static_cast<std::uint64_t>(s) + 1)));
    SubjectState st;
    st.walk_start_ms = p.lead_in_s * 1000.0;
    st.cadence_hz = rng.uniform(0.8, 1.2);
    st.tremor_hz = rng.uniform(4.5, 6.5);
    if (p.episodes_per_subject > 0) {
      const double slot_ms = walk_s * 1000.0 / p.episodes_per_subject;
      for (int e = 0; e < p.episodes_per_subject; ++e) {
        const double len = rng.uniform(p.episode_min_s, max_len_s) * 1000.0;
        const double slack = slot_ms - len;
        const double start = st.walk_start_ms + e * slot_ms + rng.uniform(0.2, 0.8) * slack;
        st.episodes.push_back({std::llround(start), std::llround(start + len)});
      }
    }

    Recording rec;
    char id[16];
    std::snprintf(id, sizeof id, "S%02d", s + 1);
    rec.subject_id = id;
    rec.task_id = "task1";
    rec.label_track = make_label_track(st.episodes, "synth");

    // Each subsystem starts within 0.2 s of world zero and runs slightly past
    // the nominal end, so the shared span covers the full duration.
    auto subsystem = [&](Modality m, double rate) {
      Subsystem sub;
      sub.modality = m;
      sub.rate_hz = rate;
      sub.offset_ms = std::llround(rng.uniform(-1.0, 1.0) * static_cast<double>(p.max_clock_offset_ms));
      const std::int64_t world_start = std::llround(rng.uniform(0.0, 200.0));
      sub.t0_ms = world_start - sub.offset_ms;
      sub.n = static_cast<std::size_t>(std::ceil((p.duration_s + 0.5) * rate));
      rec.world_clock_offset_ms[m] = sub.offset_ms;
      return sub;
    };
    auto world_time = [](const Subsystem& sub, std::size_t k) {
      return static_cast<double>(sub.t0_ms + sub.offset_ms) + static_cast<double>(k) * (1000.0 / sub.rate_hz);
    };
    auto make_series = [&](const Subsystem& sub, const std::string& name) {
      TimeSeries ts;
      ts.channel = descriptor(name, sub.modality, sub.rate_hz);
      ts.t0_ms = sub.t0_ms;
      ts.rate_hz = sub.rate_hz;
      ts.samples.resize(sub.n);
      return ts;
    };

    // EEG: rhythms plus a common-mode component the mastoid reference removes
    // and 50 Hz line interference.
    {
      const Subsystem sub = subsystem(Modality::EEG, p.eeg_rate_hz);
      const double line_phase = rng.uniform(0.0, kTwoPi);
      std::vector<double> common(sub.n);
      for (auto& v : common) v = 0.5 * rng.normal();
      for (const auto& name : eeg_montage()) {
        TimeSeries ts = make_series(sub, name);
        const bool ref = name == "TP9" || name == "TP10";
        const double gain = rng.uniform(0.8, 1.2);
        double ph[5];
        for (double& v : ph) v = rng.uniform(0.0, kTwoPi);
        const double f[5] = {2.0, 6.0, 10.0, 20.0, 40.0};
        for (std::size_t k = 0; k < sub.n; ++k) {
          const double t_ms = world_time(sub, k);
          const double t = t_ms / 1000.0;
          double v = common[k] + 0.8 * std::sin(kTwoPi * 50.0 * t + line_phase);
          if (!ref) {
            const bool fog = st.state(t_ms) == 2;
            const double amp[5] = {1.0, fog ? 1.6 : 0.5, fog ? 0.4 : 1.3, 0.4, 0.2};
            double rhythm = 0.0;
            for (int b = 0; b < 5; ++b) rhythm += amp[b] * std::sin(kTwoPi * f[b] * t + ph[b]);
            v += gain * rhythm;
            if (name == "IO") v += 2.0 * std::exp(-std::pow(std::fmod(t, 4.0) - 2.0, 2) * 50.0);
          }
          ts.samples[k] = v + 0.3 * p.noise * rng.normal();
        }
        rec.series.push_back(std::move(ts));
      }
    }

    // EMG: broadband activity under a gait-locked envelope; FOG switches to
    // fast, weaker bursts at the tremor rate.
    {
      const Subsystem sub = subsystem(Modality::EMG, p.emg_rate_hz);
      const double line_phase = rng.uniform(0.0, kTwoPi);
      for (const auto& name : emg_channel_names()) {
        TimeSeries ts = make_series(sub, name);
        const double ph = rng.uniform(0.0, kTwoPi);
        for (std::size_t k = 0; k < sub.n; ++k) {
          const double t_ms = world_time(sub, k);
          const double t = t_ms / 1000.0;
          double env = 0.1;
          switch (st.state(t_ms)) {
            case 1: {
              const double b = std::max(0.0, std::sin(kTwoPi * st.cadence_hz * t + ph));
              env = 0.3 + 1.2 * b * b;
              break;
            }
            case 2: {
              const double b = std::max(0.0, std::sin(kTwoPi * st.tremor_hz * t + ph));
              env = 0.2 + 0.4 * b * b;
              break;
            }
            default:
              break;
          }
          ts.samples[k] = env * rng.normal() + 0.3 * std::sin(kTwoPi * 50.0 * t + line_phase) +
                          0.05 * p.noise * rng.normal();
        }
        rec.series.push_back(std::move(ts));
      }
    }

    // ACC: gait oscillation at the cadence and its second harmonic while
    // walking, tremor-band oscillation during FOG, gravity on Z.
    {
      const Subsystem sub = subsystem(Modality::ACC, p.acc_rate_hz);
      for (const auto& name : acc_channel_names()) {
        TimeSeries ts = make_series(sub, name);
        const double ph1 = rng.uniform(0.0, kTwoPi), ph2 = rng.uniform(0.0, kTwoPi), ph3 = rng.uniform(0.0, kTwoPi);
        const double gain = rng.uniform(0.7, 1.3);
        const double gravity = name.back() == 'Z' ? 1.0 : 0.0;
        for (std::size_t k = 0; k < sub.n; ++k) {
          const double t_ms = world_time(sub, k);
          const double t = t_ms / 1000.0;
          const double gait = std::sin(kTwoPi * st.cadence_hz * t + ph1) + 0.4 * std::sin(kTwoPi * 2.0 * st.cadence_hz * t + ph2);
          const double tremor = std::sin(kTwoPi * st.tremor_hz * t + ph3);
          double v = 0.0;
          switch (st.state(t_ms)) {
            case 1: v = gait; break;
            case 2: v = 0.15 * gait + 0.8 * tremor; break;
            default: break;
          }
          ts.samples[k] = gravity + gain * v + 0.05 * p.noise * rng.normal();
        }
        rec.series.push_back(std::move(ts));
      }
    }

    // SC: slow drift with a small rise during FOG.
    {
      const Subsystem sub = subsystem(Modality::SC, p.sc_rate_hz);
      TimeSeries ts = make_series(sub, "SC");
      double level = rng.uniform(1.5, 3.0);
      for (std::size_t k = 0; k < sub.n; ++k) {
        const double t_ms = world_time(sub, k);
        level += 0.0005 * rng.normal();
        ts.samples[k] = level + (st.state(t_ms) == 2 ? 0.1 : 0.0) + 0.01 * p.noise * rng.normal();
      }
      rec.series.push_back(std::move(ts));
    }

    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace fogkit
