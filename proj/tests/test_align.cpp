#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fogkit/align.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/synth.hpp"
#include "support.hpp"

using namespace fogkit;
using testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid_times(double t0, double period, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + static_cast<double>(k) * period;
  return t;
}

Recording two_subsystems(std::size_t acc_n, std::int64_t acc_t0, std::size_t sc_n, std::int64_t sc_t0) {
  Gen g(4);
  Recording r;
  r.subject_id = "S01";
  r.task_id = "t";
  r.series.push_back(testing::series("LTibia_X", Modality::ACC, 500.0, acc_t0, g.normals(acc_n)));
  r.series.push_back(testing::series("SC", Modality::SC, 500.0, sc_t0, g.normals(sc_n)));
  return r;
}

}  // namespace

TEST_CASE("cubic resampling of a 2 Hz sine from 1000 Hz to a 500 Hz grid") {
  const auto src = testing::series("x", Modality::EEG, 1000.0, 0, testing::sine(2000, 2.0, 1000.0));
  const auto targets = grid_times(0.0, 2.0, 1000);
  const auto out = cubic_resample(src, targets);
  REQUIRE(out.size() == 1000);
  CHECK(out.rate_hz == doctest::Approx(500.0));
  double worst = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    worst = std::max(worst, std::abs(out.samples[j] - std::sin(2.0 * kPi * 2.0 * targets[j] / 1000.0)));
  }
  CHECK(worst < 1e-3);

  // Off-knot targets as well.
  const auto mid = grid_times(0.5, 2.0, 999);
  const auto out_mid = cubic_resample(src, mid);
  for (std::size_t j = 0; j < mid.size(); ++j) {
    REQUIRE(std::abs(out_mid.samples[j] - std::sin(2.0 * kPi * 2.0 * mid[j] / 1000.0)) < 1e-3);
  }
}

TEST_CASE("resampling at the knots returns the input exactly") {
  Gen g(2);
  const auto src = testing::series("x", Modality::EEG, 1000.0, 17, g.normals(300));
  const auto out = cubic_resample(src, grid_times(17.0, 1.0, 300));
  CHECK(out.samples == src.samples);
  CHECK(out.t0_ms == 17);
}

TEST_CASE("cubic resampling needs four samples") {
  const auto src = testing::series("x", Modality::EEG, 1000.0, 0, {1.0, 2.0, 3.0});
  const std::vector<double> t{0.5};
  CHECK_THROWS_AS(cubic_resample(src, t), InsufficientData);
}

TEST_CASE("cubic polynomials are reproduced exactly") {
  auto poly = [](double s) { return s * s * s - 2.0 * s * s + 1.0; };
  std::vector<double> v(3000);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = poly(static_cast<double>(k) / 1000.0);
  const auto src = testing::series("x", Modality::EEG, 1000.0, 0, v);
  Gen g(8);
  std::vector<double> targets(500);
  for (auto& t : targets) t = g.uniform(0.0, 2999.0);
  const auto out = cubic_resample(src, targets);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double want = poly(targets[j] / 1000.0);
    REQUIRE(out.samples[j] == doctest::Approx(want).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("targets outside the source span") {
  const auto src = testing::series("x", Modality::EEG, 1000.0, 0, {1.0, 2.0, 3.0, 4.0, 5.0});
  const std::vector<double> t{-1.0, 2.0, 6.0};
  CHECK_THROWS_AS(cubic_resample(src, t), RangeError);
  const auto held = cubic_resample(src, t, true);
  CHECK(held.samples == std::vector<double>{1.0, 3.0, 5.0});
}

TEST_CASE("downsampling 1000 Hz to 500 Hz") {
  SUBCASE("DC passes unchanged") {
    const auto out = downsample_1000_to_500(testing::series("x", Modality::EEG, 1000.0, 0, std::vector<double>(4000, 3.0)));
    REQUIRE(out.size() == 2000);
    CHECK(out.rate_hz == 500.0);
    for (std::size_t k = 200; k < 1800; ++k) REQUIRE(out.samples[k] == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("10 Hz keeps its amplitude") {
    const auto out = downsample_1000_to_500(testing::series("x", Modality::EEG, 1000.0, 0, testing::sine(6000, 10.0, 1000.0)));
    CHECK(testing::tone_amplitude(out.samples, 10.0, 500.0, 500, 2500) == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("400 Hz is rejected") {
    const auto in = testing::sine(6000, 400.0, 1000.0);
    const auto out = downsample_1000_to_500(testing::series("x", Modality::EEG, 1000.0, 0, in));
    CHECK(testing::rms(out.samples, 500, 2500) < 0.05 * testing::rms(in, 1000, 5000));
  }
  SUBCASE("wrong input rate") {
    CHECK_THROWS_AS(downsample_1000_to_500(testing::series("x", Modality::EEG, 500.0, 0, std::vector<double>(100))),
                    RateError);
  }
}

TEST_CASE("identical clocks and rates align to the trimmed input") {
  const Recording r = two_subsystems(1000, 0, 1000, 100);
  const Recording a = align_recording(r);
  REQUIRE(a.series.size() == 2);
  const auto& acc = *a.find("LTibia_X");
  const auto& sc = *a.find("SC");
  // Overlap is [100, 1998] ms: ACC samples 50..999, SC samples 0..949.
  REQUIRE(acc.size() == 950);
  REQUIRE(sc.size() == 950);
  CHECK(acc.t0_ms == 100);
  for (std::size_t k = 0; k < 950; ++k) {
    REQUIRE(acc.samples[k] == r.series[0].samples[k + 50]);
    REQUIRE(sc.samples[k] == r.series[1].samples[k]);
  }
  CHECK(a.aligned);
}

TEST_CASE("a step at world time 5 s lines up across subsystems") {
  Recording r;
  r.subject_id = "S01";
  r.task_id = "t";
  std::vector<double> eeg(10000), acc(5000);
  // EEG clock reads 250 ms behind the world clock.
  for (std::size_t k = 0; k < eeg.size(); ++k) eeg[k] = static_cast<double>(k) + 250.0 >= 5000.0 ? 1.0 : 0.0;
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = 2.0 * static_cast<double>(k) >= 5000.0 ? 1.0 : 0.0;
  r.series.push_back(testing::series("Cz", Modality::EEG, 1000.0, 0, eeg));
  r.series.push_back(testing::series("LTibia_X", Modality::ACC, 500.0, 0, acc));
  r.world_clock_offset_ms[Modality::EEG] = 250;
  const Recording a = align_recording(r);
  auto crossing = [](const TimeSeries& ts) {
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (ts.samples[k] >= 0.5) return static_cast<double>(k);
    }
    return -1.0;
  };
  const double e = crossing(*a.find("Cz"));
  const double c = crossing(*a.find("LTibia_X"));
  CHECK(c >= 0.0);
  CHECK(std::abs(e - c) <= 1.0);
  CHECK(a.find("LTibia_X")->time_ms(static_cast<std::size_t>(c)) == doctest::Approx(5000.0));
}

TEST_CASE("disjoint subsystem ranges") {
  const Recording r = two_subsystems(100, 0, 100, 10000);
  CHECK_THROWS_AS(align_recording(r), AlignmentError);
}

TEST_CASE("a missing master subsystem") {
  Recording r = two_subsystems(100, 0, 100, 0);
  AlignmentPlan plan;
  plan.master = Modality::EMG;
  CHECK_THROWS_AS(align_recording(r, plan), AlignmentError);
}

TEST_CASE("alignment is idempotent") {
  SynthParams p;
  p.subjects = 1;
  p.duration_s = 12.0;
  p.episodes_per_subject = 1;
  p.episode_min_s = 2.0;
  p.episode_max_s = 3.0;
  const auto data = synth_dataset(p, 5);
  const Recording once = align_recording(data.front());
  const Recording twice = align_recording(once);
  REQUIRE(once.series.size() == twice.series.size());
  for (std::size_t c = 0; c < once.series.size(); ++c) {
    REQUIRE(once.series[c].size() == twice.series[c].size());
    CHECK(once.series[c].t0_ms == twice.series[c].t0_ms);
    for (std::size_t k = 0; k < once.series[c].size(); ++k) {
      REQUIRE(std::abs(once.series[c].samples[k] - twice.series[c].samples[k]) <= 1e-12);
    }
  }
  CHECK(*once.labels == *twice.labels);
}

TEST_CASE("every aligned series shares one rate and length") {
  SynthParams p;
  p.subjects = 1;
  p.duration_s = 12.0;
  p.episodes_per_subject = 1;
  p.episode_min_s = 2.0;
  p.episode_max_s = 3.0;
  const Recording a = align_recording(synth_dataset(p, 6).front());
  for (const auto& ts : a.series) {
    CHECK(ts.rate_hz == 500.0);
    CHECK(ts.size() == a.aligned_length());
    CHECK(ts.t0_ms == a.series.front().t0_ms);
  }
  REQUIRE(a.labels);
  CHECK(a.labels->size() == a.aligned_length());
}

TEST_CASE("task start detection") {
  Gen g(30);
  const double fs = 500.0;
  auto base = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = 1.0 + 0.01 * g.normal();
    return v;
  };
  SUBCASE("three bursts at 30 s") {
    auto v = base(30000);
    for (double onset : {30.0, 30.8, 31.6}) {
      const auto k0 = static_cast<std::size_t>(onset * fs);
      for (std::size_t k = 0; k < 100; ++k) v[k0 + k] += 2.0 * std::sin(2.0 * kPi * 3.0 * static_cast<double>(k) / fs);
    }
    const double t = detect_task_start(testing::series("mag", Modality::ACC, fs, 0, v));
    CHECK(t >= 29500.0);
    CHECK(t <= 30500.0);
  }
  SUBCASE("all-zero signal") {
    CHECK_THROWS_AS(detect_task_start(testing::series("mag", Modality::ACC, fs, 0, std::vector<double>(20000, 0.0))),
                    NotFound);
  }
  SUBCASE("burst at sample 0") {
    auto v = base(20000);
    for (std::size_t k = 0; k < 100; ++k) v[k] += k % 2 == 0 ? 3.0 : -3.0;
    CHECK(detect_task_start(testing::series("mag", Modality::ACC, fs, 420, v)) == 420.0);
  }
}

TEST_CASE("ACC magnitude") {
  const auto x = testing::series("x", Modality::ACC, 500.0, 0, {3.0, 0.0});
  const auto y = testing::series("y", Modality::ACC, 500.0, 0, {4.0, 0.0});
  const auto z = testing::series("z", Modality::ACC, 500.0, 0, {0.0, -2.0});
  CHECK(acc_magnitude(x, y, z).samples == std::vector<double>{5.0, 2.0});
  const auto short_z = testing::series("z", Modality::ACC, 500.0, 0, {0.0});
  CHECK_THROWS_AS(acc_magnitude(x, y, short_z), ChannelError);
}

TEST_CASE("label rasterization") {
  Recording r;
  r.series.push_back(testing::series("LTibia_X", Modality::ACC, 500.0, 0, std::vector<double>(1000)));
  r.aligned = true;
  auto count = [](const std::vector<int>& l) { return std::count(l.begin(), l.end(), 1); };

  SUBCASE("exact cover of samples 100-199") {
    const auto l = rasterize_labels(r, make_label_track({{200, 400}}));
    CHECK(count(l) == 100);
    CHECK(l[99] == -1);
    CHECK(l[100] == 1);
    CHECK(l[199] == 1);
    CHECK(l[200] == -1);
  }
  SUBCASE("empty track") {
    const auto l = rasterize_labels(r, LabelTrack{});
    CHECK(l.size() == 1000);
    CHECK(count(l) == 0);
  }
  SUBCASE("interval past the end is clipped") {
    const auto l = rasterize_labels(r, make_label_track({{1900, 50000}}));
    CHECK(count(l) == 50);
  }
  SUBCASE("adjacent intervals partition time") {
    const auto l = rasterize_labels(r, make_label_track({{200, 400}, {400, 600}}));
    CHECK(count(l) == 200);
  }
}

TEST_CASE("rasterized FOG duration matches the track") {
  Gen g(12);
  const double period = 2.0;
  Recording r;
  r.series.push_back(testing::series("LTibia_X", Modality::ACC, 500.0, 37, std::vector<double>(5000)));
  r.aligned = true;
  for (int trial = 0; trial < 300; ++trial) {
    // One interval: the count is within one sample period of its length.
    const std::int64_t s = g.integer(37, 9000);
    const std::int64_t e = s + g.integer(1, 1000);
    const auto l1 = rasterize_labels(r, make_label_track({{s, e}}));
    const double fog1 = static_cast<double>(std::count(l1.begin(), l1.end(), 1)) * period;
    REQUIRE(std::abs(fog1 - static_cast<double>(e - s)) < period);

    // Several intervals: each contributes at most one period of error.
    std::vector<Interval> ivs;
    std::int64_t t = 37;
    const auto n = g.integer(1, 6);
    for (int i = 0; i < n; ++i) {
      const std::int64_t a = t + g.integer(0, 800);
      const std::int64_t b = a + g.integer(1, 800);
      ivs.push_back({a, b});
      t = b;
    }
    const auto track = make_label_track(ivs);
    if (track.intervals.back().end_ms > 37 + 10000) continue;
    const auto l = rasterize_labels(r, track);
    const double fog = static_cast<double>(std::count(l.begin(), l.end(), 1)) * period;
    REQUIRE(std::abs(fog - static_cast<double>(track.total_ms())) < period * static_cast<double>(track.intervals.size()));
  }
}
