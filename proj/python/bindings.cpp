#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fogkit/entropy.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/features.hpp"
#include "fogkit/metrics.hpp"
#include "fogkit/pipeline.hpp"
#include "fogkit/recording_io.hpp"
#include "fogkit/segment.hpp"
#include "fogkit/spectral.hpp"
#include "fogkit/svm.hpp"
#include "fogkit/wavelet.hpp"

namespace py = pybind11;
using namespace fogkit;

namespace {

py::dict metric_dict(const MetricSet& m) {
  py::dict d;
  for (std::size_t k = 0; k < kMetricCount; ++k) d[kMetricKeys[k]] = m.values[k];
  return d;
}

py::dict report_dict(const ExperimentReport& r) {
  py::dict d;
  d["subject"] = r.subject;
  d["mask"] = to_string(r.mask);
  d["skipped"] = r.skipped;
  d["skip_reason"] = r.skip_reason;
  d["runs"] = r.runs.size();
  py::dict mean, sd;
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    mean[kMetricKeys[k]] = r.mean[k];
    sd[kMetricKeys[k]] = r.sd[k];
  }
  d["mean"] = mean;
  d["sd"] = sd;
  return d;
}

PipelineConfig config_from(const py::dict& overrides) {
  PipelineConfig cfg;
  if (!overrides.empty()) {
    const auto text = py::module_::import("json").attr("dumps")(overrides).cast<std::string>();
    merge_config(cfg, nlohmann::json::parse(text));
  }
  check_config(cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multimodal freezing-of-gait detection core";

  auto base = py::register_exception<Error>(m, "FogkitError", PyExc_RuntimeError);
  py::register_exception<SpecError>(m, "SpecError", base.ptr());
  py::register_exception<NotFound>(m, "NotFound", base.ptr());
  py::register_exception<LengthError>(m, "LengthError", base.ptr());
  py::register_exception<ClassError>(m, "ClassError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  m.def("freezing_index", [](const std::vector<double>& x, double rate_hz) { return freezing_index(x, rate_hz); },
        py::arg("x"), py::arg("rate_hz"));
  m.def("band_power", [](const std::vector<double>& x, double rate_hz, double lo, double hi) {
    return band_power(x, rate_hz, lo, hi);
  });
  m.def(
      "sample_entropy",
      [](const std::vector<double>& x, int m_, double r) { return sample_entropy(x, {m_, r}); }, py::arg("x"),
      py::arg("m") = 2, py::arg("r") = 0.2);
  m.def(
      "emg_features",
      [](const std::vector<double>& x, double deadband) {
        const auto f = emg_features(x, deadband);
        py::dict d;
        d["mav"] = f.mav;
        d["zc"] = f.zc;
        d["ssc"] = f.ssc;
        d["wl"] = f.wl;
        return d;
      },
      py::arg("x"), py::arg("deadband") = 0.0);
  m.def("rhythm_energies", [](const std::vector<double>& x) { return rhythm_energies(x); });
  m.def("total_wavelet_entropy", [](const std::vector<double>& e) { return total_wavelet_entropy(e); });
  m.def("pfg", [](const std::vector<int>& labels) { return pfg(labels); });
  m.def(
      "window_starts",
      [](std::size_t n, double window_s, double step_s, double rate_hz) {
        std::vector<std::size_t> starts;
        for (const auto& w : window_indices(n, {window_s, step_s, 0.8}, rate_hz)) starts.push_back(w.start);
        return starts;
      },
      py::arg("n_samples"), py::arg("window_s") = 3.0, py::arg("step_s") = 0.3, py::arg("rate_hz") = 500.0);

  m.def("metrics", [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return metric_dict(metrics(confusion(y_true, y_pred)));
  });
  m.def("roc_auc", [](const std::vector<int>& y, const std::vector<double>& s) { return roc_auc(y, s); });

  // Models cross the boundary as their JSON text.
  m.def(
      "svm_train",
      [](const Matrix& X, const std::vector<int>& y, double C, double gamma) {
        py::gil_scoped_release release;
        return model_to_json(svm_train(X, y, C, gamma));
      },
      py::arg("X"), py::arg("y"), py::arg("C") = 1.0, py::arg("gamma") = 1.0);
  m.def("svm_decision", [](const std::string& model, const Matrix& X) {
    return svm_decision(model_from_json(model), X);
  });

  m.def(
      "synth",
      [](const std::filesystem::path& out, int subjects, double duration_s, int episodes, std::uint64_t seed) {
        SynthParams p;
        p.subjects = subjects;
        p.duration_s = duration_s;
        p.episodes_per_subject = episodes;
        save_dataset(synth_dataset(p, seed), out);
      },
      py::arg("out"), py::arg("subjects") = 2, py::arg("duration_s") = 120.0, py::arg("episodes") = 5,
      py::arg("seed") = 0);
  m.def(
      "evaluate_independent",
      [](const std::filesystem::path& dataset, const py::dict& overrides) {
        const auto cfg = config_from(overrides);
        std::vector<ExperimentReport> reports;
        {
          py::gil_scoped_release release;
          const auto raw = load_dataset(dataset);
          reports = run_subject_independent(dataset_features(raw, cfg), cfg.experiment);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("dataset"), py::arg("config") = py::dict());
  m.def("config_keys", &config_keys);
}
