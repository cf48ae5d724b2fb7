#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fogkit/errors.hpp"
#include "fogkit/svm.hpp"
#include "support.hpp"

using namespace fogkit;
using testing::Gen;

namespace {

double training_accuracy(const SvmModel& m, const Matrix& X, const std::vector<int>& y) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < X.size(); ++i) ok += svm_predict(m, X[i]) == y[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(X.size());
}

// Random labeled set; overlap controls separability.
testing::Blobs random_set(Gen& g, std::size_t n, std::size_t dim, bool separable) {
  auto b = testing::make_blobs(g, n, dim, separable ? 8.0 : 1.0);
  if (!separable) {
    for (auto& label : b.y) {
      if (g.uniform() < 0.1) label = -label;
    }
    b.y[0] = 1;
    b.y[1] = -1;
  }
  return b;
}

void check_kkt(const SvmModel& m, const TrainInfo& info, const Matrix& X, const std::vector<int>& y, double C,
               double tau) {
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yf = y[i] * svm_decision(m, X[i]);
    const double a = info.alpha[i];
    CAPTURE(i);
    CAPTURE(a);
    CAPTURE(yf);
    REQUIRE(a >= 0.0);
    REQUIRE(a <= C);
    if (a == 0.0) REQUIRE(yf >= 1.0 - tau);
    else if (a == C) REQUIRE(yf <= 1.0 + tau);
    else REQUIRE(std::abs(yf - 1.0) <= tau);
  }
}

}  // namespace

TEST_CASE("standardization") {
  Gen g(60);
  Matrix X(50, std::vector<double>(4));
  for (auto& row : X) {
    row[0] = 100.0 + 5.0 * g.normal();
    row[1] = g.normal() * 1e-3;
    row[2] = 7.0;
    row[3] = -3.0 + g.normal();
  }
  Diagnostics d;
  const auto s = standardize_fit(X, &d);
  CHECK(d.warnings.size() == 1);
  CHECK(s.sd[2] == 0.0);
  const auto Z = standardize_apply(s, X);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0;
    for (const auto& row : Z) mean += row[c];
    CHECK(std::abs(mean / 50.0) < 1e-9);
  }
  for (const auto& row : Z) CHECK(row[2] == 0.0);
  for (double v : s.apply(s.mean)) CHECK(v == 0.0);
  CHECK_THROWS_AS(standardize_fit(Matrix{{1.0}}), InsufficientData);
}

TEST_CASE("well-separated clusters are learned exactly") {
  Gen g(61);
  const auto b = testing::make_blobs(g, 40, 2, 6.0);
  TrainInfo info;
  const auto m = svm_train(b.X, b.y, 1.0, 0.5, {}, &info);
  CHECK(info.converged);
  CHECK(training_accuracy(m, b.X, b.y) == 1.0);
  CHECK(m.dimension() == 2);
  CHECK(m.support_vectors.size() == m.dual_coefs.size());
}

TEST_CASE("XOR is separable with an RBF kernel") {
  const Matrix X{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> y{-1, -1, 1, 1};
  SvmOptions raw;
  raw.standardize = false;
  for (const auto& opts : {SvmOptions{}, raw}) {
    const auto m = svm_train(X, y, 10.0, 1.0, opts);
    CHECK(training_accuracy(m, X, y) == 1.0);
  }
}

TEST_CASE("KKT conditions hold for every training point") {
  Gen g(62);
  const double tau = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    const bool separable = trial % 2 == 0;
    const auto n = static_cast<std::size_t>(g.integer(10, 200));
    const auto dim = static_cast<std::size_t>(g.integer(1, 6));
    const auto b = random_set(g, n, dim, separable);
    const double C = std::pow(2.0, g.uniform(-3.0, 6.0));
    const double gamma = std::pow(2.0, g.uniform(-4.0, 2.0));
    TrainInfo info;
    const auto m = svm_train(b.X, b.y, C, gamma, {}, &info);
    CAPTURE(trial);
    REQUIRE(info.converged);
    check_kkt(m, info, b.X, b.y, C, tau);

    double balance = 0.0;
    for (std::size_t i = 0; i < n; ++i) balance += info.alpha[i] * b.y[i];
    CHECK(std::abs(balance) <= 1e-6);
  }
}

TEST_CASE("support vectors strictly inside the box sit on the margin") {
  Gen g(63);
  const auto b = random_set(g, 80, 2, false);
  TrainInfo info;
  const auto m = svm_train(b.X, b.y, 1.0, 0.5, {}, &info);
  std::size_t free = 0;
  for (std::size_t i = 0; i < b.X.size(); ++i) {
    if (info.alpha[i] > 0.0 && info.alpha[i] < 1.0) {
      ++free;
      CHECK(std::abs(svm_decision(m, b.X[i]) - b.y[i]) <= 1e-3);
    }
  }
  CHECK(free > 0);
}

TEST_CASE("the dual objective never decreases") {
  Gen g(64);
  for (int trial = 0; trial < 5; ++trial) {
    const auto b = random_set(g, 120, 3, trial % 2 == 0);
    SvmOptions opts;
    opts.trace_objective = true;
    TrainInfo info;
    svm_train(b.X, b.y, 4.0, 0.3, opts, &info);
    REQUIRE(info.objective_trace.size() == info.iterations);
    for (std::size_t k = 1; k < info.objective_trace.size(); ++k) {
      REQUIRE(info.objective_trace[k] >= info.objective_trace[k - 1] - 1e-12 * std::abs(info.objective_trace[k]));
    }
    CHECK(info.objective_trace.back() == doctest::Approx(info.dual_objective));
  }
}

TEST_CASE("small problems reach the reference dual optimum") {
  Gen g(65);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(4, 12));
    const auto b = random_set(g, n, static_cast<std::size_t>(g.integer(1, 3)), trial % 3 == 0);
    const double C = std::pow(2.0, g.uniform(-2.0, 4.0));
    const double gamma = std::pow(2.0, g.uniform(-3.0, 1.0));
    SvmOptions opts;
    opts.standardize = false;
    TrainInfo info;
    svm_train(b.X, b.y, C, gamma, opts, &info);
    const auto K = testing::gaussian_gram(b.X, gamma);
    const double reference = testing::reference_dual_optimum(K, b.y, C);
    CAPTURE(trial);
    CHECK(info.dual_objective == doctest::Approx(testing::dual_objective(K, b.y, info.alpha)).epsilon(1e-12));
    CHECK(std::abs(info.dual_objective - reference) <= 1e-4 * std::abs(reference));
  }
}

TEST_CASE("duplicating every row leaves a hard-margin decision function unchanged") {
  // Duplicates split each multiplier in two, which matches the original
  // problem only while no multiplier reaches the box bound.
  Gen g(66);
  const auto b = testing::make_blobs(g, 30, 2, 6.0);
  Matrix X2 = b.X;
  X2.insert(X2.end(), b.X.begin(), b.X.end());
  std::vector<int> y2 = b.y;
  y2.insert(y2.end(), b.y.begin(), b.y.end());
  SvmOptions opts;
  opts.tolerance = 1e-9;
  TrainInfo info;
  const auto m1 = svm_train(b.X, b.y, 1e3, 0.5, opts, &info);
  for (double a : info.alpha) REQUIRE(a < 1e3);
  const auto m2 = svm_train(X2, y2, 1e3, 0.5, opts);
  for (double u = -6.0; u <= 6.0; u += 0.5) {
    for (double v = -4.0; v <= 4.0; v += 0.5) {
      const std::vector<double> p{u, v};
      REQUIRE(std::abs(svm_decision(m1, p) - svm_decision(m2, p)) <= 1e-6);
    }
  }
}

TEST_CASE("consistent feature permutation leaves predictions unchanged") {
  Gen g(67);
  const auto b = random_set(g, 60, 4, false);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  auto permute = [&](const std::vector<double>& row) {
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = row[perm[c]];
    return out;
  };
  const auto m = svm_train(b.X, b.y, 2.0, 0.4);
  SvmModel mp = m;
  for (auto& sv : mp.support_vectors) sv = permute(sv);
  mp.standardizer.mean = permute(m.standardizer.mean);
  mp.standardizer.sd = permute(m.standardizer.sd);
  for (int probe = 0; probe < 200; ++probe) {
    const auto x = g.normals(4, 2.0);
    REQUIRE(svm_decision(m, x) == doctest::Approx(svm_decision(mp, permute(x))).epsilon(1e-9).scale(1e-9));
    REQUIRE(svm_predict(m, x) == svm_predict(mp, permute(x)));
  }
}

TEST_CASE("the decision function is continuous") {
  Gen g(68);
  const auto b = random_set(g, 60, 3, false);
  const auto m = svm_train(b.X, b.y, 2.0, 0.4);
  for (int probe = 0; probe < 200; ++probe) {
    auto x = g.normals(3, 2.0);
    const double f = svm_decision(m, x);
    for (auto& v : x) v += 1e-9 * g.sign();
    REQUIRE(std::abs(svm_decision(m, x) - f) < 1e-6);
  }
}

TEST_CASE("dense and cached kernels give the same model") {
  Gen g(69);
  const auto b = random_set(g, 150, 3, false);
  SvmOptions cached;
  cached.full_gram_limit = 0;
  cached.cache_megabytes = 0;  // forces the two-row minimum
  const auto dense_model = svm_train(b.X, b.y, 2.0, 0.4);
  const auto cached_model = svm_train(b.X, b.y, 2.0, 0.4, cached);
  CHECK(dense_model == cached_model);
}

TEST_CASE("class weights scale the per-class box") {
  Gen g(70);
  const auto b = random_set(g, 100, 2, false);
  SvmOptions opts;
  opts.positive_weight = 3.0;
  TrainInfo info;
  const auto m = svm_train(b.X, b.y, 0.5, 0.5, opts, &info);
  bool positive_above_c = false;
  for (std::size_t i = 0; i < b.y.size(); ++i) {
    const double cap = b.y[i] > 0 ? 1.5 : 0.5;
    REQUIRE(info.alpha[i] <= cap);
    if (b.y[i] > 0 && info.alpha[i] > 0.5) positive_above_c = true;
  }
  CHECK(positive_above_c);
  CHECK(m.C == 0.5);
}

TEST_CASE("model JSON round-trip is bit-exact") {
  Gen g(71);
  const auto b = random_set(g, 50, 3, false);
  const auto m = svm_train(b.X, b.y, 2.0, 0.4);
  CHECK(model_from_json(model_to_json(m)) == m);
  testing::TempDir dir("model");
  save_model(m, dir / "model.json");
  const auto back = load_model(dir / "model.json");
  CHECK(back == m);
  for (const auto& row : b.X) REQUIRE(svm_decision(back, row) == svm_decision(m, row));
  CHECK_THROWS_AS(model_from_json("{}"), FormatError);
  CHECK_THROWS_AS(model_from_json("not json"), FormatError);
  CHECK_THROWS_AS(load_model(dir / "missing.json"), NotFound);
}

TEST_CASE("training input errors") {
  const Matrix X{{0.0}, {1.0}, {2.0}};
  CHECK_THROWS_AS(svm_train(X, std::vector<int>{1, 1, 1}, 1.0, 1.0), ClassError);
  CHECK_THROWS_AS(svm_train(X, std::vector<int>{1, 0, -1}, 1.0, 1.0), LabelError);
  CHECK_THROWS_AS(svm_train(X, std::vector<int>{1, -1}, 1.0, 1.0), LengthError);
  CHECK_THROWS_AS(svm_train(X, std::vector<int>{1, -1, 1}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(svm_train(X, std::vector<int>{1, -1, 1}, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(svm_train(Matrix{{0.0}, {NAN}}, std::vector<int>{1, -1}, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(svm_decision(svm_train(X, std::vector<int>{1, -1, 1}, 1.0, 1.0), std::vector<double>{1.0, 2.0}),
                  LengthError);
}

TEST_CASE("an exhausted iteration budget raises with the last iterate") {
  Gen g(72);
  const auto b = random_set(g, 100, 2, false);
  SvmOptions opts;
  opts.max_iterations = 3;
  TrainInfo info;
  try {
    svm_train(b.X, b.y, 10.0, 0.5, opts, &info);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK_FALSE(info.converged);
    CHECK(info.iterations == 3);
    CHECK_FALSE(e.model().support_vectors.empty());
  }
}
