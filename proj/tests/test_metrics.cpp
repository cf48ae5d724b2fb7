#include <cmath>
#include <limits>

#include "doctest.h"
#include "fogkit/errors.hpp"
#include "fogkit/metrics.hpp"
#include "support.hpp"

using namespace fogkit;
using testing::Gen;

TEST_CASE("confusion counts") {
  const std::vector<int> mixed{1, -1, 1, 1, -1};
  const auto same = confusion(mixed, mixed);
  CHECK(same.fn == 0);
  CHECK(same.fp == 0);
  std::vector<int> flipped(mixed);
  for (auto& v : flipped) v = -v;
  const auto opposite = confusion(mixed, flipped);
  CHECK(opposite.tp == 0);
  CHECK(opposite.tn == 0);
  CHECK(confusion(std::vector<int>{1, 1, 1, -1, -1}, std::vector<int>{1, 1, -1, -1, 1}) == ConfusionCounts{2, 1, 1, 1});
  CHECK_THROWS_AS(confusion(std::vector<int>{}, std::vector<int>{}), LengthError);
  CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<int>{1, 1}), LengthError);
  CHECK_THROWS_AS(confusion(std::vector<int>{1, 0}, std::vector<int>{1, 1}), LabelError);
}

TEST_CASE("hand-evaluated metrics") {
  const auto m = metrics({45, 5, 40, 10});
  CHECK(m[Metric::Accuracy] == doctest::Approx(0.85).epsilon(1e-4));
  CHECK(m[Metric::Sensitivity] == doctest::Approx(0.90).epsilon(1e-4));
  CHECK(m[Metric::Specificity] == doctest::Approx(0.80).epsilon(1e-4));
  CHECK(std::abs(m[Metric::Precision] - 0.8182) <= 1e-4);
  CHECK(std::abs(m[Metric::F1] - 0.8571) <= 1e-4);
  CHECK(m.degenerate == 0);
  CHECK(m[Metric::Auc] == 0.0);
}

TEST_CASE("perfect predictions") {
  const auto m = metrics({10, 0, 7, 0});
  for (std::size_t k = 0; k < 5; ++k) CHECK(m.values[k] == 1.0);
}

TEST_CASE("undefined ratios are zero and flagged") {
  const auto m = metrics({0, 4, 6, 0});
  CHECK(m[Metric::Precision] == 0.0);
  CHECK(m.is_degenerate(Metric::Precision));
  CHECK(m.is_degenerate(Metric::F1));
  CHECK_FALSE(m.is_degenerate(Metric::Sensitivity));
  const auto none_positive = metrics({0, 0, 5, 1});
  CHECK(none_positive.is_degenerate(Metric::Sensitivity));
  CHECK(none_positive[Metric::Specificity] == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("metrics equal a recount from raw label pairs") {
  Gen g(90);
  for (int trial = 0; trial < 1000; ++trial) {
    const ConfusionCounts want{static_cast<std::uint64_t>(g.integer(0, 40)), static_cast<std::uint64_t>(g.integer(0, 40)),
                               static_cast<std::uint64_t>(g.integer(0, 40)), static_cast<std::uint64_t>(g.integer(0, 40))};
    if (want.total() == 0) continue;
    std::vector<std::pair<int, int>> pairs;
    pairs.insert(pairs.end(), want.tp, {1, 1});
    pairs.insert(pairs.end(), want.fn, {1, -1});
    pairs.insert(pairs.end(), want.tn, {-1, -1});
    pairs.insert(pairs.end(), want.fp, {-1, 1});
    std::shuffle(pairs.begin(), pairs.end(), g.engine());
    std::vector<int> t, p;
    for (auto [a, b] : pairs) {
      t.push_back(a);
      p.push_back(b);
    }
    const auto c = confusion(t, p);
    REQUIRE(c == want);
    const auto m = metrics(c);

    // Brute force straight from the pairs.
    double hits = 0, pos = 0, neg = 0, tp = 0, tn = 0, pred_pos = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      hits += t[i] == p[i];
      pos += t[i] == 1;
      neg += t[i] == -1;
      tp += t[i] == 1 && p[i] == 1;
      tn += t[i] == -1 && p[i] == -1;
      pred_pos += p[i] == 1;
    }
    REQUIRE(m[Metric::Accuracy] == doctest::Approx(hits / static_cast<double>(t.size())));
    REQUIRE(m[Metric::Sensitivity] == doctest::Approx(pos > 0 ? tp / pos : 0.0));
    REQUIRE(m[Metric::Specificity] == doctest::Approx(neg > 0 ? tn / neg : 0.0));
    const double prec = pred_pos > 0 ? tp / pred_pos : 0.0;
    const double sens = pos > 0 ? tp / pos : 0.0;
    REQUIRE(m[Metric::Precision] == doctest::Approx(prec));
    REQUIRE(m[Metric::F1] == doctest::Approx(prec + sens > 0 ? 2 * prec * sens / (prec + sens) : 0.0));
    REQUIRE(m.is_degenerate(Metric::Sensitivity) == (pos == 0));
    REQUIRE(m.is_degenerate(Metric::Precision) == (pred_pos == 0));
  }
}

TEST_CASE("AUC reference cases") {
  CHECK(roc_auc(std::vector<int>{-1, -1, 1, 1}, std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 1.0);
  CHECK(roc_auc(std::vector<int>{-1, 1, -1, 1}, std::vector<double>(4, 0.7)) == 0.5);
  const std::vector<int> y{-1, -1, 1, -1, 1, 1};
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  CHECK(roc_auc(y, s) == doctest::Approx(testing::pair_auc(y, s)).epsilon(1e-12));
  CHECK(roc_auc(y, s) == doctest::Approx(8.0 / 9.0));
  CHECK_THROWS_AS(roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}), ClassError);
}

TEST_CASE("AUC equals the pair-counting oracle") {
  Gen g(91);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(2, 200));
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (auto& v : y) v = g.sign();
    y[0] = 1;
    y[1] = -1;
    const bool ties = trial % 3 == 0;
    for (std::size_t i = 0; i < n; ++i) s[i] = ties ? static_cast<double>(g.integer(0, 5)) : g.normal() + 0.5 * y[i];
    REQUIRE(std::abs(roc_auc(y, s) - testing::pair_auc(y, s)) <= 1e-9);
  }
}

TEST_CASE("ROC curve") {
  const std::vector<int> y{-1, -1, 1, -1, 1, 1};
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5, 0.5};
  const auto curve = roc_curve(y, s);
  REQUIRE(curve.size() == 6);
  CHECK(curve[0].fpr == 0.0);
  CHECK(curve[0].tpr == 0.0);
  CHECK(curve[0].threshold == std::numeric_limits<double>::infinity());
  CHECK(curve[1].threshold == 0.5);
  CHECK(curve[1].tpr == doctest::Approx(2.0 / 3.0));
  CHECK(curve.back().fpr == 1.0);
  CHECK(curve.back().tpr == 1.0);

  // Trapezoidal area under the curve equals the rank statistic.
  Gen g(92);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(2, 150));
    std::vector<int> yy(n);
    std::vector<double> ss(n);
    for (std::size_t i = 0; i < n; ++i) {
      yy[i] = g.sign();
      ss[i] = static_cast<double>(g.integer(0, 20));
    }
    yy[0] = 1;
    yy[1] = -1;
    const auto c = roc_curve(yy, ss);
    double area = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      REQUIRE(c[k].fpr >= c[k - 1].fpr);
      REQUIRE(c[k].tpr >= c[k - 1].tpr);
      area += (c[k].fpr - c[k - 1].fpr) * (c[k].tpr + c[k - 1].tpr) / 2.0;
    }
    REQUIRE(std::abs(area - testing::pair_auc(yy, ss)) <= 1e-9);
  }
}
