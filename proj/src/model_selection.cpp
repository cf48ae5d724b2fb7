#include "fogkit/model_selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

namespace fogkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t row_hash(std::span<const double> row, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  for (double v : row) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
  return h;
}

void check_labels(std::span<const int> y, bool& pos, bool& neg) {
  pos = neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw LabelError("labels must be +1 or -1");
  }
}

// Orders rows by (label, content hash, content), which depends only on the
// multiset of rows.
std::vector<std::size_t> canonical_order(const Matrix& X, std::span<const int> y, std::uint64_t seed) {
  std::vector<std::uint64_t> h(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) h[i] = row_hash(X[i], seed);
  std::vector<std::size_t> idx(X.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] > y[b];
    if (h[a] != h[b]) return h[a] < h[b];
    return X[a] < X[b];
  });
  return idx;
}

}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (int e = -5; e <= 15; e += 2) g.C_values.push_back(std::ldexp(1.0, e));
  for (int e = -15; e <= 3; e += 2) g.gamma_values.push_back(std::ldexp(1.0, e));
  g.folds = 5;
  return g;
}

void check_grid_spec(const GridSpec& grid) {
  if (grid.C_values.empty() || grid.gamma_values.empty()) throw SpecError("grid must list at least one C and gamma");
  for (double c : grid.C_values)
    if (!(c > 0.0) || !std::isfinite(c)) throw SpecError("grid C values must be positive");
  for (double g : grid.gamma_values)
    if (!(g > 0.0) || !std::isfinite(g)) throw SpecError("grid gamma values must be positive");
  if (grid.folds < 2) throw SpecError("cross-validation needs at least 2 folds");
}

std::uint64_t uniform_index(std::uint64_t bound, std::mt19937_64& gen) {
  if (bound == 0) throw DomainError("uniform_index bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  while (true) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

Split train_test_split(std::span<const int> y, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) throw SpecError("test fraction must lie in (0, 1)");
  bool pos = false, neg = false;
  check_labels(y, pos, neg);
  if (!pos || !neg) throw ClassError("split needs both classes");

  const std::size_t n = y.size();
  const auto total_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
  std::mt19937_64 gen(spec.seed);
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[uniform_index(k, gen)]);
  };

  std::vector<char> is_test(n, 0);
  if (spec.stratified) {
    std::vector<std::size_t> groups[2];
    for (std::size_t i = 0; i < n; ++i) groups[y[i] > 0 ? 0 : 1].push_back(i);
    std::size_t take[2];
    double frac[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
      const double exact = spec.test_fraction * static_cast<double>(groups[c].size());
      take[c] = static_cast<std::size_t>(std::floor(exact));
      frac[c] = exact - static_cast<double>(take[c]);
      assigned += take[c];
    }
    // Remainder goes to the larger fractional part; FOG wins ties.
    while (assigned < total_test) {
      const int c = frac[0] >= frac[1] ? 0 : 1;
      ++take[c];
      frac[c] = -1.0;
      ++assigned;
    }
    for (int c = 0; c < 2; ++c) {
      shuffle(groups[c]);
      for (std::size_t k = 0; k < take[c]; ++k) is_test[groups[c][k]] = 1;
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    shuffle(all);
    for (std::size_t k = 0; k < total_test; ++k) is_test[all[k]] = 1;
  }

  Split s;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? s.test : s.train).push_back(i);
  return s;
}

std::vector<int> stratified_folds(const Matrix& X, std::span<const int> y, int folds, std::uint64_t seed) {
  if (folds < 2) throw SpecError("cross-validation needs at least 2 folds");
  if (X.size() != y.size()) throw LengthError("fold assignment: label count differs from row count");
  std::size_t count[2] = {0, 0};
  for (int v : y) {
    if (v != 1 && v != -1) throw LabelError("labels must be +1 or -1");
    ++count[v > 0 ? 0 : 1];
  }
  for (int c = 0; c < 2; ++c) {
    if (count[c] < static_cast<std::size_t>(folds)) {
      throw FoldError(std::string(c == 0 ? "FOG" : "non-FOG") + " class has " + std::to_string(count[c]) +
                      " rows, fewer than " + std::to_string(folds) + " folds");
    }
  }
  const auto order = canonical_order(X, y, seed);
  std::vector<int> fold(y.size());
  std::size_t rank[2] = {0, 0};
  for (std::size_t i : order) {
    auto& r = rank[y[i] > 0 ? 0 : 1];
    fold[i] = static_cast<int>(r % static_cast<std::size_t>(folds));
    ++r;
  }
  return fold;
}

GridSearchResult grid_search_cv(const Matrix& X, std::span<const int> y, const GridSpec& grid, std::uint64_t seed,
                                const SvmOptions& opts, int jobs, Diagnostics* diag) {
  check_grid_spec(grid);
  if (X.size() != y.size()) throw LengthError("grid search: label count differs from row count");
  if (X.empty()) throw InsufficientData("grid search: no rows");
  const std::size_t d = X.front().size();
  for (const auto& row : X) {
    if (row.size() != d) throw LengthError("grid search: ragged feature matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw DomainError("grid search: non-finite feature");
  }

  // Work in canonical row order so the result does not depend on input order.
  const auto order = canonical_order(X, y, seed);
  Matrix Xc;
  std::vector<int> yc;
  Xc.reserve(X.size());
  for (std::size_t i : order) {
    Xc.push_back(X[i]);
    yc.push_back(y[i]);
  }
  const std::vector<int> fold = stratified_folds(Xc, yc, grid.folds, seed);
  const std::size_t n = Xc.size();

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = Xc[i][c] - Xc[j][c];
        acc += diff * diff;
      }
      dist[i * n + j] = dist[j * n + i] = acc;
    }
  }

  std::vector<std::vector<std::size_t>> train_idx(grid.folds), val_idx(grid.folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < grid.folds; ++f) (fold[i] == f ? val_idx[f] : train_idx[f]).push_back(i);
  }

  const std::size_t nc = grid.C_values.size(), ng = grid.gamma_values.size();
  std::vector<CvPoint> table(nc * ng);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    for (std::size_t gi = 0; gi < ng; ++gi) {
      auto& p = table[ci * ng + gi];
      p.C = grid.C_values[ci];
      p.gamma = grid.gamma_values[gi];
      p.fold_accuracy.assign(grid.folds, 0.0);
    }
  }

  auto run_gamma = [&](std::size_t gi) {
    const double gamma = grid.gamma_values[gi];
    std::vector<double> K(n * n);
    for (std::size_t k = 0; k < n * n; ++k) K[k] = std::exp(-gamma * dist[k]);
    for (int f = 0; f < grid.folds; ++f) {
      const auto& tr = train_idx[f];
      const auto& va = val_idx[f];
      const std::size_t nt = tr.size();
      std::vector<double> sub(nt * nt);
      std::vector<int> ytr(nt);
      for (std::size_t a = 0; a < nt; ++a) {
        ytr[a] = yc[tr[a]];
        for (std::size_t b = 0; b < nt; ++b) sub[a * nt + b] = K[tr[a] * n + tr[b]];
      }
      DenseKernel kernel(std::move(sub), nt);
      for (std::size_t ci = 0; ci < nc; ++ci) {
        const double C = grid.C_values[ci];
        std::vector<double> upper(nt);
        for (std::size_t a = 0; a < nt; ++a) upper[a] = C * (ytr[a] > 0 ? opts.positive_weight : opts.negative_weight);
        const DualSolution sol = solve_dual(kernel, ytr, upper, opts.tolerance, opts.max_iterations);
        std::size_t correct = 0;
        for (std::size_t v : va) {
          double acc = sol.bias;
          for (std::size_t a = 0; a < nt; ++a) {
            if (sol.alpha[a] > 0.0) acc += sol.alpha[a] * ytr[a] * K[tr[a] * n + v];
          }
          if ((acc >= 0.0 ? 1 : -1) == yc[v]) ++correct;
        }
        auto& p = table[ci * ng + gi];
        p.fold_accuracy[f] = static_cast<double>(correct) / static_cast<double>(va.size());
        if (!sol.converged) ++p.unconverged;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, ng);
  if (workers == 1) {
    for (std::size_t gi = 0; gi < ng; ++gi) run_gamma(gi);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t gi = w; gi < ng; gi += workers) run_gamma(gi);
      });
    }
    for (auto& t : pool) t.join();
  }

  GridSearchResult result;
  bool first = true;
  std::size_t unconverged = 0;
  for (auto& p : table) {
    p.mean_accuracy = std::accumulate(p.fold_accuracy.begin(), p.fold_accuracy.end(), 0.0) /
                      static_cast<double>(p.fold_accuracy.size());
    unconverged += p.unconverged;
    const bool better = first || p.mean_accuracy > result.best_accuracy ||
                        (p.mean_accuracy == result.best_accuracy &&
                         (p.C < result.best_C || (p.C == result.best_C && p.gamma < result.best_gamma)));
    if (better) {
      result.best_C = p.C;
      result.best_gamma = p.gamma;
      result.best_accuracy = p.mean_accuracy;
      first = false;
    }
  }
  if (unconverged > 0) {
    warn(diag, "grid search: " + std::to_string(unconverged) + " fold models hit the iteration limit");
  }
  result.table = std::move(table);
  return result;
}

}  // namespace fogkit
