#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fogkit/svm.hpp"

namespace fogkit {

struct GridSpec {
  std::vector<double> C_values;
  std::vector<double> gamma_values;
  int folds{5};

  // C = 2^-5 .. 2^15 and gamma = 2^-15 .. 2^3, both in steps of x4.
  static GridSpec defaults();
};

// Throws SpecError on an empty or non-positive grid or folds < 2.
void check_grid_spec(const GridSpec& grid);

struct SplitSpec {
  double test_fraction{0.25};
  bool stratified{true};
  std::uint64_t seed{0};
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Total test count is round(test_fraction * n); when stratified, per-class
// counts use largest-remainder allocation of that total. Throws ClassError
// unless both labels occur.
Split train_test_split(std::span<const int> y, const SplitSpec& spec);

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t uniform_index(std::uint64_t bound, std::mt19937_64& gen);

// Fold id per row. Rows are ranked within their class by a hash of their
// content and the seed, then dealt round-robin, so the assignment follows
// the rows and not their order. Throws FoldError when a class has fewer rows
// than folds.
std::vector<int> stratified_folds(const Matrix& X, std::span<const int> y, int folds, std::uint64_t seed);

struct CvPoint {
  double C{0.0};
  double gamma{0.0};
  double mean_accuracy{0.0};
  std::vector<double> fold_accuracy;
  std::size_t unconverged{0};
};

struct GridSearchResult {
  double best_C{0.0};
  double best_gamma{0.0};
  double best_accuracy{0.0};
  std::vector<CvPoint> table;  // C-major, in grid order
};

// Stratified k-fold mean accuracy per grid point, maximized with ties going
// to the smaller C and then the smaller gamma. X is used as given (no
// standardization); opts.standardize is ignored. A fold model that exhausts
// its iteration budget is scored as is and counted in `unconverged`.
GridSearchResult grid_search_cv(const Matrix& X, std::span<const int> y, const GridSpec& grid, std::uint64_t seed,
                                const SvmOptions& opts = {}, int jobs = 1, Diagnostics* diag = nullptr);

}  // namespace fogkit
