#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fogkit/errors.hpp"
#include "fogkit/types.hpp"

namespace fogkit {

using Matrix = std::vector<std::vector<double>>;

// Per-feature (mean, SD). A zero SD marks a constant column that maps to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;

  bool empty() const { return mean.empty(); }
  std::vector<double> apply(std::span<const double> row) const;
  bool operator==(const Standardizer&) const = default;
};

// Population statistics. Throws InsufficientData for fewer than 2 rows.
Standardizer standardize_fit(const Matrix& X, Diagnostics* diag = nullptr);
Matrix standardize_apply(const Standardizer& s, const Matrix& X);

struct SvmModel {
  Matrix support_vectors;          // in standardized space when standardizer is set
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias{0.0};
  double gamma{1.0};
  double C{1.0};
  Standardizer standardizer;

  std::size_t dimension() const;
  bool operator==(const SvmModel&) const = default;
};

struct SvmOptions {
  double tolerance{1e-3};
  std::uint64_t max_iterations{1'000'000};
  // Per-class multipliers on C (class weighting).
  double positive_weight{1.0};
  double negative_weight{1.0};
  // Fit a standardizer on the training rows and store it in the model.
  bool standardize{true};
  // Record the dual objective after every update.
  bool trace_objective{false};
  std::size_t full_gram_limit{8000};
  std::size_t cache_megabytes{256};
};

struct TrainInfo {
  std::uint64_t iterations{0};
  bool converged{false};
  double dual_objective{0.0};
  std::vector<double> alpha;  // one entry per training row
  std::vector<double> objective_trace;
};

// Thrown when the optimizer hits max_iterations; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SvmModel model) : Error(what), model_(std::move(model)) {}
  const SvmModel& model() const { return model_; }

 private:
  SvmModel model_;
};

// Source of kernel rows for the dual solver. row(i) stays valid until the
// next call that names a different row, except that the two most recently
// requested rows are always both valid.
class KernelRows {
 public:
  virtual ~KernelRows() = default;
  virtual std::size_t size() const = 0;
  virtual const double* row(std::size_t i) = 0;
  virtual double diagonal(std::size_t i) const = 0;
};

// Precomputed row-major n x n Gram matrix.
class DenseKernel final : public KernelRows {
 public:
  DenseKernel(std::vector<double> gram, std::size_t n);
  std::size_t size() const override { return n_; }
  const double* row(std::size_t i) override { return gram_.data() + i * n_; }
  double diagonal(std::size_t i) const override { return gram_[i * n_ + i]; }

 private:
  std::vector<double> gram_;
  std::size_t n_;
};

// RBF rows computed on demand with an LRU row cache.
class CachedRbfKernel final : public KernelRows {
 public:
  CachedRbfKernel(const Matrix& X, double gamma, std::size_t capacity_rows);
  ~CachedRbfKernel() override;
  std::size_t size() const override;
  const double* row(std::size_t i) override;
  double diagonal(std::size_t) const override { return 1.0; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct DualSolution {
  std::vector<double> alpha;
  double bias{0.0};
  std::uint64_t iterations{0};
  bool converged{false};
  double objective{0.0};
  std::vector<double> objective_trace;
};

// Maximizes sum(alpha) - 1/2 alpha' Q alpha subject to 0 <= alpha_i <= upper_i
// and y' alpha = 0, with Q_ij = y_i y_j K_ij. Pairwise updates on the maximal
// violating pair; stops once the violation gap is below tolerance, which puts
// every point within tolerance of its KKT condition.
DualSolution solve_dual(KernelRows& kernel, std::span<const int> y, std::span<const double> upper, double tolerance,
                        std::uint64_t max_iterations, bool trace_objective = false);

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);
std::vector<double> rbf_gram(const Matrix& X, double gamma);

// Throws ClassError unless both labels occur, LabelError on labels other than
// +1/-1, DomainError on non-finite features or non-positive C/gamma, and
// ConvergenceError past max_iterations.
SvmModel svm_train(const Matrix& X, std::span<const int> y, double C, double gamma, const SvmOptions& opts = {},
                   TrainInfo* info = nullptr, Diagnostics* diag = nullptr);

double svm_decision(const SvmModel& model, std::span<const double> x);
// sign(decision); a decision of exactly 0 predicts +1.
int svm_predict(const SvmModel& model, std::span<const double> x);
std::vector<double> svm_decision(const SvmModel& model, const Matrix& X);

std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& text);
void save_model(const SvmModel& model, const std::filesystem::path& file);
SvmModel load_model(const std::filesystem::path& file);

}  // namespace fogkit
