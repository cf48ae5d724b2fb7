#include "fogkit/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace fogkit {

namespace {

constexpr double kTau = 1e-12;

bool in_up(int y, double a, double c) { return y > 0 ? a < c : a > 0.0; }
bool in_low(int y, double a, double c) { return y > 0 ? a > 0.0 : a < c; }

void check_matrix(const Matrix& X, const char* what) {
  if (X.empty()) throw InsufficientData(std::string(what) + ": no rows");
  const std::size_t d = X.front().size();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != d) throw LengthError(std::string(what) + ": row " + std::to_string(i) + " has wrong width");
    for (double v : X[i]) {
      if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite feature in row " + std::to_string(i));
    }
  }
}

}  // namespace

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) throw LengthError("standardizer dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = sd[c] > 0.0 ? (row[c] - mean[c]) / sd[c] : 0.0;
  return out;
}

Standardizer standardize_fit(const Matrix& X, Diagnostics* diag) {
  if (X.size() < 2) throw InsufficientData("standardization needs at least 2 rows");
  check_matrix(X, "standardize_fit");
  const std::size_t d = X.front().size();
  const double n = static_cast<double>(X.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.sd.assign(d, 0.0);
  for (const auto& row : X)
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  for (double& m : s.mean) m /= n;
  for (const auto& row : X)
    for (std::size_t c = 0; c < d; ++c) s.sd[c] += (row[c] - s.mean[c]) * (row[c] - s.mean[c]);
  for (std::size_t c = 0; c < d; ++c) {
    s.sd[c] = std::sqrt(s.sd[c] / n);
    if (s.sd[c] <= 1e-12 * std::max(1.0, std::abs(s.mean[c]))) {
      s.sd[c] = 0.0;
      warn(diag, "constant feature column " + std::to_string(c) + " standardized to zeros");
    }
  }
  return s;
}

Matrix standardize_apply(const Standardizer& s, const Matrix& X) {
  Matrix out;
  out.reserve(X.size());
  for (const auto& row : X) out.push_back(s.apply(row));
  return out;
}

std::size_t SvmModel::dimension() const {
  if (!standardizer.empty()) return standardizer.mean.size();
  return support_vectors.empty() ? 0 : support_vectors.front().size();
}

DenseKernel::DenseKernel(std::vector<double> gram, std::size_t n) : gram_(std::move(gram)), n_(n) {
  if (gram_.size() != n * n) throw LengthError("Gram matrix size mismatch");
}

struct CachedRbfKernel::Impl {
  const Matrix* X;
  double gamma;
  std::size_t capacity;
  std::list<std::size_t> lru;  // front = most recent
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> rows;
};

CachedRbfKernel::CachedRbfKernel(const Matrix& X, double gamma, std::size_t capacity_rows)
    : impl_(std::make_unique<Impl>()) {
  impl_->X = &X;
  impl_->gamma = gamma;
  impl_->capacity = std::max<std::size_t>(2, capacity_rows);
}

CachedRbfKernel::~CachedRbfKernel() = default;

std::size_t CachedRbfKernel::size() const { return impl_->X->size(); }

const double* CachedRbfKernel::row(std::size_t i) {
  auto& im = *impl_;
  if (auto it = im.rows.find(i); it != im.rows.end()) {
    im.lru.splice(im.lru.begin(), im.lru, it->second.second);
    return it->second.first.data();
  }
  if (im.rows.size() >= im.capacity) {
    im.rows.erase(im.lru.back());
    im.lru.pop_back();
  }
  const Matrix& X = *im.X;
  std::vector<double> r(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) r[k] = rbf_kernel(X[i], X[k], im.gamma);
  im.lru.push_front(i);
  auto [pos, _] = im.rows.emplace(i, std::make_pair(std::move(r), im.lru.begin()));
  return pos->second.first.data();
}

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
  double d2 = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double diff = u[c] - v[c];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

std::vector<double> rbf_gram(const Matrix& X, double gamma) {
  const std::size_t n = X.size();
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    K[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) K[i * n + j] = K[j * n + i] = rbf_kernel(X[i], X[j], gamma);
  }
  return K;
}

DualSolution solve_dual(KernelRows& kernel, std::span<const int> y, std::span<const double> upper, double tolerance,
                        std::uint64_t max_iterations, bool trace_objective) {
  const std::size_t n = y.size();
  if (kernel.size() != n || upper.size() != n) throw LengthError("dual solver inputs disagree in size");
  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto& a = sol.alpha;

  auto objective = [&] {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += a[t] * (1.0 - G[t]);
    return 0.5 * acc;
  };

  // Returns the violation extremes m (over I_up) and M (over I_low).
  auto select = [&](std::size_t& i, std::size_t& j, double& m, double& M) {
    m = -std::numeric_limits<double>::infinity();
    M = std::numeric_limits<double>::infinity();
    i = j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(y[t], a[t], upper[t]) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(y[t], a[t], upper[t]) && v < M) {
        M = v;
        j = t;
      }
    }
  };

  std::size_t i = n, j = n;
  double m = 0.0, M = 0.0;
  while (true) {
    select(i, j, m, M);
    if (i == n || j == n || m - M < tolerance) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iterations) break;
    ++sol.iterations;

    const double* Ki = kernel.row(i);
    const double* Kj = kernel.row(j);
    const double Ci = upper[i], Cj = upper[j];
    const double old_ai = a[i], old_aj = a[j];
    const double yi = y[i], yj = y[j];
    const double Qij = yi * yj * Ki[j];

    if (y[i] != y[j]) {
      double quad = kernel.diagonal(i) + kernel.diagonal(j) + 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > Ci - Cj) {
        if (a[i] > Ci) {
          a[i] = Ci;
          a[j] = Ci - diff;
        }
      } else if (a[j] > Cj) {
        a[j] = Cj;
        a[i] = Cj + diff;
      }
    } else {
      double quad = kernel.diagonal(i) + kernel.diagonal(j) - 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > Ci) {
        if (a[i] > Ci) {
          a[i] = Ci;
          a[j] = sum - Ci;
        }
      } else if (a[j] < 0.0) {
        a[j] = 0.0;
        a[i] = sum;
      }
      if (sum > Cj) {
        if (a[j] > Cj) {
          a[j] = Cj;
          a[i] = sum - Cj;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = sum;
      }
    }

    const double dai = (a[i] - old_ai) * yi;
    const double daj = (a[j] - old_aj) * yj;
    for (std::size_t k = 0; k < n; ++k) G[k] += y[k] * (Ki[k] * dai + Kj[k] * daj);
    if (trace_objective) sol.objective_trace.push_back(objective());
  }

  // Free vectors pin the bias exactly; otherwise any value in [M, m] keeps
  // every point within tolerance.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (a[t] > 0.0 && a[t] < upper[t]) {
      free_sum += -y[t] * G[t];
      ++free_count;
    }
  }
  const double lo = std::min(m, M), hi = std::max(m, M);
  if (free_count > 0) {
    sol.bias = free_sum / static_cast<double>(free_count);
    if (std::isfinite(lo) && std::isfinite(hi)) sol.bias = std::clamp(sol.bias, lo, hi);
  } else if (std::isfinite(m) && std::isfinite(M)) {
    sol.bias = 0.5 * (m + M);
  } else {
    sol.bias = std::isfinite(m) ? m : (std::isfinite(M) ? M : 0.0);
  }
  sol.objective = objective();
  return sol;
}

SvmModel svm_train(const Matrix& X, std::span<const int> y, double C, double gamma, const SvmOptions& opts,
                   TrainInfo* info, Diagnostics* diag) {
  check_matrix(X, "svm_train");
  if (y.size() != X.size()) throw LengthError("svm_train: label count differs from row count");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw LabelError("svm_train: labels must be +1 or -1");
  }
  if (!pos || !neg) throw ClassError("svm_train needs examples of both classes");
  if (!(C > 0.0) || !(gamma > 0.0) || !std::isfinite(C) || !std::isfinite(gamma)) {
    throw DomainError("svm_train: C and gamma must be positive and finite");
  }
  if (!(opts.positive_weight > 0.0) || !(opts.negative_weight > 0.0)) {
    throw DomainError("svm_train: class weights must be positive");
  }

  SvmModel model;
  model.C = C;
  model.gamma = gamma;
  Matrix standardized;
  if (opts.standardize) {
    model.standardizer = standardize_fit(X, diag);
    standardized = standardize_apply(model.standardizer, X);
  }
  const Matrix& Z = opts.standardize ? standardized : X;

  const std::size_t n = Z.size();
  std::vector<double> upper(n);
  for (std::size_t t = 0; t < n; ++t) upper[t] = C * (y[t] > 0 ? opts.positive_weight : opts.negative_weight);

  DualSolution sol;
  if (n <= opts.full_gram_limit) {
    DenseKernel k(rbf_gram(Z, gamma), n);
    sol = solve_dual(k, y, upper, opts.tolerance, opts.max_iterations, opts.trace_objective);
  } else {
    const std::size_t rows = opts.cache_megabytes * (std::size_t{1} << 20) / (sizeof(double) * n);
    CachedRbfKernel k(Z, gamma, rows);
    sol = solve_dual(k, y, upper, opts.tolerance, opts.max_iterations, opts.trace_objective);
  }

  for (std::size_t t = 0; t < n; ++t) {
    if (sol.alpha[t] > 0.0) {
      model.support_vectors.push_back(Z[t]);
      model.dual_coefs.push_back(sol.alpha[t] * y[t]);
    }
  }
  model.bias = sol.bias;
  if (info) {
    info->iterations = sol.iterations;
    info->converged = sol.converged;
    info->dual_objective = sol.objective;
    info->alpha = std::move(sol.alpha);
    info->objective_trace = std::move(sol.objective_trace);
  }
  if (!sol.converged) {
    throw ConvergenceError("SVM optimizer did not converge in " + std::to_string(opts.max_iterations) + " iterations",
                           std::move(model));
  }
  return model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) throw LengthError("svm_decision: input dimension differs from model");
  std::vector<double> z;
  std::span<const double> u = x;
  if (!model.standardizer.empty()) {
    z = model.standardizer.apply(x);
    u = z;
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
    acc += model.dual_coefs[s] * rbf_kernel(model.support_vectors[s], u, model.gamma);
  }
  return acc + model.bias;
}

int svm_predict(const SvmModel& model, std::span<const double> x) { return svm_decision(model, x) >= 0.0 ? 1 : -1; }

std::vector<double> svm_decision(const SvmModel& model, const Matrix& X) {
  std::vector<double> out;
  out.reserve(X.size());
  for (const auto& row : X) out.push_back(svm_decision(model, row));
  return out;
}

std::string model_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["format"] = "fogkit-svm";
  j["format_version"] = 1;
  j["kernel"] = "rbf";
  j["gamma"] = model.gamma;
  j["C"] = model.C;
  j["bias"] = model.bias;
  j["dual_coefs"] = model.dual_coefs;
  j["support_vectors"] = model.support_vectors;
  j["standardizer"] = {{"mean", model.standardizer.mean}, {"sd", model.standardizer.sd}};
  return j.dump();
}

SvmModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "fogkit-svm") throw FormatError("not a fogkit SVM model");
    if (j.at("format_version").get<int>() != 1) throw FormatError("unsupported model format version");
    SvmModel m;
    m.gamma = j.at("gamma").get<double>();
    m.C = j.at("C").get<double>();
    m.bias = j.at("bias").get<double>();
    m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<Matrix>();
    m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.sd = j.at("standardizer").at("sd").get<std::vector<double>>();
    if (m.dual_coefs.size() != m.support_vectors.size()) throw FormatError("model has mismatched coefficient count");
    if (m.standardizer.mean.size() != m.standardizer.sd.size()) throw FormatError("model standardizer is malformed");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file is missing fields: ") + e.what());
  }
}

void save_model(const SvmModel& model, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  out << model_to_json(model) << '\n';
}

SvmModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw NotFound("cannot open model " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace fogkit
