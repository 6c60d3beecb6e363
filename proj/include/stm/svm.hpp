// include/stm/svm.hpp

// Copyright 2026 The stmaudio Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "stm/classify.hpp"
#include "stm/common.hpp"

// Soft-margin SVM with an RBF kernel, trained by sequential minimal
// optimization on the dual. The decision function is
// sign(sum_i alpha_i y_i K(x, x_i) + b) with K(x,z) = exp(-gamma |x-z|^2).

namespace stm {

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alphas;   // 0 < alpha_i <= C
  std::vector<int> sv_labels;   // -1/+1
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  size_t dim = 0;
  bool converged = true;
};

/// Raw dual decision value sum_i alpha_i y_i K(x, x_i) + b.
inline double svm_margin(const SvmModel& m, const std::vector<double>& x) {
  if (x.size() != m.dim)
    throw InvalidArgumentError("svm_predict: dimension mismatch (" +
                               std::to_string(x.size()) + " vs " +
                               std::to_string(m.dim) + ")");
  double acc = 0.0;
  for (size_t i = 0; i < m.support_vectors.size(); ++i)
    acc += m.alphas[i] * m.sv_labels[i] *
           std::exp(-m.gamma * squared_distance(x, m.support_vectors[i]));
  return acc + m.bias;
}

/// Classify; an exact zero margin resolves to +1.
inline int svm_predict(const SvmModel& m, const std::vector<double>& x) {
  return svm_margin(m, x) >= 0.0 ? +1 : -1;
}

/// gamma = 1 / (d * mean per-dimension population variance). Degenerate
/// all-constant data falls back to gamma = 1.
inline double svm_scale_gamma(const LabeledSet& data) {
  const size_t n = data.size(), d = data.dim();
  double total_var = 0.0;
  for (size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += data.vectors[i][j];
    mean /= n;
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double c = data.vectors[i][j] - mean;
      var += c * c;
    }
    total_var += var / n;
  }
  const double mean_var = total_var / d;
  if (mean_var <= 0.0) return 1.0;
  return 1.0 / (static_cast<double>(d) * mean_var);
}

namespace svm_detail {

class SmoSolver {
 public:
  SmoSolver(const LabeledSet& data, double C, double gamma, double tol,
            int max_passes)
      : x_(data.vectors),
        y_(data.labels),
        n_(data.size()),
        C_(C),
        gamma_(gamma),
        tol_(tol),
        max_passes_(max_passes),
        alpha_(data.size(), 0.0),
        error_(data.size(), 0.0),
        gram_(data.size() * data.size()) {
    for (size_t i = 0; i < n_; ++i) {
      gram_[i * n_ + i] = 1.0;
      for (size_t j = i + 1; j < n_; ++j) {
        const double k = std::exp(-gamma_ * squared_distance(x_[i], x_[j]));
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
    for (size_t i = 0; i < n_; ++i) error_[i] = -y_[i];  // f(x)=0 initially
  }

  bool solve() {
    int passes = 0;
    bool examine_all = true;
    while (passes < max_passes_) {
      ++passes;
      int changed = 0;
      for (size_t i2 = 0; i2 < n_; ++i2) {
        if (!examine_all && !is_free(i2)) continue;
        changed += examine(i2);
      }
      if (examine_all) {
        if (changed == 0) return true;  // KKT satisfied everywhere
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    return false;
  }

  std::vector<double>& alphas() { return alpha_; }

  double bias() const { return b_; }

 private:
  bool is_free(size_t i) const {
    return alpha_[i] > 1e-8 && alpha_[i] < C_ - 1e-8;
  }

  double k(size_t i, size_t j) const { return gram_[i * n_ + j]; }

  int examine(size_t i2) {
    const double r2 = error_[i2] * y_[i2];
    const bool violates = (r2 < -tol_ && alpha_[i2] < C_ - 1e-12) ||
                          (r2 > tol_ && alpha_[i2] > 1e-12);
    if (!violates) return 0;
    // Second-choice heuristic: maximize |E1 - E2| over the free set.
    size_t best = n_;
    double best_gap = -1.0;
    for (size_t i = 0; i < n_; ++i) {
      if (i == i2 || !is_free(i)) continue;
      const double gap = std::abs(error_[i] - error_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;
    for (size_t i = 0; i < n_; ++i)
      if (i != i2 && is_free(i) && take_step(i, i2)) return 1;
    for (size_t i = 0; i < n_; ++i)
      if (i != i2 && !is_free(i) && take_step(i, i2)) return 1;
    return 0;
  }

  bool take_step(size_t i1, size_t i2) {
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const int s = y_[i1] * y_[i2];
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(C_, C_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - C_);
      hi = std::min(C_, a1_old + a2_old);
    }
    if (lo >= hi) return false;
    const double eta = k(i1, i1) + k(i2, i2) - 2.0 * k(i1, i2);
    if (eta <= 1e-12) return false;  // RBF Gram is PSD; eta > 0 generically
    double a2 = a2_old + y_[i2] * (error_[i1] - error_[i2]) / eta;
    a2 = std::clamp(a2, lo, hi);
    if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;
    const double a1 = a1_old + s * (a2_old - a2);

    // Bias update keeps the KKT conditions tight on the two moved points.
    const double b_old = b_;
    const double b1 = b_ - error_[i1] - y_[i1] * (a1 - a1_old) * k(i1, i1) -
                      y_[i2] * (a2 - a2_old) * k(i1, i2);
    const double b2 = b_ - error_[i2] - y_[i1] * (a1 - a1_old) * k(i1, i2) -
                      y_[i2] * (a2 - a2_old) * k(i2, i2);
    if (a1 > 1e-8 && a1 < C_ - 1e-8)
      b_ = b1;
    else if (a2 > 1e-8 && a2 < C_ - 1e-8)
      b_ = b2;
    else
      b_ = 0.5 * (b1 + b2);

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    const double d1 = y_[i1] * (a1 - a1_old);
    const double d2 = y_[i2] * (a2 - a2_old);
    for (size_t i = 0; i < n_; ++i)
      error_[i] += d1 * k(i1, i) + d2 * k(i2, i) + (b_ - b_old);
    return true;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<int>& y_;
  size_t n_;
  double C_, gamma_, tol_;
  int max_passes_;
  double b_ = 0.0;
  std::vector<double> alpha_;
  std::vector<double> error_;  // f(x_i) - y_i
  std::vector<double> gram_;
};

}  // namespace svm_detail

/// Train by SMO. gamma == nullopt selects the "scale" heuristic. On
/// non-convergence the best iterate is returned with converged = false.
inline SvmModel svm_train(const LabeledSet& data, double C = 1.0,
                          std::optional<double> gamma = std::nullopt,
                          double kkt_tol = 1e-3, int max_passes = 10000) {
  data.validate(true);
  if (C <= 0.0) throw InvalidArgumentError("svm_train: C must be positive");
  if (gamma && *gamma <= 0.0)
    throw InvalidArgumentError("svm_train: gamma must be positive");
  const double g = gamma ? *gamma : svm_scale_gamma(data);

  svm_detail::SmoSolver solver(data, C, g, kkt_tol, max_passes);
  const bool converged = solver.solve();

  SvmModel m;
  m.gamma = g;
  m.C = C;
  m.dim = data.dim();
  m.bias = solver.bias();
  m.converged = converged;
  const auto& alpha = solver.alphas();
  for (size_t i = 0; i < data.size(); ++i) {
    if (alpha[i] > 1e-8) {
      m.support_vectors.push_back(data.vectors[i]);
      m.alphas.push_back(alpha[i]);
      m.sv_labels.push_back(data.labels[i]);
    }
  }
  return m;
}

}  // namespace stm
