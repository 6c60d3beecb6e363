// include/stm/classify.hpp

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

#include <vector>

#include "stm/common.hpp"

// Shared training-set contract for the binary classifiers.
// Labels are -1 (genuine) and +1 (imitated).

namespace stm {

struct LabeledSet {
  std::vector<std::vector<double>> vectors;
  std::vector<int> labels;  // each -1 or +1

  size_t size() const { return vectors.size(); }
  size_t dim() const { return vectors.empty() ? 0 : vectors[0].size(); }

  /// Checks lengths, label domain, consistent dimensionality, and (when
  /// `for_training`) presence of both classes.
  void validate(bool for_training = true) const {
    if (vectors.size() != labels.size())
      throw InvalidArgumentError("labeled set: vectors/labels length mismatch");
    if (vectors.empty())
      throw InvalidArgumentError("labeled set: empty");
    const size_t d = vectors[0].size();
    bool has_pos = false, has_neg = false;
    for (size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].size() != d)
        throw InvalidArgumentError("labeled set: ragged vector dimensions");
      if (labels[i] != -1 && labels[i] != +1)
        throw InvalidArgumentError("labeled set: labels must be -1 or +1");
      (labels[i] == +1 ? has_pos : has_neg) = true;
    }
    if (for_training && !(has_pos && has_neg))
      throw InvalidArgumentError(
          "labeled set: training needs at least one sample per class");
  }
};

inline double squared_distance(const std::vector<double>& a,
                               const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace stm
