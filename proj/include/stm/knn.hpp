// include/stm/knn.hpp

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

#include <algorithm>
#include <vector>

#include "stm/classify.hpp"
#include "stm/common.hpp"

// Exact k-nearest-neighbor majority vote under the Euclidean metric.
// Ties are deterministic: equal distances prefer the lower training index,
// split votes resolve to -1 (genuine).

namespace stm {

struct KnnModel {
  std::vector<std::vector<double>> vectors;
  std::vector<int> labels;
  int k = 5;
};

inline KnnModel knn_train(const LabeledSet& data, int k = 5) {
  data.validate(true);
  if (k < 1 || static_cast<size_t>(k) > data.size())
    throw InvalidArgumentError("knn_train: need 1 <= k <= training size");
  return KnnModel{data.vectors, data.labels, k};
}

/// Indices of the k nearest training points, nearest first.
inline std::vector<size_t> knn_neighbors(const KnnModel& m,
                                         const std::vector<double>& x) {
  if (x.size() != (m.vectors.empty() ? 0 : m.vectors[0].size()))
    throw InvalidArgumentError("knn_predict: dimension mismatch");
  std::vector<std::pair<double, size_t>> dist(m.vectors.size());
  for (size_t i = 0; i < m.vectors.size(); ++i)
    dist[i] = {squared_distance(x, m.vectors[i]), i};
  std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());
  std::vector<size_t> out(m.k);
  for (int i = 0; i < m.k; ++i) out[i] = dist[i].second;
  return out;
}

/// Vote balance in [-1, 1]: (votes(+1) - votes(-1)) / k.
inline double knn_score(const KnnModel& m, const std::vector<double>& x) {
  int pos = 0;
  for (size_t i : knn_neighbors(m, x)) pos += m.labels[i] == +1 ? 1 : 0;
  return (2.0 * pos - m.k) / m.k;
}

inline int knn_predict(const KnnModel& m, const std::vector<double>& x) {
  return knn_score(m, x) > 0.0 ? +1 : -1;
}

}  // namespace stm
