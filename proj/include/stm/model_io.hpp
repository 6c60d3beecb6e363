// include/stm/model_io.hpp

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

#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include "stm/common.hpp"
#include "stm/extra_trees.hpp"
#include "stm/knn.hpp"
#include "stm/modulation.hpp"
#include "stm/svm.hpp"

// Versioned binary container for trained models. A file holds one model,
// optionally bundled with the standardizer fitted alongside it, so a saved
// pipeline reproduces its predictions bit-for-bit.

namespace stm {

enum class ModelKind : uint8_t { svm = 1, knn = 2, extra_trees = 3 };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::svm: return "svm";
    case ModelKind::knn: return "knn";
    default: return "et";
  }
}

using AnyModel = std::variant<SvmModel, KnnModel, ExtraTreesModel>;

inline ModelKind kind_of(const AnyModel& m) {
  if (std::holds_alternative<SvmModel>(m)) return ModelKind::svm;
  if (std::holds_alternative<KnnModel>(m)) return ModelKind::knn;
  return ModelKind::extra_trees;
}

/// A standardizer plus classifier, the unit run_train persists.
struct TrainedPipeline {
  std::optional<Standardizer> standardizer;
  AnyModel model;
  uint64_t pipeline_fingerprint = 0;
};

namespace model_detail {

constexpr char kMagic[9] = "STMMDL01";
constexpr uint16_t kVersion = 1;

inline void put_vec(std::string& out, const std::vector<double>& v) {
  bytes::put<uint64_t>(out, v.size());
  for (double x : v) bytes::put<double>(out, x);
}

inline std::vector<double> get_vec(bytes::Reader& rd) {
  const auto n = rd.get<uint64_t>();
  std::vector<double> v(n);
  for (auto& x : v) x = rd.get<double>();
  return v;
}

inline void put_labels(std::string& out, const std::vector<int>& y) {
  bytes::put<uint64_t>(out, y.size());
  for (int v : y) bytes::put<int8_t>(out, static_cast<int8_t>(v));
}

inline std::vector<int> get_labels(bytes::Reader& rd) {
  const auto n = rd.get<uint64_t>();
  std::vector<int> y(n);
  for (auto& v : y) v = rd.get<int8_t>();
  return y;
}

inline void put_svm(std::string& out, const SvmModel& m) {
  bytes::put<double>(out, m.bias);
  bytes::put<double>(out, m.gamma);
  bytes::put<double>(out, m.C);
  bytes::put<uint64_t>(out, m.dim);
  bytes::put<uint8_t>(out, m.converged ? 1 : 0);
  put_vec(out, m.alphas);
  put_labels(out, m.sv_labels);
  bytes::put<uint64_t>(out, m.support_vectors.size());
  for (const auto& sv : m.support_vectors) put_vec(out, sv);
}

inline SvmModel get_svm(bytes::Reader& rd) {
  SvmModel m;
  m.bias = rd.get<double>();
  m.gamma = rd.get<double>();
  m.C = rd.get<double>();
  m.dim = rd.get<uint64_t>();
  m.converged = rd.get<uint8_t>() != 0;
  m.alphas = get_vec(rd);
  m.sv_labels = get_labels(rd);
  const auto n = rd.get<uint64_t>();
  m.support_vectors.resize(n);
  for (auto& sv : m.support_vectors) sv = get_vec(rd);
  return m;
}

inline void put_knn(std::string& out, const KnnModel& m) {
  bytes::put<uint32_t>(out, static_cast<uint32_t>(m.k));
  put_labels(out, m.labels);
  bytes::put<uint64_t>(out, m.vectors.size());
  for (const auto& v : m.vectors) put_vec(out, v);
}

inline KnnModel get_knn(bytes::Reader& rd) {
  KnnModel m;
  m.k = static_cast<int>(rd.get<uint32_t>());
  m.labels = get_labels(rd);
  const auto n = rd.get<uint64_t>();
  m.vectors.resize(n);
  for (auto& v : m.vectors) v = get_vec(rd);
  return m;
}

inline void put_tree(std::string& out, const std::vector<TreeNode>& tree) {
  bytes::put<uint64_t>(out, tree.size());
  for (const auto& n : tree) {
    bytes::put<int32_t>(out, n.feature);
    bytes::put<double>(out, n.threshold);
    bytes::put<int32_t>(out, n.left);
    bytes::put<int32_t>(out, n.right);
    bytes::put<double>(out, n.prob[0]);
    bytes::put<double>(out, n.prob[1]);
  }
}

inline std::vector<TreeNode> get_tree(bytes::Reader& rd) {
  const auto n = rd.get<uint64_t>();
  std::vector<TreeNode> tree(n);
  for (auto& node : tree) {
    node.feature = rd.get<int32_t>();
    node.threshold = rd.get<double>();
    node.left = rd.get<int32_t>();
    node.right = rd.get<int32_t>();
    node.prob[0] = rd.get<double>();
    node.prob[1] = rd.get<double>();
  }
  return tree;
}

inline void put_et(std::string& out, const ExtraTreesModel& m) {
  bytes::put<uint32_t>(out, m.features_per_node);
  bytes::put<uint32_t>(out, m.min_samples_split);
  bytes::put<uint64_t>(out, m.rng_seed);
  bytes::put<uint64_t>(out, m.dim);
  bytes::put<uint64_t>(out, m.trees.size());
  for (const auto& t : m.trees) put_tree(out, t);
}

inline ExtraTreesModel get_et(bytes::Reader& rd) {
  ExtraTreesModel m;
  m.features_per_node = rd.get<uint32_t>();
  m.min_samples_split = rd.get<uint32_t>();
  m.rng_seed = rd.get<uint64_t>();
  m.dim = rd.get<uint64_t>();
  const auto n = rd.get<uint64_t>();
  m.trees.resize(n);
  for (auto& t : m.trees) t = get_tree(rd);
  return m;
}

}  // namespace model_detail

inline std::string model_save(const TrainedPipeline& p) {
  std::string out(model_detail::kMagic, 8);
  bytes::put<uint16_t>(out, model_detail::kVersion);
  bytes::put<uint8_t>(out, static_cast<uint8_t>(kind_of(p.model)));
  bytes::put<uint8_t>(out, p.standardizer ? 1 : 0);
  bytes::put<uint64_t>(out, p.pipeline_fingerprint);
  if (p.standardizer) {
    model_detail::put_vec(out, p.standardizer->mean);
    model_detail::put_vec(out, p.standardizer->std);
  }
  if (const auto* svm = std::get_if<SvmModel>(&p.model))
    model_detail::put_svm(out, *svm);
  else if (const auto* knn = std::get_if<KnnModel>(&p.model))
    model_detail::put_knn(out, *knn);
  else
    model_detail::put_et(out, std::get<ExtraTreesModel>(p.model));
  return out;
}

inline std::string model_save(const AnyModel& m) {
  TrainedPipeline p;
  p.model = m;
  return model_save(p);
}

/// Load any model container; expected_kind (when given) rejects payloads of
/// the wrong classifier family.
inline TrainedPipeline model_load(
    const std::string& data,
    std::optional<ModelKind> expected_kind = std::nullopt) {
  bytes::Reader rd(data);
  if (rd.remaining() < 8 ||
      rd.get_bytes(8) != std::string(model_detail::kMagic, 8))
    throw FormatError("model container: bad magic");
  const auto version = rd.get<uint16_t>();
  if (version != model_detail::kVersion)
    throw FormatError("model container: unsupported version " +
                      std::to_string(version));
  const auto kind_tag = rd.get<uint8_t>();
  if (kind_tag < 1 || kind_tag > 3)
    throw FormatError("model container: unknown kind tag " +
                      std::to_string(kind_tag));
  const auto kind = static_cast<ModelKind>(kind_tag);
  if (expected_kind && kind != *expected_kind)
    throw FormatError(std::string("model container: expected a ") +
                      to_string(*expected_kind) + " model, found " +
                      to_string(kind));
  TrainedPipeline p;
  const bool has_std = rd.get<uint8_t>() != 0;
  p.pipeline_fingerprint = rd.get<uint64_t>();
  if (has_std) {
    Standardizer st;
    st.mean = model_detail::get_vec(rd);
    st.std = model_detail::get_vec(rd);
    p.standardizer = std::move(st);
  }
  switch (kind) {
    case ModelKind::svm: p.model = model_detail::get_svm(rd); break;
    case ModelKind::knn: p.model = model_detail::get_knn(rd); break;
    case ModelKind::extra_trees: p.model = model_detail::get_et(rd); break;
  }
  if (rd.remaining() != 0)
    throw FormatError("model container: " + std::to_string(rd.remaining()) +
                      " trailing bytes");
  return p;
}

inline void model_save_file(const TrainedPipeline& p, const std::string& path) {
  const std::string blob = model_save(p);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileError("cannot write model file: " + path);
  f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!f) throw FileError("model write failed: " + path);
}

inline TrainedPipeline model_load_file(
    const std::string& path,
    std::optional<ModelKind> expected_kind = std::nullopt) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open model file: " + path);
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return model_load(data, expected_kind);
}

/// Unified prediction across model kinds. Returns (label, score): the SVM
/// margin, the KNN vote balance, or the Extra Trees P(+1) - P(-1).
inline std::pair<int, double> predict_with_score(const AnyModel& m,
                                                 const std::vector<double>& x) {
  if (const auto* svm = std::get_if<SvmModel>(&m)) {
    const double margin = svm_margin(*svm, x);
    return {margin >= 0.0 ? +1 : -1, margin};
  }
  if (const auto* knn = std::get_if<KnnModel>(&m)) {
    const double s = knn_score(*knn, x);
    return {s > 0.0 ? +1 : -1, s};
  }
  const auto& et = std::get<ExtraTreesModel>(m);
  const auto p = extratrees_posterior(et, x);
  return {p[1] > p[0] ? +1 : -1, p[1] - p[0]};
}

}  // namespace stm
