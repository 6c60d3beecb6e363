// include/stm/experiment.hpp

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

#include <array>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stm/cache.hpp"
#include "stm/manifest.hpp"
#include "stm/model_io.hpp"
#include "stm/pipeline.hpp"
#include "stm/synth.hpp"

// Experiment orchestration: populate the feature cache, train one
// classifier per configuration, evaluate on the test split, and write
// machine-readable reports. Reports carry no timestamps, so identical
// (config, seed, inputs) runs produce byte-identical artifacts.

namespace stm {

struct Hyperparams {
  double svm_c = 1.0;
  std::optional<double> svm_gamma;  // nullopt = "scale"
  int knn_k = 5;
  uint32_t et_trees = 100;
  uint32_t et_features = 0;  // 0 = round(sqrt(d))
  uint32_t et_min_split = 2;
};

struct ExperimentConfig {
  FilterKind frontend = FilterKind::gammatone;
  FeatureKind feature = FeatureKind::stm_global;
  ModelKind classifier = ModelKind::svm;
  Hyperparams hp;
  ExtractionConfig extraction;
  uint64_t seed = 0;
  bool disjoint_splits = false;
  std::string cache_dir;
  std::string manifest_path;

  std::string tag() const {
    return std::string(to_string(frontend)) + "_" +
           (feature == FeatureKind::stm_global ? "global" : "segmental") +
           "_" + to_string(classifier);
  }
};

/// Accuracies reported for the original human-imitated speech corpus (not
/// distributed with this project); informative context in reports only.
inline std::optional<double> reference_accuracy(FilterKind fe, FeatureKind fk,
                                                ModelKind cl) {
  const bool gc = fe == FilterKind::gammachirp;
  if (fk == FeatureKind::stm_global) {
    switch (cl) {
      case ModelKind::svm: return gc ? 0.62 : 0.61;
      case ModelKind::knn: return gc ? 0.69 : 0.68;
      case ModelKind::extra_trees: return gc ? 0.62 : 0.63;
    }
  } else {
    switch (cl) {
      case ModelKind::svm: return 0.67;
      case ModelKind::knn: return 0.60;
      case ModelKind::extra_trees: return gc ? 0.71 : 0.69;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Extraction over a manifest.
// ---------------------------------------------------------------------------

struct ExtractStats {
  size_t computed = 0;
  size_t cache_hits = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (path, why)
};

/// Fill the cache for one frontend and any subset of feature kinds. Clips
/// run in parallel; the spectrogram is computed once per clip even when
/// both feature kinds are missing. Per-file failures are collected, not
/// thrown.
inline ExtractStats run_extract(const Extractor& ex,
                                const DatasetManifest& manifest,
                                FilterKind frontend,
                                const std::vector<FeatureKind>& kinds,
                                const std::string& cache_dir) {
  ExtractStats stats;
  std::mutex mu;
  parallel_for(manifest.entries.size(), [&](size_t i) {
    const auto& entry = manifest.entries[i];
    try {
      const std::string sid = entry.source_id();
      std::vector<FeatureKind> missing;
      for (FeatureKind k : kinds) {
        if (cache_get(cache_dir, sid, k, frontend, ex.fingerprint(frontend, k)))
          continue;
        missing.push_back(k);
      }
      if (missing.empty()) {
        std::lock_guard<std::mutex> lock(mu);
        stats.cache_hits += kinds.size();
        return;
      }
      auto clip = load_audio(entry.path, ex.config().sample_rate());
      clip.source_id = sid;
      auto sg = ex.spectrogram(frontend, clip);
      for (FeatureKind k : missing) {
        auto f = ex.extract(frontend, k, sg);
        cache_put(record_from_feature(f, ex.fingerprint(frontend, k)),
                  cache_dir);
      }
      std::lock_guard<std::mutex> lock(mu);
      stats.cache_hits += kinds.size() - missing.size();
      stats.computed += missing.size();
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      stats.failures.emplace_back(entry.path, e.what());
    }
  });
  return stats;
}

namespace exp_detail {

/// Cached features for a split, in manifest order. Missing records are an
/// error (extraction is a separate, explicit step).
inline std::vector<StmFeature> cached_split_features(
    const ExperimentConfig& cfg, const DatasetManifest& manifest, Split split) {
  const uint64_t fp =
      pipeline_fingerprint(cfg.extraction, cfg.frontend, cfg.feature);
  std::vector<StmFeature> out;
  std::vector<std::string> missing;
  for (size_t i : manifest.indices(split)) {
    const auto& e = manifest.entries[i];
    auto rec = cache_get(cfg.cache_dir, e.source_id(), cfg.feature,
                         cfg.frontend, fp);
    if (!rec) {
      missing.push_back(e.raw_path);
      continue;
    }
    out.push_back(feature_from_record(*rec));
  }
  if (!missing.empty()) {
    std::string what = "missing cached features for " +
                       std::to_string(missing.size()) + " " +
                       std::string(to_string(split)) + " clip(s): ";
    for (size_t i = 0; i < missing.size() && i < 5; ++i)
      what += (i ? ", " : "") + missing[i];
    throw FileError(what + " — run `extract` first");
  }
  return out;
}

inline std::vector<int> split_labels(const DatasetManifest& manifest,
                                     Split split) {
  std::vector<int> y;
  for (size_t i : manifest.indices(split))
    y.push_back(label_value(manifest.entries[i].label));
  return y;
}

}  // namespace exp_detail

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

inline TrainedPipeline run_train(const ExperimentConfig& cfg,
                                 const DatasetManifest& manifest) {
  auto features = exp_detail::cached_split_features(cfg, manifest,
                                                    Split::train);
  if (features.empty())
    throw InvalidArgumentError("run_train: empty training split");
  std::vector<size_t> fit_on(features.size());
  for (size_t i = 0; i < fit_on.size(); ++i) fit_on[i] = i;
  auto [vectors, standardizer] = flatten_standardize(features, fit_on);

  LabeledSet data;
  for (auto& v : vectors) data.vectors.push_back(std::move(v.values));
  data.labels = exp_detail::split_labels(manifest, Split::train);

  TrainedPipeline p;
  p.standardizer = std::move(standardizer);
  p.pipeline_fingerprint =
      pipeline_fingerprint(cfg.extraction, cfg.frontend, cfg.feature);
  switch (cfg.classifier) {
    case ModelKind::svm:
      p.model = svm_train(data, cfg.hp.svm_c, cfg.hp.svm_gamma);
      break;
    case ModelKind::knn:
      p.model = knn_train(data, cfg.hp.knn_k);
      break;
    case ModelKind::extra_trees:
      p.model = extratrees_train(data, cfg.hp.et_trees, cfg.hp.et_features,
                                 cfg.hp.et_min_split, cfg.seed);
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

struct SamplePrediction {
  std::string source_id;
  Label truth;
  Label predicted;
  double score;  // classifier-specific signed score, positive -> imitated
};

struct EvalReport {
  double accuracy = 0.0;
  // confusion[true][predicted], index 0 = genuine, 1 = imitated.
  std::array<std::array<size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};
  std::vector<SamplePrediction> predictions;
  size_t test_size = 0;
  uint64_t pipeline_fingerprint = 0;
  std::optional<double> reference;
  ExperimentConfig config;
};

inline EvalReport run_evaluate(const ExperimentConfig& cfg,
                               const DatasetManifest& manifest,
                               const TrainedPipeline& pipeline) {
  const uint64_t fp =
      pipeline_fingerprint(cfg.extraction, cfg.frontend, cfg.feature);
  if (pipeline.pipeline_fingerprint != fp)
    throw InvalidArgumentError(
        "run_evaluate: model was trained under a different pipeline "
        "fingerprint");
  if (!pipeline.standardizer)
    throw InvalidArgumentError("run_evaluate: model lacks standardization");

  auto features = exp_detail::cached_split_features(cfg, manifest,
                                                    Split::test);
  if (features.empty())
    throw InvalidArgumentError("run_evaluate: empty test split");

  EvalReport rep;
  rep.config = cfg;
  rep.pipeline_fingerprint = fp;
  rep.reference = reference_accuracy(cfg.frontend, cfg.feature,
                                     cfg.classifier);
  const auto test_idx = manifest.indices(Split::test);
  size_t correct = 0;
  for (size_t j = 0; j < features.size(); ++j) {
    const auto& entry = manifest.entries[test_idx[j]];
    auto x = pipeline.standardizer->transform(flatten(features[j]));
    auto [label, score] = predict_with_score(pipeline.model, x);
    SamplePrediction sp;
    sp.source_id = features[j].source_id;
    sp.truth = entry.label;
    sp.predicted = label == +1 ? Label::imitated : Label::genuine;
    sp.score = score;
    const size_t ti = entry.label == Label::genuine ? 0 : 1;
    const size_t pi = sp.predicted == Label::genuine ? 0 : 1;
    rep.confusion[ti][pi] += 1;
    correct += ti == pi;
    rep.predictions.push_back(std::move(sp));
  }
  rep.test_size = features.size();
  rep.accuracy = static_cast<double>(correct) / rep.test_size;
  return rep;
}

// ---------------------------------------------------------------------------
// Report files.
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  const auto& fb = cfg.extraction.filterbank;
  return nlohmann::json{
      {"frontend", to_string(cfg.frontend)},
      {"feature", cfg.feature == FeatureKind::stm_global ? "global"
                                                         : "segmental"},
      {"classifier", to_string(cfg.classifier)},
      {"seed", cfg.seed},
      {"disjoint_splits", cfg.disjoint_splits},
      {"manifest", cfg.manifest_path},
      {"hyperparameters",
       {{"svm_c", cfg.hp.svm_c},
        {"svm_gamma", cfg.hp.svm_gamma ? nlohmann::json(*cfg.hp.svm_gamma)
                                       : nlohmann::json("scale")},
        {"knn_k", cfg.hp.knn_k},
        {"et_trees", cfg.hp.et_trees},
        {"et_features_per_node", cfg.hp.et_features},
        {"et_min_samples_split", cfg.hp.et_min_split}}},
      {"extraction",
       {{"sample_rate", fb.sample_rate},
        {"channels", fb.num_channels},
        {"f_min_hz", fb.f_min},
        {"f_max_hz", fb.f_max},
        {"order", fb.order},
        {"bandwidth_factor", fb.bandwidth_factor},
        {"chirp", cfg.frontend == FilterKind::gammachirp ? fb.chirp : 0.0},
        {"ir_length", fb.ir_length},
        {"envelope_cutoff_hz", cfg.extraction.envelope_cutoff_hz},
        {"envelope_rate_hz", cfg.extraction.envelope_rate},
        {"global_frames", cfg.extraction.global_frames},
        {"segment_frames", cfg.extraction.segment_frames},
        {"segment_hop", cfg.extraction.segment_hop}}}};
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : rep.predictions)
    preds.push_back({{"source_id", p.source_id},
                     {"true", to_string(p.truth)},
                     {"predicted", to_string(p.predicted)},
                     {"score", p.score}});
  nlohmann::json j{
      {"accuracy", rep.accuracy},
      {"test_size", rep.test_size},
      {"confusion",
       {{"rows", "true: genuine, imitated"},
        {"cols", "predicted: genuine, imitated"},
        {"matrix",
         {{rep.confusion[0][0], rep.confusion[0][1]},
          {rep.confusion[1][0], rep.confusion[1][1]}}}}},
      {"pipeline_fingerprint", hex64(rep.pipeline_fingerprint)},
      {"config", config_to_json(rep.config)},
      {"predictions", preds}};
  j["reference_accuracy"] =
      rep.reference ? nlohmann::json(*rep.reference) : nlohmann::json();
  return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileError("cannot write " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw FileError("write failed: " + path);
}

inline void write_report_json(const EvalReport& rep, const std::string& path) {
  write_text_file(path, report_to_json(rep).dump(2) + "\n");
}

inline void write_confusion_csv(const EvalReport& rep,
                                const std::string& path) {
  std::string body = ",pred_genuine,pred_imitated\n";
  body += "true_genuine," + std::to_string(rep.confusion[0][0]) + "," +
          std::to_string(rep.confusion[0][1]) + "\n";
  body += "true_imitated," + std::to_string(rep.confusion[1][0]) + "," +
          std::to_string(rep.confusion[1][1]) + "\n";
  write_text_file(path, body);
}

// ---------------------------------------------------------------------------
// Matrix dumps (CSV + PGM heatmap) for visual inspection.
// ---------------------------------------------------------------------------

inline void write_matrix_csv(const std::vector<std::vector<double>>& rows,
                             const std::string& path) {
  std::string body;
  char buf[40];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", row[i]);
      if (i) body += ',';
      body += buf;
    }
    body += '\n';
  }
  write_text_file(path, body);
}

/// 8-bit PGM, log-compressed; row 0 of the matrix is the first image row.
inline void write_pgm(const std::vector<std::vector<double>>& rows,
                      const std::string& path) {
  if (rows.empty() || rows[0].empty())
    throw InvalidArgumentError("write_pgm: empty matrix");
  double mx = 0.0;
  for (const auto& row : rows)
    for (double v : row) mx = std::max(mx, v);
  const size_t h = rows.size(), w = rows[0].size();
  std::string body = "P5\n" + std::to_string(w) + " " + std::to_string(h) +
                     "\n255\n";
  const double denom = std::log1p(mx > 0.0 ? 1000.0 : 0.0);
  for (const auto& row : rows)
    for (double v : row) {
      double norm = mx > 0.0 ? std::log1p(1000.0 * v / mx) / denom : 0.0;
      body += static_cast<char>(std::lround(255.0 * std::clamp(norm, 0.0, 1.0)));
    }
  write_text_file(path, body);
}

// ---------------------------------------------------------------------------
// The 12-configuration grid and the synthetic demonstration.
// ---------------------------------------------------------------------------

struct GridResult {
  ExperimentConfig config;
  EvalReport report;
  std::string model_path;
  std::string report_path;
};

/// Extract (both frontends and feature kinds), then train and evaluate all
/// 2 x 2 x 3 configurations. Artifacts land in out_dir.
inline std::vector<GridResult> run_grid(const ExperimentConfig& base,
                                        const DatasetManifest& manifest,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Extractor ex(base.extraction);
  for (FilterKind fe : {FilterKind::gammatone, FilterKind::gammachirp}) {
    auto stats = run_extract(
        ex, manifest, fe,
        {FeatureKind::stm_global, FeatureKind::stm_segmental},
        base.cache_dir);
    if (!stats.failures.empty()) {
      std::string what = "extraction failed for " +
                         std::to_string(stats.failures.size()) + " file(s): ";
      for (size_t i = 0; i < stats.failures.size() && i < 3; ++i)
        what += (i ? "; " : "") + stats.failures[i].first + " (" +
                stats.failures[i].second + ")";
      throw Error(what);
    }
  }

  std::vector<GridResult> results;
  for (FilterKind fe : {FilterKind::gammatone, FilterKind::gammachirp})
    for (FeatureKind fk :
         {FeatureKind::stm_global, FeatureKind::stm_segmental})
      for (ModelKind cl :
           {ModelKind::svm, ModelKind::knn, ModelKind::extra_trees}) {
        ExperimentConfig cfg = base;
        cfg.frontend = fe;
        cfg.feature = fk;
        cfg.classifier = cl;
        auto pipeline = run_train(cfg, manifest);
        auto report = run_evaluate(cfg, manifest, pipeline);
        GridResult r;
        r.config = cfg;
        r.model_path = (fs::path(out_dir) / (cfg.tag() + ".model")).string();
        r.report_path =
            (fs::path(out_dir) / (cfg.tag() + ".report.json")).string();
        model_save_file(pipeline, r.model_path);
        write_report_json(report, r.report_path);
        write_confusion_csv(
            report,
            (fs::path(out_dir) / (cfg.tag() + ".confusion.csv")).string());
        r.report = std::move(report);
        results.push_back(std::move(r));
      }

  // Grid summary, one row per configuration.
  std::string csv = "frontend,feature,classifier,accuracy,reference\n";
  nlohmann::json jsum = nlohmann::json::array();
  for (const auto& r : results) {
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.6f", r.report.accuracy);
    csv += std::string(to_string(r.config.frontend)) + "," +
           (r.config.feature == FeatureKind::stm_global ? "global"
                                                        : "segmental") +
           "," + to_string(r.config.classifier) + "," + acc + "," +
           (r.report.reference ? std::to_string(*r.report.reference) : "") +
           "\n";
    jsum.push_back({{"tag", r.config.tag()},
                    {"accuracy", r.report.accuracy},
                    {"reference_accuracy",
                     r.report.reference ? nlohmann::json(*r.report.reference)
                                        : nlohmann::json()},
                    {"report", r.report_path},
                    {"model", r.model_path}});
  }
  write_text_file((fs::path(out_dir) / "summary.csv").string(), csv);
  write_text_file((fs::path(out_dir) / "summary.json").string(),
                  jsum.dump(2) + "\n");
  return results;
}

/// Generate the two-class corpus, then run the full grid on it.
inline std::vector<GridResult> run_synth_demo(
    const std::string& out_dir, uint64_t seed,
    const ExtractionConfig& extraction = {}, const Hyperparams& hp = {}) {
  namespace fs = std::filesystem;
  const std::string corpus_dir = (fs::path(out_dir) / "corpus").string();
  const std::string manifest_path =
      generate_demo_corpus(corpus_dir, seed, 20, 30);
  ExperimentConfig base;
  base.extraction = extraction;
  base.hp = hp;
  base.seed = seed;
  base.cache_dir = (fs::path(out_dir) / "cache").string();
  base.manifest_path = manifest_path;
  auto manifest = load_manifest(manifest_path);
  return run_grid(base, manifest, out_dir);
}

}  // namespace stm
