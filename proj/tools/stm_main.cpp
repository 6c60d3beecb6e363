// tools/stm_main.cpp

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stm/stm.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string manifest;
  std::string cache_dir;
  std::string frontend = "gtfb";
  std::string feature = "global";
  std::string classifier = "svm";
  uint64_t seed = 0;
  bool disjoint = false;
  stm::Hyperparams hp;
  std::string svm_gamma = "scale";
  stm::ExtractionConfig extraction;
};

stm::FilterKind parse_frontend(const std::string& s) {
  if (s == "gtfb") return stm::FilterKind::gammatone;
  if (s == "gcfb") return stm::FilterKind::gammachirp;
  throw stm::InvalidArgumentError("unknown frontend: " + s);
}

stm::FeatureKind parse_feature(const std::string& s) {
  if (s == "global") return stm::FeatureKind::stm_global;
  if (s == "segmental") return stm::FeatureKind::stm_segmental;
  throw stm::InvalidArgumentError("unknown feature kind: " + s);
}

stm::ModelKind parse_classifier(const std::string& s) {
  if (s == "svm") return stm::ModelKind::svm;
  if (s == "knn") return stm::ModelKind::knn;
  if (s == "et") return stm::ModelKind::extra_trees;
  throw stm::InvalidArgumentError("unknown classifier: " + s);
}

void add_filterbank_flags(CLI::App* cmd, stm::ExtractionConfig& ex) {
  cmd->add_option("--rate", ex.filterbank.sample_rate,
                  "Pipeline sample rate in Hz");
  cmd->add_option("--channels", ex.filterbank.num_channels,
                  "Number of auditory channels");
  cmd->add_option("--fmin", ex.filterbank.f_min, "Lowest center frequency");
  cmd->add_option("--fmax", ex.filterbank.f_max, "Highest center frequency");
  cmd->add_option("--order", ex.filterbank.order, "Gamma envelope order");
  cmd->add_option("--bandwidth-factor", ex.filterbank.bandwidth_factor,
                  "ERB bandwidth multiplier");
  cmd->add_option("--chirp", ex.filterbank.chirp,
                  "Gammachirp glide coefficient");
  cmd->add_option("--ir-length", ex.filterbank.ir_length,
                  "Impulse response length in samples");
}

void add_classifier_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--svm-c", o.hp.svm_c, "SVM box constraint C");
  cmd->add_option("--svm-gamma", o.svm_gamma,
                  "RBF gamma ('scale' or a positive number)");
  cmd->add_option("--knn-k", o.hp.knn_k, "KNN neighbor count");
  cmd->add_option("--et-trees", o.hp.et_trees, "Extra Trees ensemble size");
  cmd->add_option("--et-features", o.hp.et_features,
                  "Features tried per node (0 = sqrt(d))");
  cmd->add_option("--et-min-split", o.hp.et_min_split,
                  "Minimum samples to split a node");
}

void finish_hyperparams(CommonOpts& o) {
  if (o.svm_gamma == "scale") {
    o.hp.svm_gamma = std::nullopt;
  } else {
    o.hp.svm_gamma = std::stod(o.svm_gamma);
  }
}

stm::ExperimentConfig to_config(const CommonOpts& o) {
  stm::ExperimentConfig cfg;
  cfg.frontend = parse_frontend(o.frontend);
  cfg.feature = parse_feature(o.feature);
  cfg.classifier = parse_classifier(o.classifier);
  cfg.hp = o.hp;
  cfg.extraction = o.extraction;
  cfg.seed = o.seed;
  cfg.disjoint_splits = o.disjoint;
  cfg.cache_dir = o.cache_dir;
  cfg.manifest_path = o.manifest;
  return cfg;
}

int cmd_extract(const CommonOpts& o, const std::string& dump_spec_dir,
                const std::string& dump_stm_dir) {
  auto cfg = to_config(o);
  auto manifest = stm::load_manifest(o.manifest, o.disjoint);
  if (manifest.split_overlap)
    std::fprintf(stderr,
                 "warning: train paths also appear in the test split\n");
  stm::Extractor ex(cfg.extraction);
  auto stats = stm::run_extract(ex, manifest, cfg.frontend, {cfg.feature},
                                o.cache_dir);
  std::printf("extracted %zu feature(s), %zu cache hit(s)\n", stats.computed,
              stats.cache_hits);
  if (!dump_spec_dir.empty() || !dump_stm_dir.empty()) {
    for (const auto& entry : manifest.entries) {
      auto clip = stm::load_audio(entry.path, cfg.extraction.sample_rate());
      clip.source_id = entry.source_id();
      if (!dump_spec_dir.empty()) {
        fs::create_directories(dump_spec_dir);
        auto sg = ex.spectrogram(cfg.frontend, clip);
        auto base = fs::path(dump_spec_dir) /
                    (clip.source_id + ".spectrogram");
        stm::write_matrix_csv(sg.values, base.string() + ".csv");
        stm::write_pgm(sg.values, base.string() + ".pgm");
      }
      if (!dump_stm_dir.empty()) {
        fs::create_directories(dump_stm_dir);
        auto f = ex.extract(cfg.frontend, stm::FeatureKind::stm_global, clip);
        std::vector<std::vector<double>> rows(f.num_channels);
        for (size_t k = 0; k < f.num_channels; ++k) {
          rows[k].resize(f.num_mod_bins);
          for (size_t m = 0; m < f.num_mod_bins; ++m) rows[k][m] = f.at(k, m);
        }
        auto base = fs::path(dump_stm_dir) / (clip.source_id + ".stm");
        stm::write_matrix_csv(rows, base.string() + ".csv");
        stm::write_pgm(rows, base.string() + ".pgm");
      }
    }
  }
  if (!stats.failures.empty()) {
    std::fprintf(stderr, "%zu file(s) failed:\n", stats.failures.size());
    for (const auto& [file, why] : stats.failures)
      std::fprintf(stderr, "  %s: %s\n", file.c_str(), why.c_str());
    return 1;
  }
  return 0;
}

int cmd_train(const CommonOpts& o, const std::string& out) {
  auto cfg = to_config(o);
  auto manifest = stm::load_manifest(o.manifest, o.disjoint);
  auto pipeline = stm::run_train(cfg, manifest);
  stm::model_save_file(pipeline, out);
  if (const auto* svm = std::get_if<stm::SvmModel>(&pipeline.model)) {
    if (!svm->converged)
      std::fprintf(stderr,
                   "warning: SMO did not reach the KKT tolerance; the best "
                   "iterate was kept\n");
    std::printf("trained svm: %zu support vector(s), gamma=%g\n",
                svm->support_vectors.size(), svm->gamma);
  } else if (const auto* knn = std::get_if<stm::KnnModel>(&pipeline.model)) {
    std::printf("trained knn: %zu stored vector(s), k=%d\n",
                knn->vectors.size(), knn->k);
  } else {
    const auto& et = std::get<stm::ExtraTreesModel>(pipeline.model);
    std::printf("trained et: %zu tree(s), %u feature(s)/node\n",
                et.trees.size(), et.features_per_node);
  }
  std::printf("model written to %s\n", out.c_str());
  return 0;
}

int cmd_evaluate(CommonOpts& o, const std::string& model_path,
                 const std::string& out) {
  auto pipeline = stm::model_load_file(model_path);
  o.classifier = stm::to_string(stm::kind_of(pipeline.model));
  auto cfg = to_config(o);
  auto manifest = stm::load_manifest(o.manifest, o.disjoint);
  auto report = stm::run_evaluate(cfg, manifest, pipeline);
  stm::write_report_json(report, out);
  std::string csv = out;
  const auto dot = csv.rfind(".json");
  if (dot != std::string::npos) csv = csv.substr(0, dot);
  stm::write_confusion_csv(report, csv + ".confusion.csv");
  std::printf("accuracy %.4f on %zu test clip(s)\n", report.accuracy,
              report.test_size);
  std::printf("confusion [[%zu,%zu],[%zu,%zu]]\n", report.confusion[0][0],
              report.confusion[0][1], report.confusion[1][0],
              report.confusion[1][1]);
  std::printf("report written to %s\n", out.c_str());
  return 0;
}

int cmd_grid(const CommonOpts& o, const std::string& out_dir) {
  auto cfg = to_config(o);
  auto manifest = stm::load_manifest(o.manifest, o.disjoint);
  if (manifest.split_overlap)
    std::fprintf(stderr,
                 "warning: train paths also appear in the test split\n");
  auto results = stm::run_grid(cfg, manifest, out_dir);
  for (const auto& r : results) {
    std::string ref;
    if (r.report.reference) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "  (reference %.2f)",
                    *r.report.reference);
      ref = buf;
    }
    std::printf("%-24s accuracy %.4f%s\n", r.config.tag().c_str(),
                r.report.accuracy, ref.c_str());
  }
  std::printf("grid artifacts in %s\n", out_dir.c_str());
  return 0;
}

int cmd_inspect(const CommonOpts& o, const std::string& out,
                const std::string& response_csv, size_t response_nfft) {
  stm::FilterbankSpec spec = o.extraction.filterbank;
  spec.kind = parse_frontend(o.frontend);
  auto fb = stm::build_filterbank(spec);
  std::string csv =
      "channel,center_freq_hz,measured_peak_hz,erb_hz,minus3db_bw_hz\n";
  char line[160];
  for (size_t k = 0; k < fb.center_freqs.size(); ++k) {
    auto pk = stm::measure_response_peak(fb.impulse_responses[k],
                                         spec.sample_rate);
    double bw = stm::minus3db_bandwidth(fb.impulse_responses[k],
                                        spec.sample_rate);
    std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f,%.6f,%.6f\n", k,
                  fb.center_freqs[k], pk.freq_hz,
                  stm::erb_bandwidth(fb.center_freqs[k] / 1000.0), bw);
    csv += line;
  }
  if (out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    stm::write_text_file(out, csv);
    std::printf("filterbank table written to %s\n", out.c_str());
  }
  if (!response_csv.empty()) {
    std::vector<std::vector<double>> cols;
    for (const auto& ir : fb.impulse_responses)
      cols.push_back(stm::frequency_response(ir, response_nfft));
    // Rows: frequency plus one magnitude per channel.
    std::string body = "freq_hz";
    for (size_t k = 0; k < cols.size(); ++k)
      body += ",ch" + std::to_string(k);
    body += "\n";
    for (size_t b = 0; b < cols[0].size(); ++b) {
      std::snprintf(line, sizeof(line), "%.4f",
                    static_cast<double>(b) * spec.sample_rate /
                        static_cast<double>(response_nfft));
      body += line;
      for (const auto& c : cols) {
        std::snprintf(line, sizeof(line), ",%.8g", c[b]);
        body += line;
      }
      body += "\n";
    }
    stm::write_text_file(response_csv, body);
    std::printf("magnitude responses written to %s\n", response_csv.c_str());
  }
  return 0;
}

int cmd_synth_demo(const CommonOpts& o, const std::string& out_dir) {
  auto results = stm::run_synth_demo(out_dir, o.seed, o.extraction, o.hp);
  size_t below = 0;
  for (const auto& r : results) {
    std::printf("%-24s accuracy %.4f\n", r.config.tag().c_str(),
                r.report.accuracy);
    if (r.report.accuracy < 0.95) ++below;
  }
  std::printf("reports in %s\n", out_dir.c_str());
  if (below > 0) {
    std::fprintf(stderr, "%zu configuration(s) below 0.95 accuracy\n", below);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stmaudio: auditory spectro-temporal modulation features and "
      "classifiers for genuine-vs-imitated speech"};
  app.require_subcommand(1);
  CommonOpts o;

  auto add_common = [&](CLI::App* cmd, bool with_manifest = true) {
    if (with_manifest)
      cmd->add_option("--manifest", o.manifest, "Dataset manifest CSV")
          ->required();
    cmd->add_option("--cache-dir", o.cache_dir, "Feature cache directory")
        ->envname("STM_CACHE_DIR");
    cmd->add_option("--seed", o.seed, "Run seed");
    cmd->add_flag("--disjoint-splits", o.disjoint,
                  "Reject manifests whose train and test splits overlap");
    add_filterbank_flags(cmd, o.extraction);
  };

  // extract
  std::string dump_spec_dir, dump_stm_dir;
  auto* extract = app.add_subcommand(
      "extract", "Populate the feature cache for one frontend/feature lane");
  add_common(extract);
  extract->add_option("--frontend", o.frontend, "gtfb or gcfb");
  extract->add_option("--feature", o.feature, "global or segmental");
  extract->add_option("--dump-spectrogram", dump_spec_dir,
                      "Also write auditory spectrograms (CSV+PGM) here");
  extract->add_option("--dump-stm", dump_stm_dir,
                      "Also write global STM maps (CSV+PGM) here");

  // train
  std::string model_out;
  auto* train = app.add_subcommand("train",
                                   "Fit a classifier on the train split");
  add_common(train);
  train->add_option("--frontend", o.frontend, "gtfb or gcfb");
  train->add_option("--feature", o.feature, "global or segmental");
  train->add_option("--classifier", o.classifier, "svm, knn, or et");
  add_classifier_flags(train, o);
  train->add_option("--out", model_out, "Output model file")->required();

  // evaluate
  std::string model_in, report_out;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score a trained model on the test split");
  add_common(evaluate);
  evaluate->add_option("--frontend", o.frontend, "gtfb or gcfb");
  evaluate->add_option("--feature", o.feature, "global or segmental");
  evaluate->add_option("--model", model_in, "Trained model file")->required();
  evaluate->add_option("--out", report_out, "Report JSON path")->required();

  // grid
  std::string grid_out;
  auto* grid = app.add_subcommand(
      "grid", "Run all 12 frontend x feature x classifier configurations");
  add_common(grid);
  add_classifier_flags(grid, o);
  grid->add_option("--out-dir", grid_out, "Artifact directory")->required();

  // inspect-filterbank
  std::string inspect_out, response_csv;
  size_t response_nfft = 8192;
  auto* inspect = app.add_subcommand("inspect-filterbank",
                                     "Tabulate per-channel filter properties");
  inspect->add_option("--frontend", o.frontend, "gtfb or gcfb");
  inspect->add_option("--out", inspect_out, "CSV path (default: stdout)");
  inspect->add_option("--response-csv", response_csv,
                      "Also write per-channel magnitude responses");
  inspect->add_option("--response-nfft", response_nfft,
                      "FFT size for --response-csv");
  add_filterbank_flags(inspect, o.extraction);

  // synth-demo
  std::string demo_out;
  auto* demo = app.add_subcommand(
      "synth-demo",
      "Generate a two-class synthetic corpus and run the full grid");
  demo->add_option("--out-dir", demo_out, "Output directory")->required();
  demo->add_option("--seed", o.seed, "Corpus seed");
  add_classifier_flags(demo, o);
  add_filterbank_flags(demo, o.extraction);

  CLI11_PARSE(app, argc, argv);

  try {
    finish_hyperparams(o);
    if (extract->parsed())
      return cmd_extract(o, dump_spec_dir, dump_stm_dir);
    if (train->parsed()) return cmd_train(o, model_out);
    if (evaluate->parsed()) return cmd_evaluate(o, model_in, report_out);
    if (grid->parsed()) return cmd_grid(o, grid_out);
    if (inspect->parsed())
      return cmd_inspect(o, inspect_out, response_csv, response_nfft);
    if (demo->parsed()) return cmd_synth_demo(o, demo_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
