// include/stm/manifest.hpp

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

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "stm/common.hpp"

// Dataset manifests: CSV with header `path,label,split,speaker_id,language`.
// Relative paths resolve against the manifest's directory.

namespace stm {

enum class Label { genuine, imitated };
enum class Split { train, test };

inline const char* to_string(Label l) {
  return l == Label::genuine ? "genuine" : "imitated";
}
inline const char* to_string(Split s) {
  return s == Split::train ? "train" : "test";
}

/// Class encoding used by every classifier: genuine -1, imitated +1.
inline int label_value(Label l) { return l == Label::genuine ? -1 : +1; }

struct ManifestEntry {
  std::string path;      // resolved
  std::string raw_path;  // as written in the CSV (stable across machines)
  Label label = Label::genuine;
  Split split = Split::train;
  std::string speaker_id;
  std::string language;

  /// Stable identifier: file stem plus a short hash of the manifest path.
  std::string source_id() const {
    std::string stem = std::filesystem::path(raw_path).stem().string();
    std::string safe;
    for (char c : stem)
      safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
               c == '_')
                  ? c
                  : '_';
    return safe + "-" + hex64(fnv1a64(raw_path)).substr(8);
  }
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;  // file order
  bool split_overlap = false;  // same path present in both train and test

  std::vector<size_t> indices(Split s) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < entries.size(); ++i)
      if (entries[i].split == s) out.push_back(i);
    return out;
  }
};

namespace manifest_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace manifest_detail

/// Parse and validate a manifest. Duplicate paths within one split are an
/// error; a path in both splits sets the overlap flag (or is rejected when
/// disjoint_splits is set). Every path must be a readable file.
inline DatasetManifest load_manifest(const std::string& path,
                                     bool disjoint_splits = false) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open manifest: " + path);
  const auto base_dir = std::filesystem::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line))
    throw FormatError("manifest is empty: " + path);
  auto header = manifest_detail::split_csv_line(line);
  const std::vector<std::string> expected{"path", "label", "split",
                                          "speaker_id", "language"};
  if (header != expected) {
    std::string got;
    for (const auto& h : header) got += (got.empty() ? "" : ",") + h;
    throw FormatError("manifest " + path +
                      ": header must be path,label,split,speaker_id,language"
                      " (got: " + got + ")");
  }

  DatasetManifest m;
  std::set<std::string> seen_train, seen_test;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = manifest_detail::split_csv_line(line);
    if (f.size() != 5)
      throw FormatError("manifest " + path + " row " + std::to_string(row) +
                        ": expected 5 fields, got " +
                        std::to_string(f.size()));
    ManifestEntry e;
    e.raw_path = f[0];
    std::filesystem::path p(f[0]);
    e.path = p.is_absolute() ? p.string() : (base_dir / p).string();

    if (f[1] == "genuine")
      e.label = Label::genuine;
    else if (f[1] == "imitated")
      e.label = Label::imitated;
    else
      throw FormatError("manifest " + path + " row " + std::to_string(row) +
                        ": unknown label '" + f[1] + "'");
    if (f[2] == "train")
      e.split = Split::train;
    else if (f[2] == "test")
      e.split = Split::test;
    else
      throw FormatError("manifest " + path + " row " + std::to_string(row) +
                        ": unknown split '" + f[2] + "'");
    e.speaker_id = f[3];
    e.language = f[4];

    auto& seen = e.split == Split::train ? seen_train : seen_test;
    if (!seen.insert(e.raw_path).second)
      throw FormatError("manifest " + path + " row " + std::to_string(row) +
                        ": duplicate path within the " +
                        std::string(to_string(e.split)) + " split: " + f[0]);
    const auto& other = e.split == Split::train ? seen_test : seen_train;
    if (other.count(e.raw_path)) {
      if (disjoint_splits)
        throw FormatError("manifest " + path + " row " + std::to_string(row) +
                          ": path appears in both splits with "
                          "--disjoint-splits: " + f[0]);
      m.split_overlap = true;
    }

    std::ifstream probe(e.path, std::ios::binary);
    if (!probe)
      throw FileError("manifest " + path + " row " + std::to_string(row) +
                      ": unreadable audio file: " + e.path);
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace stm
