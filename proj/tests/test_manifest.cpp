// tests/test_manifest.cpp

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

#include "stm/manifest.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "stm/audio.hpp"

namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path dir;
  Fixture() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("stm_manifest_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
    // A handful of tiny real WAVs the manifests can point at.
    for (const char* name : {"a.wav", "b.wav", "c.wav", "d.wav"}) {
      std::vector<double> x(160, 0.1);
      stm::save_wav((dir / name).string(), x, 16000);
    }
  }
  ~Fixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string write_manifest(const std::string& body,
                             const std::string& name = "m.csv") const {
    auto p = dir / name;
    std::ofstream f(p);
    f << body;
    return p.string();
  }
};

}  // namespace

TEST_CASE("valid manifest parses in file order") {
  Fixture fx;
  auto path = fx.write_manifest(
      "path,label,split,speaker_id,language\n"
      "a.wav,genuine,train,spk1,en\n"
      "b.wav,imitated,train,spk2,de\n"
      "c.wav,genuine,test,spk1,en\n"
      "d.wav,imitated,test,spk3,ja\n");
  auto m = stm::load_manifest(path);
  REQUIRE(m.entries.size() == 4);
  REQUIRE(m.entries[0].raw_path == "a.wav");
  REQUIRE(m.entries[1].label == stm::Label::imitated);
  REQUIRE(m.entries[2].split == stm::Split::test);
  REQUIRE(m.entries[3].language == "ja");
  REQUIRE_FALSE(m.split_overlap);
  REQUIRE(m.indices(stm::Split::train) == std::vector<size_t>{0, 1});
  REQUIRE(m.indices(stm::Split::test) == std::vector<size_t>{2, 3});
}

TEST_CASE("unknown label names the offending row") {
  Fixture fx;
  auto path = fx.write_manifest(
      "path,label,split,speaker_id,language\n"
      "a.wav,genuine,train,s,en\n"
      "b.wav,synthetic,train,s,en\n");
  try {
    stm::load_manifest(path);
    FAIL("expected FormatError");
  } catch (const stm::FormatError& e) {
    std::string msg = e.what();
    REQUIRE(msg.find("row 3") != std::string::npos);
    REQUIRE(msg.find("synthetic") != std::string::npos);
  }
}

TEST_CASE("schema violations are rejected") {
  Fixture fx;
  SECTION("missing column") {
    auto path = fx.write_manifest(
        "path,label,split,speaker_id\n"
        "a.wav,genuine,train,s\n");
    REQUIRE_THROWS_AS(stm::load_manifest(path), stm::FormatError);
  }
  SECTION("unknown split") {
    auto path = fx.write_manifest(
        "path,label,split,speaker_id,language\n"
        "a.wav,genuine,dev,s,en\n");
    REQUIRE_THROWS_AS(stm::load_manifest(path), stm::FormatError);
  }
  SECTION("duplicate within a split") {
    auto path = fx.write_manifest(
        "path,label,split,speaker_id,language\n"
        "a.wav,genuine,train,s,en\n"
        "a.wav,genuine,train,s,en\n");
    REQUIRE_THROWS_AS(stm::load_manifest(path), stm::FormatError);
  }
  SECTION("unreadable audio path") {
    auto path = fx.write_manifest(
        "path,label,split,speaker_id,language\n"
        "missing.wav,genuine,train,s,en\n");
    REQUIRE_THROWS_AS(stm::load_manifest(path), stm::FileError);
  }
}

TEST_CASE("train paths reappearing in test set the overlap flag") {
  Fixture fx;
  std::string body = "path,label,split,speaker_id,language\n";
  body += "a.wav,genuine,train,s,en\n";
  body += "b.wav,imitated,train,s,en\n";
  body += "a.wav,genuine,test,s,en\n";
  body += "b.wav,imitated,test,s,en\n";
  body += "c.wav,genuine,test,s,en\n";
  auto path = fx.write_manifest(body);
  auto m = stm::load_manifest(path);
  REQUIRE(m.split_overlap);
  REQUIRE(m.entries.size() == 5);
  // The same manifest under strict split separation is rejected.
  REQUIRE_THROWS_AS(stm::load_manifest(path, /*disjoint_splits=*/true),
                    stm::FormatError);
}

TEST_CASE("source ids are filesystem-safe and distinct per path") {
  Fixture fx;
  fs::create_directories(fx.dir / "sub");
  std::vector<double> x(160, 0.1);
  stm::save_wav((fx.dir / "sub" / "a.wav").string(), x, 16000);
  auto path = fx.write_manifest(
      "path,label,split,speaker_id,language\n"
      "a.wav,genuine,train,s,en\n"
      "sub/a.wav,imitated,test,s,en\n");
  auto m = stm::load_manifest(path);
  REQUIRE(m.entries[0].source_id() != m.entries[1].source_id());
  for (char c : m.entries[1].source_id())
    REQUIRE((std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
             c == '_'));
}
