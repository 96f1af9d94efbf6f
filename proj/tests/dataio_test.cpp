// Copyright 2026 The HashProbe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hashprobe/dataio.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>

#include "hashprobe/datagen.hpp"
#include "hashprobe/errors.hpp"

namespace hashprobe {
namespace {

namespace fs = std::filesystem;

class DataIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hashprobe_dataio_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  static void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream(p, std::ios::binary) << bytes;
  }
  static void truncate_by_one(const fs::path& p) {
    auto bytes = read_bytes(p);
    bytes.pop_back();
    write_bytes(p, bytes);
  }

  fs::path dir_;
};

SyntheticData sample(std::uint32_t code_bits) {
  SynthConfig cfg;
  cfg.num_reference = 120;
  cfg.num_train_queries = 30;
  cfg.num_eval_queries = 20;
  cfg.code_bits = code_bits;
  cfg.labels_per_point = 2;
  cfg.image_dim = 6;
  cfg.text_dim = 4;
  return generate(cfg);
}

TEST_F(DataIoTest, CodesRoundTrip) {
  for (std::uint32_t c : {1u, 8u, 13u, 64u, 100u, 512u}) {
    const auto data = sample(c);
    save_codes(data.reference.codes, path("c.bin"));
    EXPECT_EQ(load_codes(path("c.bin")), data.reference.codes) << c;
    EXPECT_EQ(fs::file_size(path("c.bin")), 4 + 4 + 8 + 4 + 120 * ((c + 7) / 8)) << c;
  }
}

TEST_F(DataIoTest, CodeBytesAreLsbFirst) {
  CodeSet codes(10);
  codes.push_back(BitCode::pack(std::vector<std::uint8_t>{1, 0, 0, 0, 0, 0, 0, 1, 0, 1}));
  save_codes(codes, path("c.bin"));
  const auto bytes = read_bytes(path("c.bin"));
  ASSERT_EQ(bytes.size(), 20u + 2u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 0x81);
  EXPECT_EQ(static_cast<unsigned char>(bytes[21]), 0x02);
}

TEST_F(DataIoTest, CodesRejectNonzeroPadding) {
  CodeSet codes(10);
  codes.push_back(BitCode(10));
  save_codes(codes, path("c.bin"));
  auto bytes = read_bytes(path("c.bin"));
  bytes.back() = static_cast<char>(0x80);
  write_bytes(path("c.bin"), bytes);
  EXPECT_THROW(load_codes(path("c.bin")), FormatError);
}

TEST_F(DataIoTest, LabelsRoundTripIncludingEmpty) {
  const std::vector<LabelSet> labels = {{3, 1}, {}, {0}, {7, 8, 9}};
  save_labels(labels, path("l.txt"));
  EXPECT_EQ(load_labels(path("l.txt")), labels);
  write_bytes(path("bad.txt"), "1 2\nx\n");
  EXPECT_THROW(load_labels(path("bad.txt")), FormatError);
}

TEST_F(DataIoTest, FeaturesRoundTrip) {
  const auto data = sample(16);
  save_features(data.reference.features, path("f.bin"));
  EXPECT_EQ(load_features(path("f.bin")), data.reference.features);
}

TEST_F(DataIoTest, IndexRoundTrip) {
  const auto data = sample(24);
  const auto index = build_index(data.reference.codes, 7);
  save_index(index, path("i.bin"));
  const auto loaded = load_index(path("i.bin"));
  ASSERT_EQ(loaded.d(), 7u);
  ASSERT_EQ(loaded.total(), index.total());
  for (std::uint32_t x = 0; x < index.num_entries(); ++x) {
    const auto a = index.entry(x);
    const auto b = loaded.entry(x);
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST_F(DataIoTest, TruncationByOneByteIsRejected) {
  const auto data = sample(16);
  save_codes(data.reference.codes, path("c.bin"));
  save_features(data.reference.features, path("f.bin"));
  save_index(build_index(data.reference.codes, 4), path("i.bin"));
  for (const char* name : {"c.bin", "f.bin", "i.bin"}) {
    truncate_by_one(path(name));
    try {
      if (std::string(name) == "c.bin") load_codes(path(name));
      if (std::string(name) == "f.bin") load_features(path(name));
      if (std::string(name) == "i.bin") load_index(path(name));
      ADD_FAILURE() << name << " loaded after truncation";
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << e.what();
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
    }
  }
}

TEST_F(DataIoTest, BadMagicAndTrailingBytes) {
  const auto data = sample(16);
  save_codes(data.reference.codes, path("c.bin"));
  auto bytes = read_bytes(path("c.bin"));
  auto corrupt = bytes;
  corrupt[0] = 'X';
  write_bytes(path("magic.bin"), corrupt);
  EXPECT_THROW(load_codes(path("magic.bin")), FormatError);
  write_bytes(path("long.bin"), bytes + "z");
  EXPECT_THROW(load_codes(path("long.bin")), FormatError);
  EXPECT_THROW(load_codes(path("missing.bin")), FormatError);
  EXPECT_THROW(load_features(path("c.bin")), FormatError);
}

TEST_F(DataIoTest, IndexWithBrokenPartitionIsRejected) {
  CodeSet codes(4);
  for (int i = 0; i < 4; ++i) codes.push_back(BitCode(4));
  save_index(build_index(codes, 2), path("i.bin"));
  auto bytes = read_bytes(path("i.bin"));
  // Last id: 3 -> 2 duplicates an id.
  bytes[bytes.size() - 4] = 2;
  write_bytes(path("i.bin"), bytes);
  EXPECT_THROW(load_index(path("i.bin")), FormatError);
}

class ManifestTest : public DataIoTest {
 protected:
  void write_dataset() {
    data_ = sample(32);
    save_codes(data_.reference.codes, path("ref.codes"));
    save_labels(data_.reference.labels, path("ref.labels"));
    save_features(data_.reference.features, path("ref.features"));
    save_labels(data_.train.labels, path("train.labels"));
    save_features(data_.train.features, path("train.features"));
    save_codes(data_.eval.codes, path("eval.codes"));
    save_labels(data_.eval.labels, path("eval.labels"));
    save_features(data_.eval.features, path("eval.features"));
    manifest_.code_bits = 32;
    manifest_.query_dim = 4;
    manifest_.reference = {"ref.codes", "ref.labels", "ref.features", 120};
    manifest_.train = {"", "train.labels", "train.features", 30};
    manifest_.eval = {"eval.codes", "eval.labels", "eval.features", 20};
    save_manifest(manifest_, path("manifest.txt"));
  }
  SyntheticData data_;
  DatasetManifest manifest_;
};

TEST_F(ManifestTest, LoadsEverySplit) {
  write_dataset();
  const auto loaded = load_dataset(path("manifest.txt"));
  EXPECT_EQ(loaded.reference, data_.reference);
  EXPECT_EQ(loaded.eval, data_.eval);
  EXPECT_EQ(loaded.train.features, data_.train.features);
  EXPECT_EQ(loaded.train.labels, data_.train.labels);
  EXPECT_EQ(loaded.manifest.base_dir, dir_);
}

TEST_F(ManifestTest, CountMismatchNamesFileAndField) {
  write_dataset();
  manifest_.eval.count = 21;
  save_manifest(manifest_, path("manifest.txt"));
  try {
    load_dataset(path("manifest.txt"));
    FAIL() << "mismatch accepted";
  } catch (const ConsistencyError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("eval"), std::string::npos) << msg;
    EXPECT_NE(msg.find("20"), std::string::npos) << msg;
    EXPECT_NE(msg.find("21"), std::string::npos) << msg;
  }
}

TEST_F(ManifestTest, CodeLengthAndDimMismatch) {
  write_dataset();
  manifest_.code_bits = 16;
  save_manifest(manifest_, path("manifest.txt"));
  EXPECT_THROW(load_dataset(path("manifest.txt")), ConsistencyError);
  manifest_.code_bits = 32;
  manifest_.query_dim = 5;
  save_manifest(manifest_, path("manifest.txt"));
  EXPECT_THROW(load_dataset(path("manifest.txt")), ConsistencyError);
}

TEST_F(ManifestTest, MalformedManifest) {
  write_bytes(path("m.txt"), "version=1\ncode_bits=abc\n");
  EXPECT_THROW(load_manifest(path("m.txt")), FormatError);
  write_bytes(path("m2.txt"), "just garbage\n");
  EXPECT_THROW(load_manifest(path("m2.txt")), FormatError);
}

}  // namespace
}  // namespace hashprobe
