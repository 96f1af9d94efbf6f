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

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hashprobe/binary_io.hpp"
#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kMaxRows = std::uint64_t{1} << 40;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

template <typename T>
bool parse_uint(std::string_view text, T& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

void save_codes(const CodeSet& codes, const std::filesystem::path& path) {
  io::ByteWriter out;
  out.magic("HPBC");
  out.u32(kFormatVersion);
  out.u64(codes.size());
  out.u32(codes.length());
  const std::size_t record = (codes.length() + 7) / 8;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto words = codes[i].words;
    for (std::size_t b = 0; b < record; ++b) {
      out.u8(static_cast<std::uint8_t>(words[b / 8] >> (8 * (b % 8))));
    }
  }
  out.save(path);
}

CodeSet load_codes(const std::filesystem::path& path) {
  auto in = io::ByteReader::open(path);
  in.expect_magic("HPBC");
  in.expect_version(kFormatVersion);
  const std::uint64_t n = in.u64();
  const std::uint32_t c = in.u32();
  if (c < 1 || c > kMaxCodeBits) in.fail("code length " + std::to_string(c) + " outside [1, 512]");
  if (n > kMaxRows) in.fail("implausible record count " + std::to_string(n));
  const std::size_t record = (c + 7) / 8;
  in.expect_remaining(n * record, "code records");

  CodeSet codes(c);
  codes.reserve(n);
  std::vector<std::uint64_t> words(words_for_bits(c));
  const std::uint8_t pad_mask =
      c % 8 == 0 ? 0 : static_cast<std::uint8_t>(0xFFu << (c % 8));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::fill(words.begin(), words.end(), 0);
    const std::uint8_t* bytes = in.take(record);
    if (bytes[record - 1] & pad_mask) {
      in.fail("record " + std::to_string(i) + " has non-zero padding bits");
    }
    for (std::size_t b = 0; b < record; ++b) {
      words[b / 8] |= std::uint64_t{bytes[b]} << (8 * (b % 8));
    }
    codes.push_back(BitCodeView{words, c});
  }
  return codes;
}

void save_labels(std::span<const LabelSet> labels, const std::filesystem::path& path) {
  std::string text;
  for (const auto& set : labels) {
    bool first = true;
    for (std::uint32_t label : set.labels()) {
      if (!first) text += ' ';
      text += std::to_string(label);
      first = false;
    }
    text += '\n';
  }
  write_text(path, text);
}

std::vector<LabelSet> load_labels(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::vector<LabelSet> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::uint32_t> ids;
    std::size_t cursor = 0;
    while (cursor < line.size()) {
      if (line[cursor] == ' ') {
        ++cursor;
        continue;
      }
      std::size_t stop = line.find(' ', cursor);
      if (stop == std::string_view::npos) stop = line.size();
      std::uint32_t value = 0;
      if (!parse_uint(line.substr(cursor, stop - cursor), value)) {
        throw FormatError(path.string() + " at offset " + std::to_string(pos + cursor) +
                          ": line " + std::to_string(line_no + 1) +
                          " has a non-integer label \"" +
                          std::string(line.substr(cursor, stop - cursor)) + "\"");
      }
      ids.push_back(value);
      cursor = stop;
    }
    out.emplace_back(std::move(ids));
    pos = end + 1;
    ++line_no;
  }
  return out;
}

void save_features(const FeatureMatrix& features, const std::filesystem::path& path) {
  io::ByteWriter out;
  out.magic("HPFV");
  out.u32(kFormatVersion);
  out.u64(features.rows());
  out.u32(features.dim());
  for (float v : features.values()) out.f32(v);
  out.save(path);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  auto in = io::ByteReader::open(path);
  in.expect_magic("HPFV");
  in.expect_version(kFormatVersion);
  const std::uint64_t n = in.u64();
  const std::uint32_t f = in.u32();
  if (f < 1) in.fail("feature dimension must be >= 1");
  if (n > kMaxRows) in.fail("implausible row count " + std::to_string(n));
  in.expect_remaining(n * f * 4, "feature body");
  std::vector<float> values(n * f);
  for (float& v : values) v = in.f32();
  return FeatureMatrix(f, std::move(values));
}

void save_index(const InvertedIndex& index, const std::filesystem::path& path) {
  io::ByteWriter out;
  out.magic("HPIX");
  out.u32(kFormatVersion);
  out.u32(index.d());
  out.u64(index.total());
  for (std::uint32_t len : index.entry_lengths()) out.u32(len);
  for (std::uint32_t id : index.ids()) out.u32(id);
  out.save(path);
}

InvertedIndex load_index(const std::filesystem::path& path) {
  auto in = io::ByteReader::open(path);
  in.expect_magic("HPIX");
  in.expect_version(kFormatVersion);
  const std::uint32_t d = in.u32();
  const std::uint64_t n = in.u64();
  if (d < 1 || d > kMaxIndexBits) in.fail("index width " + std::to_string(d) + " outside [1, 24]");
  if (n > 0xFFFFFFFFull) in.fail("N exceeds the u32 id range");
  const std::uint64_t entries = std::uint64_t{1} << d;
  in.expect_remaining(entries * 4 + n * 4, "entry table and ids");
  std::vector<std::uint32_t> lengths(entries);
  for (auto& len : lengths) len = in.u32();
  std::vector<std::uint32_t> ids(n);
  for (auto& id : ids) id = in.u32();
  try {
    return InvertedIndex::from_lists(d, n, lengths, std::move(ids));
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# hashprobe dataset manifest\n";
  out << "version=" << kFormatVersion << '\n';
  out << "code_bits=" << m.code_bits << '\n';
  out << "query_dim=" << m.query_dim << '\n';
  auto split = [&out](const char* name, const SplitFiles& s) {
    out << name << ".count=" << s.count << '\n';
    if (!s.codes.empty()) out << name << ".codes=" << s.codes << '\n';
    if (!s.labels.empty()) out << name << ".labels=" << s.labels << '\n';
    if (!s.features.empty()) out << name << ".features=" << s.features << '\n';
  };
  split("reference", m.reference);
  split("train", m.train);
  split("eval", m.eval);
  write_text(path, out.str());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::map<std::string, std::string> kv;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                        " is not key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) {
      throw FormatError(path.string() + ": missing key \"" + key + "\"");
    }
    return it->second;
  };
  auto optional = [&](const std::string& key) {
    auto it = kv.find(key);
    return it == kv.end() ? std::string() : it->second;
  };
  auto number = [&](const std::string& key) {
    std::uint64_t v = 0;
    if (!parse_uint(need(key), v)) {
      throw FormatError(path.string() + ": key \"" + key + "\" is not an integer");
    }
    return v;
  };

  if (number("version") != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported manifest version " + need("version"));
  }
  DatasetManifest m;
  m.base_dir = path.parent_path();
  m.code_bits = static_cast<std::uint32_t>(number("code_bits"));
  m.query_dim = static_cast<std::uint32_t>(number("query_dim"));
  m.reference = {need("reference.codes"), need("reference.labels"),
                 optional("reference.features"), number("reference.count")};
  m.train = {optional("train.codes"), need("train.labels"), need("train.features"),
             number("train.count")};
  m.eval = {need("eval.codes"), need("eval.labels"), need("eval.features"),
            number("eval.count")};
  return m;
}

LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
  LoadedDataset out;
  out.manifest = load_manifest(manifest_path);
  const auto& m = out.manifest;

  auto mismatch = [&](const std::string& file, const std::string& what, std::uint64_t got,
                      std::uint64_t expected) {
    throw ConsistencyError(manifest_path.string() + ": " + file + " has " + what + " = " +
                           std::to_string(got) + ", manifest expects " +
                           std::to_string(expected));
  };
  auto check_codes = [&](const CodeSet& codes, const std::string& file, std::uint64_t count) {
    if (codes.size() != count) mismatch(file, "N", codes.size(), count);
    if (codes.length() != m.code_bits) mismatch(file, "c", codes.length(), m.code_bits);
  };
  auto check_labels = [&](const std::vector<LabelSet>& labels, const std::string& file,
                          std::uint64_t count) {
    if (labels.size() != count) mismatch(file, "N", labels.size(), count);
  };
  auto check_features = [&](const FeatureMatrix& f, const std::string& file,
                            std::uint64_t count, std::uint32_t dim) {
    if (f.rows() != count) mismatch(file, "N", f.rows(), count);
    if (dim != 0 && f.dim() != dim) mismatch(file, "F", f.dim(), dim);
  };

  out.reference.codes = load_codes(m.resolve(m.reference.codes));
  check_codes(out.reference.codes, m.reference.codes, m.reference.count);
  out.reference.labels = load_labels(m.resolve(m.reference.labels));
  check_labels(out.reference.labels, m.reference.labels, m.reference.count);
  if (!m.reference.features.empty()) {
    out.reference.features = load_features(m.resolve(m.reference.features));
    check_features(out.reference.features, m.reference.features, m.reference.count, 0);
  }

  out.train.features = load_features(m.resolve(m.train.features));
  check_features(out.train.features, m.train.features, m.train.count, m.query_dim);
  out.train.labels = load_labels(m.resolve(m.train.labels));
  check_labels(out.train.labels, m.train.labels, m.train.count);
  if (!m.train.codes.empty()) {
    out.train.codes = load_codes(m.resolve(m.train.codes));
    check_codes(out.train.codes, m.train.codes, m.train.count);
  }

  out.eval.features = load_features(m.resolve(m.eval.features));
  check_features(out.eval.features, m.eval.features, m.eval.count, m.query_dim);
  out.eval.labels = load_labels(m.resolve(m.eval.labels));
  check_labels(out.eval.labels, m.eval.labels, m.eval.count);
  out.eval.codes = load_codes(m.resolve(m.eval.codes));
  check_codes(out.eval.codes, m.eval.codes, m.eval.count);
  return out;
}

}  // namespace hashprobe
