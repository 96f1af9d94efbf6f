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

#include "hashprobe/binary_io.hpp"

#include <fstream>
#include <iterator>

namespace hashprobe::io {

void ByteWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()),
            static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw Error("write to " + path.string() + " failed");
}

ByteReader ByteReader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ByteReader(std::move(bytes), path.string());
}

void ByteReader::expect_magic(std::string_view tag) {
  const std::size_t at = pos_;
  const std::uint8_t* p = take(tag.size());
  if (std::memcmp(p, tag.data(), tag.size()) != 0) {
    pos_ = at;
    fail("bad magic, expected \"" + std::string(tag) + "\"");
  }
}

void ByteReader::expect_version(std::uint32_t expected) {
  const std::size_t at = pos_;
  const std::uint32_t version = u32();
  if (version != expected) {
    pos_ = at;
    fail("unsupported format version " + std::to_string(version));
  }
}

void ByteReader::expect_remaining(std::uint64_t n, std::string_view what) const {
  if (remaining() < n) {
    fail("truncated " + std::string(what) + ": need " + std::to_string(n) +
         " bytes, have " + std::to_string(remaining()) + " (short by " +
         std::to_string(n - remaining()) + ")");
  }
  if (remaining() > n) {
    fail(std::string(what) + ": " + std::to_string(remaining() - n) +
         " unexpected trailing bytes");
  }
}

void ByteReader::fail(const std::string& message) const {
  throw FormatError(name_ + " at offset " + std::to_string(pos_) + ": " + message);
}

void ByteReader::require(std::size_t n) const {
  if (remaining() < n) {
    fail("truncated: need " + std::to_string(n) + " bytes, have " +
         std::to_string(remaining()));
  }
}

}  // namespace hashprobe::io
