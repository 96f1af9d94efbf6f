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

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hashprobe {

inline constexpr std::uint32_t kMaxCodeBits = 512;
inline constexpr std::uint32_t kMaxIndexBits = 24;
inline constexpr std::uint32_t kWordBits = 64;

constexpr std::size_t words_for_bits(std::uint32_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

/// Non-owning view of a packed code. Bit position j lives in word j / 64 at
/// offset j % 64; padding bits past `length` are zero.
struct BitCodeView {
  std::span<const std::uint64_t> words;
  std::uint32_t length = 0;

  bool bit(std::uint32_t pos) const {
    return (words[pos / kWordBits] >> (pos % kWordBits)) & 1u;
  }
};

/// Owning fixed-length binary hash code, 1 to 512 bits.
class BitCode {
 public:
  BitCode() = default;
  /// All-zero code of the given length.
  explicit BitCode(std::uint32_t length);

  /// Packs a sequence of 0/1 digits; digit i becomes bit position i.
  static BitCode pack(std::span<const std::uint8_t> digits);
  /// Adopts packed words, clearing any padding bits.
  static BitCode from_words(std::span<const std::uint64_t> words,
                            std::uint32_t length);

  std::vector<std::uint8_t> unpack() const;

  std::uint32_t length() const { return length_; }
  std::span<const std::uint64_t> words() const { return words_; }
  BitCodeView view() const { return {words_, length_}; }
  operator BitCodeView() const { return view(); }

  bool bit(std::uint32_t pos) const { return view().bit(pos); }
  void set_bit(std::uint32_t pos, bool value);

  friend bool operator==(const BitCode&, const BitCode&) = default;

 private:
  std::uint32_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Contiguous storage for N codes of one length (row-major packed words).
class CodeSet {
 public:
  CodeSet() = default;
  explicit CodeSet(std::uint32_t length);

  void push_back(BitCodeView code);
  void reserve(std::size_t n) { data_.reserve(n * words_per_code_); }

  std::size_t size() const {
    return words_per_code_ == 0 ? 0 : data_.size() / words_per_code_;
  }
  bool empty() const { return data_.empty(); }
  std::uint32_t length() const { return length_; }
  std::size_t words_per_code() const { return words_per_code_; }

  BitCodeView operator[](std::size_t i) const {
    return {std::span<const std::uint64_t>(data_).subspan(i * words_per_code_,
                                                          words_per_code_),
            length_};
  }
  BitCode at(std::size_t i) const;
  std::span<const std::uint64_t> raw() const { return data_; }

  friend bool operator==(const CodeSet&, const CodeSet&) = default;

 private:
  std::uint32_t length_ = 0;
  std::size_t words_per_code_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Key into the inverted table: the first `width` bits of a code, with bit
/// position 0 as the most significant bit of `value`.
struct IndexCode {
  std::uint32_t value = 0;
  std::uint32_t width = 0;

  friend bool operator==(const IndexCode&, const IndexCode&) = default;
};

/// Unchecked word-wise XOR + popcount.
inline std::uint32_t hamming_words(const std::uint64_t* a, const std::uint64_t* b,
                                   std::size_t n_words) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i < n_words; ++i) {
    sum += static_cast<std::uint32_t>(std::popcount(a[i] ^ b[i]));
  }
  return sum;
}

/// popcount(a XOR b). Throws InvalidArgument on length mismatch.
std::uint32_t hamming_distance(BitCodeView a, BitCodeView b);

/// Throws InvalidArgument unless 1 <= d <= min(code.length, 24).
IndexCode extract_index_code(BitCodeView code, std::uint32_t d);

/// Unchecked prefix read; d must already be validated.
inline std::uint32_t index_prefix(BitCodeView code, std::uint32_t d) {
  // d <= 24 so the prefix always sits in the first word.
  const std::uint64_t low = code.words[0] & ((std::uint64_t{1} << d) - 1);
  std::uint32_t value = 0;
  std::uint64_t w = low;
  for (std::uint32_t j = 0; j < d; ++j, w >>= 1) {
    value = (value << 1) | static_cast<std::uint32_t>(w & 1u);
  }
  return value;
}

/// Distances from `query` to every code in `codes`, OpenMP-parallel over rows.
void hamming_scan(BitCodeView query, const CodeSet& codes,
                  std::span<std::uint32_t> out);
/// Serial reference for hamming_scan.
void hamming_scan_serial(BitCodeView query, const CodeSet& codes,
                         std::span<std::uint32_t> out);

}  // namespace hashprobe
