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

#include "hashprobe/bitcode.hpp"

#include <string>

#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

void check_length(std::uint32_t length) {
  if (length < 1 || length > kMaxCodeBits) {
    throw InvalidArgument("code length " + std::to_string(length) +
                          " outside [1, 512]");
  }
}

std::uint64_t tail_mask(std::uint32_t length) {
  const std::uint32_t rem = length % kWordBits;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

}  // namespace

BitCode::BitCode(std::uint32_t length)
    : length_(length), words_(words_for_bits(length), 0) {
  check_length(length);
}

BitCode BitCode::pack(std::span<const std::uint8_t> digits) {
  if (digits.empty()) {
    throw InvalidArgument("cannot pack an empty digit sequence");
  }
  if (digits.size() > kMaxCodeBits) {
    throw InvalidArgument("code longer than 512 bits");
  }
  BitCode code(static_cast<std::uint32_t>(digits.size()));
  for (std::uint32_t i = 0; i < code.length_; ++i) {
    if (digits[i] > 1) {
      throw InvalidArgument("non-binary digit " + std::to_string(digits[i]) +
                            " at position " + std::to_string(i));
    }
    if (digits[i]) code.words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
  }
  return code;
}

BitCode BitCode::from_words(std::span<const std::uint64_t> words,
                            std::uint32_t length) {
  BitCode code(length);
  if (words.size() != code.words_.size()) {
    throw InvalidArgument("word count does not match code length");
  }
  std::copy(words.begin(), words.end(), code.words_.begin());
  code.words_.back() &= tail_mask(length);
  return code;
}

std::vector<std::uint8_t> BitCode::unpack() const {
  std::vector<std::uint8_t> digits(length_);
  for (std::uint32_t i = 0; i < length_; ++i) digits[i] = bit(i) ? 1 : 0;
  return digits;
}

void BitCode::set_bit(std::uint32_t pos, bool value) {
  if (pos >= length_) throw InvalidArgument("bit position out of range");
  const std::uint64_t mask = std::uint64_t{1} << (pos % kWordBits);
  if (value) {
    words_[pos / kWordBits] |= mask;
  } else {
    words_[pos / kWordBits] &= ~mask;
  }
}

CodeSet::CodeSet(std::uint32_t length)
    : length_(length), words_per_code_(words_for_bits(length)) {
  check_length(length);
}

void CodeSet::push_back(BitCodeView code) {
  if (code.length != length_) {
    throw InvalidArgument("code length " + std::to_string(code.length) +
                          " does not match set length " + std::to_string(length_));
  }
  data_.insert(data_.end(), code.words.begin(), code.words.end());
  data_.back() &= tail_mask(length_);
}

BitCode CodeSet::at(std::size_t i) const {
  if (i >= size()) throw InvalidArgument("code index out of range");
  return BitCode::from_words((*this)[i].words, length_);
}

std::uint32_t hamming_distance(BitCodeView a, BitCodeView b) {
  if (a.length != b.length) {
    throw InvalidArgument("hamming_distance: lengths " + std::to_string(a.length) +
                          " and " + std::to_string(b.length) + " differ");
  }
  return hamming_words(a.words.data(), b.words.data(), a.words.size());
}

IndexCode extract_index_code(BitCodeView code, std::uint32_t d) {
  if (d < 1 || d > kMaxIndexBits || d > code.length) {
    throw InvalidArgument("index width " + std::to_string(d) +
                          " outside [1, min(c, 24)] for c = " +
                          std::to_string(code.length));
  }
  return {index_prefix(code, d), d};
}

void hamming_scan(BitCodeView query, const CodeSet& codes,
                  std::span<std::uint32_t> out) {
  if (query.length != codes.length() || out.size() != codes.size()) {
    throw InvalidArgument("hamming_scan: shape mismatch");
  }
  const auto n = static_cast<std::int64_t>(codes.size());
  const std::size_t w = codes.words_per_code();
  const std::uint64_t* base = codes.raw().data();
  const std::uint64_t* q = query.words.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        hamming_words(q, base + static_cast<std::size_t>(i) * w, w);
  }
}

void hamming_scan_serial(BitCodeView query, const CodeSet& codes,
                         std::span<std::uint32_t> out) {
  if (query.length != codes.length() || out.size() != codes.size()) {
    throw InvalidArgument("hamming_scan_serial: shape mismatch");
  }
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out[i] = hamming_distance(query, codes[i]);
  }
}

}  // namespace hashprobe
