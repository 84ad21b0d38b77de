/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace orvos {

/// Raw video frame: one colour index per cell, row-major.
struct Frame {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> cells;

  Frame() = default;
  Frame(std::size_t h, std::size_t w, std::uint8_t fill = 0) : height(h), width(w), cells(h * w, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return cells[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return cells[y * width + x]; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Per-frame binary segmentation, row-major; cells hold 0 or 1.
struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> cells;

  BinaryMask() = default;
  BinaryMask(std::size_t h, std::size_t w) : height(h), width(w), cells(h * w, 0) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return cells[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return cells[y * width + x]; }
  std::size_t area() const;
  bool none() const { return area() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Alternating run lengths over row-major cells, starting with a (possibly
/// zero-length) run of zeros.
struct RleMask {
  std::vector<std::uint32_t> runs;
  friend bool operator==(const RleMask&, const RleMask&) = default;
};

RleMask encode_rle(const BinaryMask& mask);
/// Throws FormatError when the runs do not sum to height * width.
BinaryMask decode_rle(const RleMask& rle, std::size_t height, std::size_t width);

}  // namespace orvos
