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

#include "orvos/mask.hpp"

#include <algorithm>
#include <string>

#include "orvos/errors.hpp"

namespace orvos {

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](auto c) { return c != 0; }));
}

RleMask encode_rle(const BinaryMask& mask) {
  RleMask rle;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (auto c : mask.cells) {
    const std::uint8_t bit = c ? 1 : 0;
    if (bit != current) {
      rle.runs.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  rle.runs.push_back(run);
  return rle;
}

BinaryMask decode_rle(const RleMask& rle, std::size_t height, std::size_t width) {
  std::size_t total = 0;
  for (auto r : rle.runs) total += r;
  if (total != height * width) {
    throw FormatError("rle: runs sum to " + std::to_string(total) + ", expected " +
                      std::to_string(height * width));
  }
  BinaryMask mask(height, width);
  std::size_t pos = 0;
  std::uint8_t bit = 0;
  for (auto r : rle.runs) {
    std::fill_n(mask.cells.begin() + static_cast<std::ptrdiff_t>(pos), r, bit);
    pos += r;
    bit ^= 1;
  }
  return mask;
}

}  // namespace orvos
