// Copyright 2026 The skysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skysum/rng.hpp"

#include <cmath>
#include <numbers>

#include "skysum/kernels.hpp"

namespace skysum {

void Stream::refill() noexcept {
  const std::uint64_t b = block_++;
  buf_ = philox4x32_10({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                        static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32)},
                       key_);
  pos_ = 0;
}

double Stream::normal() noexcept {
  const double u1 = uniform_open0();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void Stream::fill_u32(std::span<std::uint32_t> out) {
  std::size_t i = 0;
  while (i < out.size() && pos_ < 4) out[i++] = buf_[pos_++];
  const std::size_t whole = (out.size() - i) / 4;
  if (whole > 0) {
    kernels::philox_fill(key_, id_, block_, out.subspan(i, whole * 4));
    block_ += whole;
    i += whole * 4;
  }
  while (i < out.size()) out[i++] = next_u32();
}

}  // namespace skysum
