// Copyright 2026 The smt-batch Authors
// SPDX-License-Identifier: Apache-2.0
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

// Portable reference compression function. Every other kernel is tested
// against this one.

#include "smt/sha256.hpp"

#include <bit>
#include <cstring>

namespace smt::sha256::detail {

namespace {

inline std::uint32_t load_be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

inline std::uint32_t big_sigma0(std::uint32_t x) {
    return std::rotr(x, 2) ^ std::rotr(x, 13) ^ std::rotr(x, 22);
}
inline std::uint32_t big_sigma1(std::uint32_t x) {
    return std::rotr(x, 6) ^ std::rotr(x, 11) ^ std::rotr(x, 25);
}
inline std::uint32_t small_sigma0(std::uint32_t x) {
    return std::rotr(x, 7) ^ std::rotr(x, 18) ^ (x >> 3);
}
inline std::uint32_t small_sigma1(std::uint32_t x) {
    return std::rotr(x, 17) ^ std::rotr(x, 19) ^ (x >> 10);
}

}  // namespace

std::size_t pad_tail(std::span<const std::uint8_t> tail, std::uint64_t length,
                     std::uint8_t* out) {
    std::memset(out, 0, 2 * kBlockSize);
    if (!tail.empty()) std::memcpy(out, tail.data(), tail.size());
    out[tail.size()] = 0x80;
    const std::size_t blocks = tail.size() + 9 > kBlockSize ? 2 : 1;
    const std::uint64_t bits = length * 8;
    std::uint8_t* len_at = out + blocks * kBlockSize - 8;
    for (int i = 0; i < 8; ++i) len_at[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    return blocks;
}

void store_state(const State& s, std::uint8_t* out) {
    for (std::size_t i = 0; i < 8; ++i) {
        out[4 * i + 0] = static_cast<std::uint8_t>(s[i] >> 24);
        out[4 * i + 1] = static_cast<std::uint8_t>(s[i] >> 16);
        out[4 * i + 2] = static_cast<std::uint8_t>(s[i] >> 8);
        out[4 * i + 3] = static_cast<std::uint8_t>(s[i]);
    }
}

void compress_scalar(State& s, const std::uint8_t* blocks, std::size_t count) {
    std::uint32_t w[64];
    for (std::size_t b = 0; b < count; ++b, blocks += kBlockSize) {
        for (int t = 0; t < 16; ++t) w[t] = load_be32(blocks + 4 * t);
        for (int t = 16; t < 64; ++t)
            w[t] = small_sigma1(w[t - 2]) + w[t - 7] + small_sigma0(w[t - 15]) + w[t - 16];

        std::uint32_t a = s[0], b0 = s[1], c = s[2], d = s[3];
        std::uint32_t e = s[4], f = s[5], g = s[6], h = s[7];
        for (int t = 0; t < 64; ++t) {
            const std::uint32_t t1 = h + big_sigma1(e) + ((e & f) ^ (~e & g)) + kRoundConstants[t] + w[t];
            const std::uint32_t t2 = big_sigma0(a) + ((a & b0) ^ (a & c) ^ (b0 & c));
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b0;
            b0 = a;
            a = t1 + t2;
        }
        s[0] += a;
        s[1] += b0;
        s[2] += c;
        s[3] += d;
        s[4] += e;
        s[5] += f;
        s[6] += g;
        s[7] += h;
    }
}

}  // namespace smt::sha256::detail
