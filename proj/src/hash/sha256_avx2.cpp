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

// Eight-lane multi-buffer SHA-256. Lane i of every __m256i belongs to message
// i of the current group. Built with -mavx2; only reached after a cpuid check.

#include "smt/sha256.hpp"

#include <immintrin.h>

#include <cstring>

namespace smt::sha256::detail {

namespace {

constexpr int kLanes = 8;

inline __m256i rotr(__m256i x, int n) {
    return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}

inline std::uint32_t load_be32(const std::uint8_t* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return __builtin_bswap32(v);
}

// Word t of every lane's block, lane 0 in the lowest element.
inline __m256i gather_word(const std::uint8_t* const* blocks, int t) {
    return _mm256_setr_epi32(
        static_cast<int>(load_be32(blocks[0] + 4 * t)), static_cast<int>(load_be32(blocks[1] + 4 * t)),
        static_cast<int>(load_be32(blocks[2] + 4 * t)), static_cast<int>(load_be32(blocks[3] + 4 * t)),
        static_cast<int>(load_be32(blocks[4] + 4 * t)), static_cast<int>(load_be32(blocks[5] + 4 * t)),
        static_cast<int>(load_be32(blocks[6] + 4 * t)), static_cast<int>(load_be32(blocks[7] + 4 * t)));
}

void compress_x8(__m256i* s, const std::uint8_t* const* blocks) {
    __m256i w[64];
    for (int t = 0; t < 16; ++t) w[t] = gather_word(blocks, t);
    for (int t = 16; t < 64; ++t) {
        const __m256i x15 = w[t - 15];
        const __m256i x2 = w[t - 2];
        const __m256i s0 = _mm256_xor_si256(_mm256_xor_si256(rotr(x15, 7), rotr(x15, 18)),
                                            _mm256_srli_epi32(x15, 3));
        const __m256i s1 = _mm256_xor_si256(_mm256_xor_si256(rotr(x2, 17), rotr(x2, 19)),
                                            _mm256_srli_epi32(x2, 10));
        w[t] = _mm256_add_epi32(_mm256_add_epi32(s1, w[t - 7]), _mm256_add_epi32(s0, w[t - 16]));
    }

    __m256i a = s[0], b = s[1], c = s[2], d = s[3], e = s[4], f = s[5], g = s[6], h = s[7];
    for (int t = 0; t < 64; ++t) {
        const __m256i sig1 = _mm256_xor_si256(_mm256_xor_si256(rotr(e, 6), rotr(e, 11)), rotr(e, 25));
        const __m256i ch = _mm256_xor_si256(_mm256_and_si256(e, f), _mm256_andnot_si256(e, g));
        const __m256i k = _mm256_set1_epi32(static_cast<int>(kRoundConstants[t]));
        const __m256i t1 = _mm256_add_epi32(_mm256_add_epi32(_mm256_add_epi32(h, sig1), ch),
                                            _mm256_add_epi32(k, w[t]));
        const __m256i sig0 = _mm256_xor_si256(_mm256_xor_si256(rotr(a, 2), rotr(a, 13)), rotr(a, 22));
        const __m256i maj = _mm256_xor_si256(
            _mm256_xor_si256(_mm256_and_si256(a, b), _mm256_and_si256(a, c)), _mm256_and_si256(b, c));
        const __m256i t2 = _mm256_add_epi32(sig0, maj);
        h = g;
        g = f;
        f = e;
        e = _mm256_add_epi32(d, t1);
        d = c;
        c = b;
        b = a;
        a = _mm256_add_epi32(t1, t2);
    }
    s[0] = _mm256_add_epi32(s[0], a);
    s[1] = _mm256_add_epi32(s[1], b);
    s[2] = _mm256_add_epi32(s[2], c);
    s[3] = _mm256_add_epi32(s[3], d);
    s[4] = _mm256_add_epi32(s[4], e);
    s[5] = _mm256_add_epi32(s[5], f);
    s[6] = _mm256_add_epi32(s[6], g);
    s[7] = _mm256_add_epi32(s[7], h);
}

}  // namespace

void hash_batch_avx2(const std::uint8_t* const* messages, std::size_t length, std::size_t count,
                     Output* out) {
    const std::size_t full_blocks = length / kBlockSize;
    const std::size_t tail_len = length % kBlockSize;

    alignas(32) std::uint8_t tails[kLanes][2 * kBlockSize];
    for (std::size_t base = 0; base < count; base += kLanes) {
        const std::size_t live = count - base < kLanes ? count - base : kLanes;
        // Idle lanes re-hash the group's last message; their output is dropped.
        const std::uint8_t* msg[kLanes];
        for (std::size_t l = 0; l < kLanes; ++l) msg[l] = messages[base + (l < live ? l : live - 1)];

        __m256i s[8];
        for (int i = 0; i < 8; ++i) s[i] = _mm256_set1_epi32(static_cast<int>(kInitialState[i]));

        const std::uint8_t* blk[kLanes];
        for (std::size_t b = 0; b < full_blocks; ++b) {
            for (int l = 0; l < kLanes; ++l) blk[l] = msg[l] + b * kBlockSize;
            compress_x8(s, blk);
        }

        std::size_t tail_blocks = 0;
        for (int l = 0; l < kLanes; ++l)
            tail_blocks = pad_tail({msg[l] + full_blocks * kBlockSize, tail_len}, length, tails[l]);
        for (std::size_t b = 0; b < tail_blocks; ++b) {
            for (int l = 0; l < kLanes; ++l) blk[l] = tails[l] + b * kBlockSize;
            compress_x8(s, blk);
        }

        alignas(32) std::uint32_t words[8][kLanes];
        for (int i = 0; i < 8; ++i) _mm256_store_si256(reinterpret_cast<__m256i*>(words[i]), s[i]);
        for (std::size_t l = 0; l < live; ++l) {
            State st;
            for (int i = 0; i < 8; ++i) st[i] = words[i][l];
            store_state(st, out[base + l].data());
        }
    }
}

}  // namespace smt::sha256::detail
