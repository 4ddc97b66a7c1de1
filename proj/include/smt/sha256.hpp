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

/// \file
/// SHA-256 with interchangeable compression kernels.
///
/// Three kernels produce bit-identical output:
///  - `Scalar`: portable reference, one message at a time.
///  - `ShaNi`:  x86 SHA extensions, one message at a time.
///  - `Avx2`:   eight independent messages per pass, one per 32-bit lane.
///
/// Batches hash many messages of the same length, which is the shape of a
/// Merkle level (every node preimage is tag || left || right). `Auto`
/// resolves to the fastest kernel the running CPU supports.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace smt::sha256 {

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kBlockSize = 64;

using Output = std::array<std::uint8_t, kDigestSize>;

enum class Kernel { Auto, Scalar, ShaNi, Avx2 };

std::string_view kernel_name(Kernel k);

/// Throws smt::ConfigError on an unknown name.
Kernel kernel_from_name(std::string_view name);

/// True when the running CPU can execute `k`. `Auto` and `Scalar` are always
/// supported.
bool kernel_supported(Kernel k);

/// Concrete kernel used for single messages when `Auto` is requested.
Kernel resolve_single(Kernel k);

/// Concrete kernel used for batches when `Auto` is requested.
Kernel resolve_batch(Kernel k);

/// Single-message hash. Throws smt::ConfigError when `k` is unsupported.
Output hash(Kernel k, std::span<const std::uint8_t> message);

/// Hashes `messages.size()` messages, each exactly `length` bytes long, into
/// `out` (which must be the same size).
void hash_batch(Kernel k, std::span<const std::uint8_t* const> messages, std::size_t length,
                std::span<Output> out);

namespace detail {

inline constexpr std::array<std::uint32_t, 8> kInitialState = {
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
};

inline constexpr std::array<std::uint32_t, 64> kRoundConstants = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

using State = std::array<std::uint32_t, 8>;

/// Writes the padded tail of a `length`-byte message whose final partial
/// block is `tail` into `out` (128 bytes). Returns the number of tail blocks
/// (1 or 2).
std::size_t pad_tail(std::span<const std::uint8_t> tail, std::uint64_t length,
                     std::uint8_t* out);

void store_state(const State& s, std::uint8_t* out);

void compress_scalar(State& s, const std::uint8_t* blocks, std::size_t count);

#if defined(__x86_64__) || defined(_M_X64)
void compress_shani(State& s, const std::uint8_t* blocks, std::size_t count);

/// Hashes `count` messages of `length` bytes, eight lanes per pass.
void hash_batch_avx2(const std::uint8_t* const* messages, std::size_t length, std::size_t count,
                     Output* out);
#endif

}  // namespace detail

}  // namespace smt::sha256
