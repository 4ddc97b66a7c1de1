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

#include "smt/sha256.hpp"

#include "smt/common.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#define SMT_X86 1
#else
#define SMT_X86 0
#endif

namespace smt::sha256 {

namespace {

struct CpuFeatures {
    bool avx2 = false;
    bool sha = false;
};

CpuFeatures detect() {
    CpuFeatures f;
#if SMT_X86
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (__get_cpuid_max(0, nullptr) < 7) return f;
    __cpuid(1, eax, ebx, ecx, edx);
    const bool osxsave = (ecx & (1u << 27)) != 0;
    const bool sse41 = (ecx & (1u << 19)) != 0;
    bool ymm_enabled = false;
    if (osxsave) {
        unsigned lo = 0, hi = 0;
        __asm__("xgetbv" : "=a"(lo), "=d"(hi) : "c"(0));
        ymm_enabled = (lo & 0x6) == 0x6;
    }
    __cpuid_count(7, 0, eax, ebx, ecx, edx);
    f.avx2 = ymm_enabled && (ebx & (1u << 5)) != 0;
    f.sha = sse41 && (ebx & (1u << 29)) != 0;
#endif
    return f;
}

const CpuFeatures& features() {
    static const CpuFeatures f = detect();
    return f;
}

void require(Kernel k) {
    if (!kernel_supported(k))
        throw ConfigError("sha256 kernel '" + std::string(kernel_name(k)) +
                          "' is not supported on this CPU");
}

template <typename Compress>
Output hash_single(Compress compress, std::span<const std::uint8_t> message) {
    detail::State s = detail::kInitialState;
    const std::size_t full = message.size() / kBlockSize;
    if (full) compress(s, message.data(), full);
    std::uint8_t tail[2 * kBlockSize];
    const std::size_t n = detail::pad_tail(message.subspan(full * kBlockSize), message.size(), tail);
    compress(s, tail, n);
    Output out;
    detail::store_state(s, out.data());
    return out;
}

}  // namespace

std::string_view kernel_name(Kernel k) {
    switch (k) {
        case Kernel::Auto: return "auto";
        case Kernel::Scalar: return "scalar";
        case Kernel::ShaNi: return "sha-ni";
        case Kernel::Avx2: return "avx2";
    }
    return "?";
}

Kernel kernel_from_name(std::string_view name) {
    for (Kernel k : {Kernel::Auto, Kernel::Scalar, Kernel::ShaNi, Kernel::Avx2})
        if (kernel_name(k) == name) return k;
    throw ConfigError("unknown sha256 kernel '" + std::string(name) + "'");
}

bool kernel_supported(Kernel k) {
    switch (k) {
        case Kernel::Auto:
        case Kernel::Scalar: return true;
        case Kernel::ShaNi: return features().sha;
        case Kernel::Avx2: return features().avx2;
    }
    return false;
}

Kernel resolve_single(Kernel k) {
    if (k != Kernel::Auto) return k;
    return features().sha ? Kernel::ShaNi : Kernel::Scalar;
}

Kernel resolve_batch(Kernel k) {
    if (k != Kernel::Auto) return k;
    // SHA-NI runs a single stream faster than eight AVX2 lanes per message.
    if (features().sha) return Kernel::ShaNi;
    return features().avx2 ? Kernel::Avx2 : Kernel::Scalar;
}

Output hash(Kernel k, std::span<const std::uint8_t> message) {
    k = resolve_single(k);
    require(k);
    switch (k) {
#if SMT_X86
        case Kernel::ShaNi: return hash_single(detail::compress_shani, message);
        case Kernel::Avx2: {
            // No single-lane AVX2 path; one live lane of the batch kernel.
            const std::uint8_t* p = message.data();
            Output out;
            detail::hash_batch_avx2(&p, message.size(), 1, &out);
            return out;
        }
#endif
        default: return hash_single(detail::compress_scalar, message);
    }
}

void hash_batch(Kernel k, std::span<const std::uint8_t* const> messages, std::size_t length,
                std::span<Output> out) {
    if (out.size() != messages.size())
        throw ConfigError("hash_batch: output span size differs from message count");
    if (messages.empty()) return;
    k = resolve_batch(k);
    require(k);
    switch (k) {
#if SMT_X86
        case Kernel::Avx2:
            detail::hash_batch_avx2(messages.data(), length, messages.size(), out.data());
            return;
        case Kernel::ShaNi:
            for (std::size_t i = 0; i < messages.size(); ++i)
                out[i] = hash_single(detail::compress_shani, {messages[i], length});
            return;
#endif
        default:
            for (std::size_t i = 0; i < messages.size(); ++i)
                out[i] = hash_single(detail::compress_scalar, {messages[i], length});
            return;
    }
}

}  // namespace smt::sha256
