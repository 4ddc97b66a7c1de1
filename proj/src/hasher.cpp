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

#include "smt/hasher.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

namespace smt {

namespace {

constexpr std::size_t kNodePreimage = 1 + 2 * Digest::kSize;

// Preimages are staged on the stack in groups of this many nodes.
constexpr std::size_t kStage = 64;

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
    std::string out(bytes.size() * 2, '0');
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        out[2 * i] = kHexDigits[bytes[i] >> 4];
        out[2 * i + 1] = kHexDigits[bytes[i] & 0xf];
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2) throw DecodeError("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("invalid hex character");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

Digest Digest::from_bytes(ByteView raw) {
    if (raw.size() != kSize)
        throw InvalidDigestError("digest must be " + std::to_string(kSize) + " bytes, got " +
                                 std::to_string(raw.size()));
    Digest d;
    std::memcpy(d.bytes.data(), raw.data(), kSize);
    return d;
}

Digest Digest::from_hex(std::string_view hex) {
    Bytes raw;
    try {
        raw = smt::from_hex(hex);
    } catch (const DecodeError& e) {
        throw InvalidDigestError(e.what());
    }
    return from_bytes(raw);
}

HashScheme::HashScheme(std::string id, std::uint8_t leaf_tag, std::uint8_t node_tag,
                       unsigned rounds, Bytes default_payload, sha256::Kernel kernel)
    : id_(std::move(id)),
      leaf_tag_(leaf_tag),
      node_tag_(node_tag),
      rounds_(rounds),
      default_payload_(std::move(default_payload)),
      kernel_(kernel) {
    if (leaf_tag_ == node_tag_) throw ConfigError("leaf and node domain tags must differ");
    if (rounds_ == 0) throw ConfigError("hash rounds must be at least 1");
    if (!sha256::kernel_supported(kernel_))
        throw ConfigError("sha256 kernel '" + std::string(sha256::kernel_name(kernel_)) +
                          "' is not supported on this CPU");
}

HashScheme HashScheme::sha256() { return HashScheme("sha256", kLeafTag, kNodeTag); }

HashScheme HashScheme::slow_sha256(unsigned rounds) {
    return HashScheme("sha256x" + std::to_string(rounds), kLeafTag, kNodeTag, rounds);
}

HashScheme HashScheme::by_id(std::string_view id) {
    if (id == "sha256") return sha256();
    if (id.starts_with("sha256x")) {
        const std::string_view digits = id.substr(7);
        unsigned rounds = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rounds);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && rounds > 0)
            return slow_sha256(rounds);
    }
    throw ConfigError("unknown hash scheme '" + std::string(id) + "'");
}

HashScheme HashScheme::with_kernel(sha256::Kernel kernel) const {
    HashScheme copy = *this;
    if (!sha256::kernel_supported(kernel))
        throw ConfigError("sha256 kernel '" + std::string(sha256::kernel_name(kernel)) +
                          "' is not supported on this CPU");
    copy.kernel_ = kernel;
    return copy;
}

HashScheme HashScheme::with_default_payload(Bytes payload) const {
    HashScheme copy = *this;
    copy.default_payload_ = std::move(payload);
    return copy;
}

void HashScheme::iterate(std::span<Digest> digests) const {
    if (rounds_ == 1 || digests.empty()) return;
    std::vector<const std::uint8_t*> ptrs(digests.size());
    std::vector<sha256::Output> tmp(digests.size());
    for (unsigned r = 1; r < rounds_; ++r) {
        for (std::size_t i = 0; i < digests.size(); ++i) ptrs[i] = digests[i].bytes.data();
        sha256::hash_batch(kernel_, ptrs, Digest::kSize, tmp);
        for (std::size_t i = 0; i < digests.size(); ++i) digests[i].bytes = tmp[i];
    }
}

Digest HashScheme::hash_leaf(ByteView payload) const {
    Bytes preimage(payload.size() + 1);
    preimage[0] = leaf_tag_;
    if (!payload.empty()) std::memcpy(preimage.data() + 1, payload.data(), payload.size());
    Digest d{sha256::hash(kernel_, preimage)};
    iterate({&d, 1});
    return d;
}

Digest HashScheme::hash_node(const Digest& left, const Digest& right) const {
    std::uint8_t preimage[kNodePreimage];
    preimage[0] = node_tag_;
    std::memcpy(preimage + 1, left.bytes.data(), Digest::kSize);
    std::memcpy(preimage + 1 + Digest::kSize, right.bytes.data(), Digest::kSize);
    Digest d{sha256::hash(kernel_, preimage)};
    iterate({&d, 1});
    return d;
}

Digest HashScheme::hash_node(ByteView left, ByteView right) const {
    return hash_node(Digest::from_bytes(left), Digest::from_bytes(right));
}

void HashScheme::hash_nodes(std::span<const ChildPair> children, std::span<Digest> out) const {
    if (children.size() != out.size())
        throw ConfigError("hash_nodes: output size differs from input size");

    std::uint8_t stage[kStage][kNodePreimage];
    const std::uint8_t* ptrs[kStage];
    sha256::Output results[kStage];
    for (std::size_t base = 0; base < children.size(); base += kStage) {
        const std::size_t n = std::min(kStage, children.size() - base);
        for (std::size_t i = 0; i < n; ++i) {
            stage[i][0] = node_tag_;
            std::memcpy(stage[i] + 1, children[base + i].left.bytes.data(), Digest::kSize);
            std::memcpy(stage[i] + 1 + Digest::kSize, children[base + i].right.bytes.data(),
                        Digest::kSize);
            ptrs[i] = stage[i];
        }
        sha256::hash_batch(kernel_, {ptrs, n}, kNodePreimage, {results, n});
        for (std::size_t i = 0; i < n; ++i) out[base + i].bytes = results[i];
    }
    iterate(out);
}

std::vector<Digest> default_digests(const HashScheme& scheme, unsigned depth) {
    if (depth == 0) throw ConfigError("tree depth must be at least 1");
    std::vector<Digest> table(depth + 1);
    table[depth] = scheme.default_leaf();
    for (unsigned level = depth; level-- > 0;)
        table[level] = scheme.hash_node(table[level + 1], table[level + 1]);
    return table;
}

std::string format_default_digests(std::span<const Digest> table) {
    std::string out;
    for (const Digest& d : table) {
        out += d.hex();
        out += '\n';
    }
    return out;
}

std::vector<Digest> parse_default_digests(std::string_view text) {
    std::vector<Digest> table;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        try {
            table.push_back(Digest::from_hex(line));
        } catch (const InvalidDigestError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return table;
}

}  // namespace smt
