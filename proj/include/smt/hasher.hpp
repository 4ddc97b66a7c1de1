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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smt/common.hpp"
#include "smt/sha256.hpp"

namespace smt {

/// Fixed-length node or leaf digest. Equality is bytewise.
struct Digest {
    static constexpr std::size_t kSize = sha256::kDigestSize;

    std::array<std::uint8_t, kSize> bytes{};

    /// Throws InvalidDigestError unless `raw` is exactly kSize bytes.
    static Digest from_bytes(ByteView raw);
    /// Throws InvalidDigestError on malformed hex.
    static Digest from_hex(std::string_view hex);

    std::string hex() const { return to_hex(bytes); }
    ByteView view() const { return bytes; }

    friend bool operator==(const Digest&, const Digest&) = default;
    friend auto operator<=>(const Digest&, const Digest&) = default;
};

/// A pair of child digests awaiting a parent hash.
struct ChildPair {
    Digest left;
    Digest right;
};

/// Leaf and node hashing with domain separation.
///
/// hash_leaf(p)    = H^r(leaf_tag || p)
/// hash_node(l, r) = H^r(node_tag || l || r)
///
/// where H is SHA-256 and H^r applies it `rounds` times (re-hashing the
/// previous 32-byte output). The plain scheme has rounds = 1; larger values
/// give a deliberately slow hash for timing experiments. All methods are
/// const and thread-safe.
class HashScheme {
public:
    static constexpr std::uint8_t kLeafTag = 0x00;
    static constexpr std::uint8_t kNodeTag = 0x01;

    /// Throws ConfigError if the tags are equal or rounds is zero.
    HashScheme(std::string id, std::uint8_t leaf_tag, std::uint8_t node_tag, unsigned rounds = 1,
               Bytes default_payload = {}, sha256::Kernel kernel = sha256::Kernel::Auto);

    /// SHA-256 with tags 0x00 (leaf) / 0x01 (node) and an empty default leaf.
    static HashScheme sha256();

    /// Same tags, but every hash is iterated `rounds` times.
    static HashScheme slow_sha256(unsigned rounds);

    /// Looks up "sha256" or "sha256x<rounds>". Throws ConfigError otherwise.
    static HashScheme by_id(std::string_view id);

    HashScheme with_kernel(sha256::Kernel kernel) const;
    HashScheme with_default_payload(Bytes payload) const;

    const std::string& id() const { return id_; }
    std::uint8_t leaf_tag() const { return leaf_tag_; }
    std::uint8_t node_tag() const { return node_tag_; }
    unsigned rounds() const { return rounds_; }
    sha256::Kernel kernel() const { return kernel_; }
    const Bytes& default_payload() const { return default_payload_; }

    Digest hash_leaf(ByteView payload) const;
    Digest hash_node(const Digest& left, const Digest& right) const;

    /// Raw-byte overload; throws InvalidDigestError on a wrong-length child.
    Digest hash_node(ByteView left, ByteView right) const;

    /// Parent digests of `children[i]` into `out[i]`. Uses the batch kernel.
    void hash_nodes(std::span<const ChildPair> children, std::span<Digest> out) const;

    Digest default_leaf() const { return hash_leaf(default_payload_); }

private:
    void iterate(std::span<Digest> digests) const;

    std::string id_;
    std::uint8_t leaf_tag_;
    std::uint8_t node_tag_;
    unsigned rounds_;
    Bytes default_payload_;
    sha256::Kernel kernel_;
};

/// Empty-subtree digests: table[depth] is the default leaf digest and
/// table[l] = hash_node(table[l+1], table[l+1]). table[0] is the empty root.
/// Throws ConfigError when depth is zero.
std::vector<Digest> default_digests(const HashScheme& scheme, unsigned depth);

/// One lowercase hex digest per line, line i holding level i.
std::string format_default_digests(std::span<const Digest> table);
std::vector<Digest> parse_default_digests(std::string_view text);

}  // namespace smt
