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

#include "oracle.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace oracle {

Hash sha256(std::span<const std::uint8_t> data) {
    Hash out;
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) || len != 32)
        throw std::runtime_error("EVP_Digest failed");
    return out;
}

Hash leaf(std::span<const std::uint8_t> payload) {
    Bytes pre{0x00};
    pre.insert(pre.end(), payload.begin(), payload.end());
    return sha256(pre);
}

Hash node(const Hash& left, const Hash& right) {
    Bytes pre{0x01};
    pre.insert(pre.end(), left.begin(), left.end());
    pre.insert(pre.end(), right.begin(), right.end());
    return sha256(pre);
}

smt::Digest to_digest(const Hash& h) { return smt::Digest{h}; }

std::string hex(const Hash& h) { return smt::to_hex(h); }

Bytes bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

bool NaiveTree::apply(const smt::LeafOperation& op) {
    if (op.index.value >= (std::uint64_t{1} << depth_)) return false;
    const bool present = leaves_.contains(op.index.value);
    switch (op.kind) {
        case smt::OpKind::Insert:
            if (present) return false;
            leaves_[op.index.value] = op.value;
            return true;
        case smt::OpKind::Update:
            if (!present) return false;
            leaves_[op.index.value] = op.value;
            return true;
        case smt::OpKind::Remove:
            if (!present) return false;
            leaves_.erase(op.index.value);
            return true;
    }
    return false;
}

Hash NaiveTree::root() const { return subtree(0, 0); }

Hash NaiveTree::subtree(unsigned level, std::uint64_t first) const {
    if (level == depth_) {
        const auto it = leaves_.find(first);
        return it != leaves_.end() ? leaf(it->second) : leaf({});
    }
    const std::uint64_t half = std::uint64_t{1} << (depth_ - level - 1);
    return node(subtree(level + 1, first), subtree(level + 1, first + half));
}

std::set<std::uint64_t> ancestor_union(std::span<const smt::LeafOperation> ops, unsigned depth) {
    std::set<std::uint64_t> out;
    for (const auto& op : ops)
        for (std::uint64_t i = ((std::uint64_t{1} << depth) + op.index.value) / 2; i >= 1; i /= 2)
            out.insert(i);
    return out;
}

std::size_t written_leaves(std::span<const smt::LeafOperation> ops) {
    std::set<std::uint64_t> s;
    for (const auto& op : ops)
        if (op.kind != smt::OpKind::Remove) s.insert(op.index.value);
    return s.size();
}

std::uint64_t OpGen::next() {
    // splitmix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Bytes OpGen::payload() {
    Bytes b(1 + below(40));
    for (auto& x : b) x = static_cast<std::uint8_t>(next());
    return b;
}

std::vector<smt::LeafOperation> OpGen::valid_ops(NaiveTree& model, unsigned depth, std::size_t count) {
    const std::uint64_t cap = std::uint64_t{1} << depth;
    std::vector<smt::LeafOperation> ops;
    while (ops.size() < count) {
        const smt::LeafIndex k{below(cap)};
        smt::LeafOperation op;
        if (!model.contains(k.value))
            op = smt::LeafOperation::insert(k, payload());
        else if (below(3) == 0)
            op = smt::LeafOperation::remove(k);
        else
            op = smt::LeafOperation::update(k, payload());
        model.apply(op);
        ops.push_back(std::move(op));
    }
    return ops;
}

}  // namespace oracle
