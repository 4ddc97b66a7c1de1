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
/// Fixed-depth sparse Merkle tree over heap-indexed nodes.
///
/// Only non-default nodes are stored: an absent index resolves to the
/// default digest of its level. Leaf k lives at heap index 2^depth + k.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smt/common.hpp"
#include "smt/counters.hpp"
#include "smt/hasher.hpp"

namespace smt {

enum class OpKind { Insert, Update, Remove };

std::string_view op_kind_name(OpKind k);

struct LeafOperation {
    OpKind kind = OpKind::Update;
    LeafIndex index;
    Bytes value;  // empty for Remove

    static LeafOperation insert(LeafIndex i, Bytes v) { return {OpKind::Insert, i, std::move(v)}; }
    static LeafOperation update(LeafIndex i, Bytes v) { return {OpKind::Update, i, std::move(v)}; }
    static LeafOperation remove(LeafIndex i) { return {OpKind::Remove, i, {}}; }

    friend bool operator==(const LeafOperation&, const LeafOperation&) = default;
};

/// Sibling digests from the leaf level up: siblings[0] is the leaf's
/// sibling, siblings[depth-1] the sibling of the root's child on the path.
struct Witness {
    LeafIndex leaf_index;
    std::vector<Digest> siblings;
};

class SparseMerkleTree {
public:
    static constexpr unsigned kMaxDepth = 63;

    /// Empty tree. Throws ConfigError unless 1 <= depth <= kMaxDepth.
    static SparseMerkleTree gen(unsigned depth, HashScheme scheme = HashScheme::sha256());

    unsigned depth() const { return depth_; }
    std::uint64_t capacity() const { return std::uint64_t{1} << depth_; }
    const HashScheme& scheme() const { return scheme_; }
    std::span<const Digest> defaults() const { return defaults_; }

    /// resolve(1). Only meaningful between engine runs; the leaf primitives
    /// below leave ancestors stale until the caller rehashes.
    Digest root() const { return resolve(NodeIndex{1}); }

    /// Cached digest, or the level default when the node is pruned.
    Digest resolve(NodeIndex node) const;

    bool contains(LeafIndex k) const { return leaf_values_.contains(k.value); }
    const Bytes* find_value(LeafIndex k) const;
    std::size_t leaf_count() const { return leaf_values_.size(); }

    const std::unordered_map<std::uint64_t, Digest>& cache() const { return cache_; }
    const std::unordered_map<std::uint64_t, Bytes>& leaf_values() const { return leaf_values_; }

    // Leaf primitives. None of them recomputes ancestor digests.

    /// Walks root to leaf, materialising pruned ancestors (left holding their
    /// level default until rehashed) and writes the leaf. depth visits.
    /// Throws IndexError or DuplicateLeafError.
    void insert_leaf(LeafIndex k, Bytes value);

    /// Rewrites value and leaf digest. One visit. Throws IndexError or
    /// MissingLeafError.
    void update_leaf(LeafIndex k, Bytes value);

    /// Drops value and leaf digest so the leaf is pruned again. One visit.
    /// Throws IndexError or MissingLeafError.
    void remove_leaf(LeafIndex k);

    /// Works for absent leaves too (non-membership witness).
    Witness member_witness_create(LeafIndex k) const;

    CounterSet& counters() { return counters_; }
    const CounterSet& counters() const { return counters_; }

    // Storage layer for the root-hash engines. Writes made while a journal is
    // open are undone by rollback_journal(). Nothing here counts visits.

    void check_index(LeafIndex k) const;
    const Digest* find_node(NodeIndex node) const;
    Digest* find_node(NodeIndex node);

    /// Returns the cached entry, inserting the level default if absent.
    /// References stay valid until that entry is erased.
    Digest& materialize(NodeIndex node);
    void erase_node(NodeIndex node);

    /// Sets value and digest of leaf k (no precondition checks).
    void write_leaf(LeafIndex k, Bytes value);
    void erase_leaf(LeafIndex k);

    void begin_journal();
    void commit_journal();
    void rollback_journal();

private:
    SparseMerkleTree(unsigned depth, HashScheme scheme);

    void require_present(LeafIndex k) const;
    void journal_node(std::uint64_t idx);
    void journal_leaf(std::uint64_t k);

    struct NodeUndo {
        std::uint64_t index;
        std::optional<Digest> digest;
    };
    struct LeafUndo {
        std::uint64_t index;
        std::optional<Bytes> value;
    };

    unsigned depth_;
    HashScheme scheme_;
    std::vector<Digest> defaults_;
    std::unordered_map<std::uint64_t, Digest> cache_;
    std::unordered_map<std::uint64_t, Bytes> leaf_values_;
    CounterSet counters_;

    bool journaling_ = false;
    std::vector<NodeUndo> node_journal_;
    std::vector<LeafUndo> leaf_journal_;
};

/// Folds hash_leaf(value) up through the witness and compares with root.
/// A witness of the wrong length or an out-of-range index yields false.
bool member_verify(const HashScheme& scheme, const Digest& root, const Witness& witness,
                   ByteView value, unsigned depth);

/// Membership of the scheme's default payload.
bool non_member_verify(const HashScheme& scheme, const Digest& root, const Witness& witness,
                       unsigned depth);

/// Full walk over the cache. Returns a description of the first violation:
/// a stale internal digest, a leaf digest that does not match its value, a
/// value without a digest, or a cached node with no cached child.
std::optional<std::string> check_consistency(const SparseMerkleTree& tree);

/// Text snapshot: `<heap_index> <digest_hex>` per cached node, then
/// `L <leaf_index> <value_hex>` per leaf, each group sorted by index.
std::string export_snapshot(const SparseMerkleTree& tree);

/// Inverse of export_snapshot. Throws ParseError on malformed input.
SparseMerkleTree import_snapshot(std::string_view text, unsigned depth,
                                 HashScheme scheme = HashScheme::sha256());

}  // namespace smt
