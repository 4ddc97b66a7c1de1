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

#include "smt/tree.hpp"

#include <algorithm>
#include <charconv>

namespace smt {

std::string_view op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Insert: return "insert";
        case OpKind::Update: return "update";
        case OpKind::Remove: return "remove";
    }
    return "?";
}

SparseMerkleTree::SparseMerkleTree(unsigned depth, HashScheme scheme)
    : depth_(depth), scheme_(std::move(scheme)), defaults_(default_digests(scheme_, depth)) {}

SparseMerkleTree SparseMerkleTree::gen(unsigned depth, HashScheme scheme) {
    if (depth < 1 || depth > kMaxDepth)
        throw ConfigError("tree depth must be in [1, " + std::to_string(kMaxDepth) + "], got " +
                          std::to_string(depth));
    return SparseMerkleTree(depth, std::move(scheme));
}

Digest SparseMerkleTree::resolve(NodeIndex node) const {
    const auto it = cache_.find(node.value);
    return it != cache_.end() ? it->second : defaults_[node.level()];
}

const Bytes* SparseMerkleTree::find_value(LeafIndex k) const {
    const auto it = leaf_values_.find(k.value);
    return it != leaf_values_.end() ? &it->second : nullptr;
}

void SparseMerkleTree::check_index(LeafIndex k) const {
    if (k.value >= capacity())
        throw IndexError("leaf index " + std::to_string(k.value) + " out of range for depth " +
                         std::to_string(depth_));
}

void SparseMerkleTree::require_present(LeafIndex k) const {
    check_index(k);
    if (!contains(k)) throw MissingLeafError("leaf " + std::to_string(k.value) + " does not exist");
}

void SparseMerkleTree::insert_leaf(LeafIndex k, Bytes value) {
    check_index(k);
    if (contains(k)) throw DuplicateLeafError("leaf " + std::to_string(k.value) + " already exists");
    const NodeIndex leaf = k.node(depth_);
    for (unsigned level = 1; level < depth_; ++level) {
        materialize(NodeIndex{leaf.value >> (depth_ - level)});
        ++counters_.leaf_phase_visits;
    }
    write_leaf(k, std::move(value));
    ++counters_.leaf_phase_visits;
}

void SparseMerkleTree::update_leaf(LeafIndex k, Bytes value) {
    require_present(k);
    write_leaf(k, std::move(value));
    ++counters_.leaf_phase_visits;
}

void SparseMerkleTree::remove_leaf(LeafIndex k) {
    require_present(k);
    erase_leaf(k);
    ++counters_.leaf_phase_visits;
}

Witness SparseMerkleTree::member_witness_create(LeafIndex k) const {
    check_index(k);
    Witness w{k, {}};
    w.siblings.reserve(depth_);
    for (NodeIndex n = k.node(depth_); n.value > 1; n = n.parent()) w.siblings.push_back(resolve(n.sibling()));
    return w;
}

const Digest* SparseMerkleTree::find_node(NodeIndex node) const {
    const auto it = cache_.find(node.value);
    return it != cache_.end() ? &it->second : nullptr;
}

Digest* SparseMerkleTree::find_node(NodeIndex node) {
    const auto it = cache_.find(node.value);
    return it != cache_.end() ? &it->second : nullptr;
}

Digest& SparseMerkleTree::materialize(NodeIndex node) {
    auto [it, inserted] = cache_.try_emplace(node.value, defaults_[node.level()]);
    if (inserted && journaling_) node_journal_.push_back({node.value, std::nullopt});
    return it->second;
}

void SparseMerkleTree::erase_node(NodeIndex node) {
    journal_node(node.value);
    cache_.erase(node.value);
}

void SparseMerkleTree::write_leaf(LeafIndex k, Bytes value) {
    const std::uint64_t idx = k.node(depth_).value;
    journal_node(idx);
    journal_leaf(k.value);
    cache_[idx] = scheme_.hash_leaf(value);
    leaf_values_[k.value] = std::move(value);
}

void SparseMerkleTree::erase_leaf(LeafIndex k) {
    const std::uint64_t idx = k.node(depth_).value;
    journal_node(idx);
    journal_leaf(k.value);
    cache_.erase(idx);
    leaf_values_.erase(k.value);
}

void SparseMerkleTree::journal_node(std::uint64_t idx) {
    if (!journaling_) return;
    const auto it = cache_.find(idx);
    node_journal_.push_back(
        {idx, it != cache_.end() ? std::optional<Digest>(it->second) : std::nullopt});
}

void SparseMerkleTree::journal_leaf(std::uint64_t k) {
    if (!journaling_) return;
    const auto it = leaf_values_.find(k);
    leaf_journal_.push_back(
        {k, it != leaf_values_.end() ? std::optional<Bytes>(it->second) : std::nullopt});
}

void SparseMerkleTree::begin_journal() {
    journaling_ = true;
    node_journal_.clear();
    leaf_journal_.clear();
}

void SparseMerkleTree::commit_journal() {
    journaling_ = false;
    node_journal_.clear();
    leaf_journal_.clear();
}

void SparseMerkleTree::rollback_journal() {
    for (auto it = node_journal_.rbegin(); it != node_journal_.rend(); ++it) {
        if (it->digest)
            cache_[it->index] = *it->digest;
        else
            cache_.erase(it->index);
    }
    for (auto it = leaf_journal_.rbegin(); it != leaf_journal_.rend(); ++it) {
        if (it->value)
            leaf_values_[it->index] = std::move(*it->value);
        else
            leaf_values_.erase(it->index);
    }
    commit_journal();
}

bool member_verify(const HashScheme& scheme, const Digest& root, const Witness& witness,
                   ByteView value, unsigned depth) {
    if (depth == 0 || depth > SparseMerkleTree::kMaxDepth) return false;
    if (witness.siblings.size() != depth) return false;
    if (witness.leaf_index.value >= (std::uint64_t{1} << depth)) return false;
    Digest acc = scheme.hash_leaf(value);
    std::uint64_t path = witness.leaf_index.value;
    for (const Digest& sibling : witness.siblings) {
        acc = (path & 1) ? scheme.hash_node(sibling, acc) : scheme.hash_node(acc, sibling);
        path >>= 1;
    }
    return acc == root;
}

bool non_member_verify(const HashScheme& scheme, const Digest& root, const Witness& witness,
                       unsigned depth) {
    return member_verify(scheme, root, witness, scheme.default_payload(), depth);
}

std::optional<std::string> check_consistency(const SparseMerkleTree& tree) {
    const unsigned depth = tree.depth();
    for (const auto& [idx, digest] : tree.cache()) {
        const NodeIndex node{idx};
        if (idx == 0 || node.level() > depth) return "heap index " + std::to_string(idx) + " out of range";
        if (node.level() == depth) {
            const LeafIndex k{idx - tree.capacity()};
            const Bytes* value = tree.find_value(k);
            if (!value) return "leaf " + std::to_string(k.value) + " has a digest but no value";
            if (tree.scheme().hash_leaf(*value) != digest)
                return "leaf " + std::to_string(k.value) + " digest does not match its value";
            continue;
        }
        const bool has_left = tree.find_node(node.left()) != nullptr;
        const bool has_right = tree.find_node(node.right()) != nullptr;
        if (!has_left && !has_right) return "node " + std::to_string(idx) + " has no cached child";
        if (tree.scheme().hash_node(tree.resolve(node.left()), tree.resolve(node.right())) != digest)
            return "node " + std::to_string(idx) + " digest is stale";
    }
    for (const auto& [k, value] : tree.leaf_values()) {
        if (!tree.find_node(LeafIndex{k}.node(depth)))
            return "leaf " + std::to_string(k) + " has a value but no digest";
    }
    return std::nullopt;
}

std::string export_snapshot(const SparseMerkleTree& tree) {
    std::vector<std::uint64_t> nodes;
    nodes.reserve(tree.cache().size());
    for (const auto& entry : tree.cache()) nodes.push_back(entry.first);
    std::sort(nodes.begin(), nodes.end());

    std::vector<std::uint64_t> leaves;
    leaves.reserve(tree.leaf_count());
    for (const auto& entry : tree.leaf_values()) leaves.push_back(entry.first);
    std::sort(leaves.begin(), leaves.end());

    std::string out;
    for (std::uint64_t idx : nodes) {
        out += std::to_string(idx);
        out += ' ';
        out += tree.cache().at(idx).hex();
        out += '\n';
    }
    for (std::uint64_t k : leaves) {
        out += "L ";
        out += std::to_string(k);
        out += ' ';
        out += to_hex(tree.leaf_values().at(k));
        out += '\n';
    }
    return out;
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("expected an unsigned integer, got '" + std::string(s) + "'", line);
    return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace

SparseMerkleTree import_snapshot(std::string_view text, unsigned depth, HashScheme scheme) {
    SparseMerkleTree tree = SparseMerkleTree::gen(depth, std::move(scheme));
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        try {
            if (fields[0] == "L") {
                if (fields.size() < 2 || fields.size() > 3) throw ParseError("malformed leaf line", line_no);
                const LeafIndex k{parse_u64(fields[1], line_no)};
                if (k.value >= tree.capacity()) throw ParseError("leaf index out of range", line_no);
                Bytes value = fields.size() == 3 ? from_hex(fields[2]) : Bytes{};
                // Leaf digests are re-derived; the node lines must agree.
                const Digest* cached = tree.find_node(k.node(depth));
                const std::optional<Digest> listed =
                    cached ? std::optional<Digest>(*cached) : std::nullopt;
                tree.write_leaf(k, std::move(value));
                if (listed && *listed != *tree.find_node(k.node(depth)))
                    throw ParseError("leaf digest disagrees with its value", line_no);
            } else {
                if (fields.size() != 2) throw ParseError("malformed node line", line_no);
                const NodeIndex node{parse_u64(fields[0], line_no)};
                if (node.value == 0 || node.level() > depth)
                    throw ParseError("heap index out of range", line_no);
                tree.materialize(node) = Digest::from_hex(fields[1]);
            }
        } catch (const DecodeError& e) {
            throw ParseError(e.what(), line_no);
        } catch (const InvalidDigestError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return tree;
}

}  // namespace smt
