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
/// Root-hash engines for a batch of leaf operations.
///
/// One-phase batch update (OBU): apply every operation with the O(1) leaf
/// primitives, collecting the touched leaves. Then walk up one level at a
/// time: the parents of the previous level form a duplicate-free,
/// ascending work list, each entry is rehashed from its children, and the
/// list's parents become the next level. Every node on a touched path is
/// visited exactly once.
///
/// Two-phase baseline: each operation walks root to leaf, mutates the leaf
/// and marks its path stale; afterwards a recursive descent from the root
/// rehashes stale nodes and returns cached digests elsewhere. Every path is
/// walked twice.
///
/// Both engines leave the tree in the same state and perform the same hash
/// work. With threads > 1, OBU splits each level's work list across workers
/// with a barrier between levels, while the baseline forks at every stale
/// node whose children are both stale (nesting up to depth levels).

#pragma once

#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smt/counters.hpp"
#include "smt/tree.hpp"

namespace smt {

enum class EngineKind { Obu, TwoPhase };

std::string_view engine_name(EngineKind e);

struct EngineConfig {
    unsigned threads = 1;
    /// Keep the OBU per-level work lists in BatchResult::schedule.
    bool record_schedule = false;
};

/// Sets the worker count; nullopt means one per hardware thread. Throws
/// ConfigError on zero.
EngineConfig set_parallelism(EngineConfig config, std::optional<unsigned> threads);

struct BatchResult {
    Digest new_root;
    CounterSet counters;
    EngineKind engine = EngineKind::Obu;
    /// schedule[0] holds the touched leaves' heap indices, schedule[t] the
    /// nodes rehashed at level depth - t. OBU with record_schedule only.
    std::vector<std::vector<std::uint64_t>> schedule;
};

/// A batch operation failed its precondition. The tree has been restored to
/// its pre-batch state. `cause()` holds the primitive's own exception.
class BatchOpError : public Error {
public:
    BatchOpError(std::size_t op_index, std::exception_ptr cause, const std::string& what);
    std::size_t op_index() const noexcept { return op_index_; }
    std::exception_ptr cause() const noexcept { return cause_; }

private:
    std::size_t op_index_;
    std::exception_ptr cause_;
};

class Engine {
public:
    explicit Engine(EngineConfig config = {});
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    const EngineConfig& config() const { return config_; }

    /// One-phase batch update. Throws BatchOpError.
    BatchResult batch_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops);

    /// Two-phase baseline. Throws BatchOpError.
    BatchResult two_phase_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops);

    BatchResult run(EngineKind engine, SparseMerkleTree& tree, std::span<const LeafOperation> ops);

    /// The OBU hash phase alone, for leaves already written with the leaf
    /// primitives. Returns the new root.
    Digest rehash(SparseMerkleTree& tree, std::span<const LeafIndex> touched);

private:
    class Executor;

    void hash_levels(SparseMerkleTree& tree, std::vector<std::uint64_t> level, BatchResult& result);

    EngineConfig config_;
    std::unique_ptr<Executor> executor_;
};

BatchResult batch_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops,
                         const EngineConfig& config = {});

BatchResult two_phase_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops,
                             const EngineConfig& config = {});

/// Inserts or overwrites every entry in one batch and returns the new root.
/// Throws IndexError for an out-of-range key.
Digest commit(SparseMerkleTree& tree, const std::map<LeafIndex, Bytes>& entries);

/// Single-operation batch. Rethrows the leaf primitive's own error.
Digest apply_op(SparseMerkleTree& tree, const LeafOperation& op);

}  // namespace smt
