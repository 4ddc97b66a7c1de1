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

#include "smt/batch.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <thread>
#include <unordered_set>

namespace smt {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t nanos_since(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

// Nodes handed to one hash_nodes call.
constexpr std::size_t kChunk = 64;

// Smallest slice of a level given to one worker.
constexpr std::size_t kGrain = 16;

std::string describe(std::size_t i, const LeafOperation& op, const std::exception& e) {
    return "op #" + std::to_string(i) + " (" + std::string(op_kind_name(op.kind)) + " leaf " +
           std::to_string(op.index.value) + "): " + e.what();
}

std::uint64_t count_distinct(std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::uint64_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::string_view engine_name(EngineKind e) {
    return e == EngineKind::Obu ? "obu" : "two-phase";
}

EngineConfig set_parallelism(EngineConfig config, std::optional<unsigned> threads) {
    if (threads && *threads == 0) throw ConfigError("thread count must be at least 1");
    config.threads = threads ? *threads : std::max(1u, std::thread::hardware_concurrency());
    return config;
}

BatchOpError::BatchOpError(std::size_t op_index, std::exception_ptr cause, const std::string& what)
    : Error(what), op_index_(op_index), cause_(std::move(cause)) {}

class Engine::Executor {
public:
    explicit Executor(unsigned threads)
        : control_(tbb::global_control::max_allowed_parallelism, threads),
          arena_(static_cast<int>(threads)) {}

    template <typename F>
    void run(F&& f) {
        arena_.execute(std::forward<F>(f));
    }

private:
    tbb::global_control control_;
    tbb::task_arena arena_;
};

Engine::Engine(EngineConfig config) : config_(config) {
    if (config_.threads == 0) throw ConfigError("thread count must be at least 1");
    if (config_.threads > 1) executor_ = std::make_unique<Executor>(config_.threads);
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

BatchResult Engine::run(EngineKind engine, SparseMerkleTree& tree,
                        std::span<const LeafOperation> ops) {
    return engine == EngineKind::Obu ? batch_update(tree, ops) : two_phase_update(tree, ops);
}

void Engine::hash_levels(SparseMerkleTree& tree, std::vector<std::uint64_t> level,
                         BatchResult& result) {
    CounterSet& c = tree.counters();
    const HashScheme& scheme = tree.scheme();
    if (config_.record_schedule) result.schedule.push_back(level);

    std::vector<Digest*> slots;
    std::vector<std::uint64_t> next;
    while (!level.empty() && level.front() > 1) {
        // Parents of an ascending list are ascending, so adjacent dedup
        // leaves each parent exactly once.
        next.clear();
        for (std::uint64_t i : level) {
            const std::uint64_t p = i >> 1;
            if (next.empty() || next.back() != p) next.push_back(p);
        }

        // Entries are created up front; workers only overwrite values.
        slots.resize(next.size());
        for (std::size_t j = 0; j < next.size(); ++j) slots[j] = &tree.materialize(NodeIndex{next[j]});

        auto rehash_range = [&](std::size_t lo, std::size_t hi) {
            ChildPair pairs[kChunk];
            Digest out[kChunk];
            for (std::size_t base = lo; base < hi; base += kChunk) {
                const std::size_t n = std::min(kChunk, hi - base);
                for (std::size_t i = 0; i < n; ++i) {
                    const NodeIndex node{next[base + i]};
                    pairs[i] = {tree.resolve(node.left()), tree.resolve(node.right())};
                }
                scheme.hash_nodes({pairs, n}, {out, n});
                for (std::size_t i = 0; i < n; ++i) *slots[base + i] = out[i];
            }
        };
        if (executor_ && next.size() > kGrain) {
            executor_->run([&] {
                tbb::parallel_for(tbb::blocked_range<std::size_t>(0, next.size(), kGrain),
                                  [&](const tbb::blocked_range<std::size_t>& r) {
                                      rehash_range(r.begin(), r.end());
                                  });
            });
        } else {
            rehash_range(0, next.size());
        }

        // A node left with two pruned children is pruned itself.
        for (std::uint64_t p : next) {
            const NodeIndex node{p};
            if (!tree.find_node(node.left()) && !tree.find_node(node.right())) tree.erase_node(node);
        }

        c.hash_phase_visits += next.size();
        c.hash_invocations += next.size();
        ++c.levels_processed;
        if (config_.record_schedule) result.schedule.push_back(next);
        level.swap(next);
    }
}

BatchResult Engine::batch_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops) {
    BatchResult result;
    result.engine = EngineKind::Obu;
    CounterSet& c = tree.counters();
    c.reset();

    const unsigned depth = tree.depth();
    std::vector<std::uint64_t> touched;
    std::vector<std::uint64_t> hashed;
    touched.reserve(ops.size());
    hashed.reserve(ops.size());

    const auto leaf_start = Clock::now();
    tree.begin_journal();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const LeafOperation& op = ops[i];
        try {
            switch (op.kind) {
                case OpKind::Insert: tree.insert_leaf(op.index, op.value); break;
                case OpKind::Update: tree.update_leaf(op.index, op.value); break;
                case OpKind::Remove: tree.remove_leaf(op.index); break;
            }
        } catch (const Error& e) {
            tree.rollback_journal();
            c.reset();
            throw BatchOpError(i, std::current_exception(), describe(i, op, e));
        }
        touched.push_back(op.index.node(depth).value);
        if (op.kind != OpKind::Remove) hashed.push_back(op.index.value);
    }
    tree.commit_journal();
    c.hash_invocations += count_distinct(hashed);
    c.leaf_phase_nanos = nanos_since(leaf_start);

    const auto hash_start = Clock::now();
    if (!touched.empty()) {
        touched.resize(count_distinct(touched));
        hash_levels(tree, std::move(touched), result);
    }
    c.hash_phase_nanos = nanos_since(hash_start);

    result.new_root = tree.root();
    result.counters = c;
    return result;
}

Digest Engine::rehash(SparseMerkleTree& tree, std::span<const LeafIndex> touched) {
    std::vector<std::uint64_t> level;
    level.reserve(touched.size());
    for (LeafIndex k : touched) {
        tree.check_index(k);
        level.push_back(k.node(tree.depth()).value);
    }
    level.resize(count_distinct(level));
    BatchResult scratch;
    if (!level.empty()) hash_levels(tree, std::move(level), scratch);
    return tree.root();
}

namespace {

struct Subtree {
    Digest digest;
    std::uint64_t visits = 0;
    std::uint64_t hashes = 0;
};

struct Descent {
    SparseMerkleTree& tree;
    const std::unordered_set<std::uint64_t>& stale;
    bool parallel;

    Subtree visit(NodeIndex node) const {
        Subtree r;
        r.visits = 1;
        if (node.level() == tree.depth() || !stale.contains(node.value)) {
            r.digest = tree.resolve(node);
            return r;
        }
        Subtree left, right;
        if (parallel && stale.contains(node.left().value) && stale.contains(node.right().value)) {
            tbb::parallel_invoke([&] { left = visit(node.left()); },
                                 [&] { right = visit(node.right()); });
        } else {
            left = visit(node.left());
            right = visit(node.right());
        }
        r.digest = tree.scheme().hash_node(left.digest, right.digest);
        *tree.find_node(node) = r.digest;
        r.visits += left.visits + right.visits;
        r.hashes = 1 + left.hashes + right.hashes;
        return r;
    }
};

}  // namespace

BatchResult Engine::two_phase_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops) {
    BatchResult result;
    result.engine = EngineKind::TwoPhase;
    CounterSet& c = tree.counters();
    c.reset();

    const unsigned depth = tree.depth();
    std::unordered_set<std::uint64_t> stale;
    std::vector<std::uint64_t> hashed;
    hashed.reserve(ops.size());

    // Phase 1: walk root to leaf for every operation, marking the path.
    const auto leaf_start = Clock::now();
    tree.begin_journal();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const LeafOperation& op = ops[i];
        try {
            tree.check_index(op.index);
            const bool present = tree.contains(op.index);
            if (op.kind == OpKind::Insert && present)
                throw DuplicateLeafError("leaf " + std::to_string(op.index.value) + " already exists");
            if (op.kind != OpKind::Insert && !present)
                throw MissingLeafError("leaf " + std::to_string(op.index.value) + " does not exist");
        } catch (const Error& e) {
            tree.rollback_journal();
            c.reset();
            throw BatchOpError(i, std::current_exception(), describe(i, op, e));
        }

        const NodeIndex leaf = op.index.node(depth);
        stale.insert(1);
        tree.materialize(NodeIndex{1});
        for (unsigned level = 1; level < depth; ++level) {
            const NodeIndex node{leaf.value >> (depth - level)};
            stale.insert(node.value);
            tree.materialize(node);
            ++c.leaf_phase_visits;
        }
        stale.insert(leaf.value);
        if (op.kind == OpKind::Remove) {
            tree.erase_leaf(op.index);
        } else {
            tree.write_leaf(op.index, op.value);
            hashed.push_back(op.index.value);
        }
        ++c.leaf_phase_visits;
    }
    tree.commit_journal();
    c.hash_invocations += count_distinct(hashed);
    c.leaf_phase_nanos = nanos_since(leaf_start);

    // Phase 2: recursive rehash of the stale region.
    const auto hash_start = Clock::now();
    if (!ops.empty()) {
        const Descent descent{tree, stale, executor_ != nullptr};
        Subtree root;
        if (executor_)
            executor_->run([&] { root = descent.visit(NodeIndex{1}); });
        else
            root = descent.visit(NodeIndex{1});
        c.hash_phase_visits += root.visits;
        c.hash_invocations += root.hashes;

        std::vector<std::uint64_t> internal;
        internal.reserve(stale.size());
        std::uint64_t level_mask = 0;
        for (std::uint64_t idx : stale) {
            const NodeIndex node{idx};
            if (node.level() < depth) {
                internal.push_back(idx);
                level_mask |= std::uint64_t{1} << node.level();
            }
        }
        c.levels_processed = static_cast<std::uint64_t>(std::popcount(level_mask));

        // Children have larger indices, so descending order settles them first.
        std::sort(internal.begin(), internal.end(), std::greater<>());
        for (std::uint64_t idx : internal) {
            const NodeIndex node{idx};
            if (!tree.find_node(node.left()) && !tree.find_node(node.right())) tree.erase_node(node);
        }
    }
    c.hash_phase_nanos = nanos_since(hash_start);

    result.new_root = tree.root();
    result.counters = c;
    return result;
}

BatchResult batch_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops,
                         const EngineConfig& config) {
    return Engine(config).batch_update(tree, ops);
}

BatchResult two_phase_update(SparseMerkleTree& tree, std::span<const LeafOperation> ops,
                             const EngineConfig& config) {
    return Engine(config).two_phase_update(tree, ops);
}

Digest commit(SparseMerkleTree& tree, const std::map<LeafIndex, Bytes>& entries) {
    std::vector<LeafOperation> ops;
    ops.reserve(entries.size());
    for (const auto& [k, value] : entries) {
        tree.check_index(k);
        ops.push_back(tree.contains(k) ? LeafOperation::update(k, value) : LeafOperation::insert(k, value));
    }
    return batch_update(tree, ops).new_root;
}

Digest apply_op(SparseMerkleTree& tree, const LeafOperation& op) {
    try {
        return batch_update(tree, {&op, 1}).new_root;
    } catch (const BatchOpError& e) {
        std::rethrow_exception(e.cause());
    }
}

}  // namespace smt
