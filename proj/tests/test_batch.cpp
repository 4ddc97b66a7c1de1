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

#include <thread>

#include "doctest.h"
#include "oracle.hpp"
#include "smt/batch.hpp"

using smt::BatchResult;
using smt::EngineConfig;
using smt::LeafIndex;
using smt::LeafOperation;
using smt::SparseMerkleTree;

namespace {

smt::Bytes val(std::string_view s) { return smt::Bytes(s.begin(), s.end()); }

std::vector<LeafOperation> updates(std::initializer_list<std::uint64_t> keys, std::string_view tag) {
    std::vector<LeafOperation> ops;
    for (auto k : keys) ops.push_back(LeafOperation::update(LeafIndex{k}, val(std::string(tag) + std::to_string(k))));
    return ops;
}

}  // namespace

TEST_CASE("level work lists for three updates on a depth-2 tree") {
    auto tree = SparseMerkleTree::gen(2);
    smt::commit(tree, {{LeafIndex{0}, val("a")}, {LeafIndex{1}, val("b")}, {LeafIndex{3}, val("c")}});
    oracle::NaiveTree model(2);
    for (auto k : {0, 1, 3}) model.apply(LeafOperation::insert(LeafIndex{std::uint64_t(k)}, val("-")));

    const auto ops = updates({0, 3, 1}, "v");
    for (const auto& op : ops) model.apply(op);

    smt::Engine engine(EngineConfig{1, true});
    auto copy = tree;
    const BatchResult r = engine.batch_update(tree, ops);
    const std::vector<std::vector<std::uint64_t>> want = {{4, 5, 7}, {2, 3}, {1}};
    CHECK(r.schedule == want);
    CHECK(r.new_root.bytes == model.root());
    CHECK(r.counters.hash_invocations == 6);
    CHECK(r.counters.leaf_phase_visits == 3);
    CHECK(r.counters.levels_processed == 2);

    const BatchResult b = engine.two_phase_update(copy, ops);
    CHECK(b.new_root == r.new_root);
    CHECK(b.counters.hash_invocations == 6);
    CHECK(b.counters.leaf_phase_visits == 6);
    CHECK(b.counters.levels_processed == 2);
}

TEST_CASE("empty batch") {
    auto tree = SparseMerkleTree::gen(8);
    smt::commit(tree, {{LeafIndex{5}, val("x")}});
    const auto root = tree.root();
    for (auto engine : {smt::EngineKind::Obu, smt::EngineKind::TwoPhase}) {
        smt::Engine e;
        const BatchResult r = e.run(engine, tree, {});
        CHECK(r.new_root == root);
        CHECK(r.counters.same_work(smt::CounterSet{}));
        CHECK(r.engine == engine);
    }
}

TEST_CASE("engines agree with the oracle on random batches") {
    oracle::OpGen rng{2024};
    for (int round = 0; round < 200; ++round) {
        const unsigned depth = 1 + static_cast<unsigned>(rng.below(8));
        oracle::NaiveTree model(depth);
        auto tree = SparseMerkleTree::gen(depth);
        smt::batch_update(tree, rng.valid_ops(model, depth, rng.below(20)));
        auto other = tree;

        const auto ops = rng.valid_ops(model, depth, rng.below(40));
        const auto a = smt::batch_update(tree, ops);
        const auto b = smt::two_phase_update(other, ops);
        CAPTURE(round);
        CHECK(a.new_root.bytes == model.root());
        CHECK(b.new_root == a.new_root);
        CHECK(a.counters.hash_invocations == b.counters.hash_invocations);
        CHECK(tree.cache() == other.cache());
        CHECK(tree.leaf_values() == other.leaf_values());
        CHECK_FALSE(smt::check_consistency(tree));
        CHECK_FALSE(smt::check_consistency(other));
        if (!ops.empty()) CHECK(a.counters.levels_processed == depth);
    }
}

TEST_CASE("traversal counts for distinct updates at depth 24") {
    auto tree = SparseMerkleTree::gen(24);
    std::map<LeafIndex, smt::Bytes> entries;
    for (std::uint64_t k = 0; k < 16; ++k) entries[LeafIndex{k * 1000}] = val("s");
    smt::commit(tree, entries);
    std::vector<LeafOperation> ops;
    for (const auto& [k, v] : entries) ops.push_back(LeafOperation::update(k, val("t")));

    auto copy = tree;
    const auto a = smt::batch_update(tree, ops);
    const auto b = smt::two_phase_update(copy, ops);
    CHECK(a.counters.leaf_phase_visits == 16);
    CHECK(b.counters.leaf_phase_visits == 16 * 24);
    CHECK(a.counters.node_visits() < b.counters.node_visits());
    CHECK(a.counters.hash_invocations == b.counters.hash_invocations);
    CHECK(a.counters.hash_invocations == 16 + oracle::ancestor_union(ops, 24).size());
}

TEST_CASE("repeated writes to one leaf") {
    auto tree = SparseMerkleTree::gen(10);
    std::vector<LeafOperation> ops = {LeafOperation::insert(LeafIndex{9}, val("a")),
                                      LeafOperation::update(LeafIndex{9}, val("b")),
                                      LeafOperation::update(LeafIndex{9}, val("c"))};
    auto copy = tree;
    const auto a = smt::batch_update(tree, ops);
    const auto b = smt::two_phase_update(copy, ops);
    CHECK(*tree.find_value(LeafIndex{9}) == val("c"));
    CHECK(a.counters.hash_invocations == 1 + 10);
    CHECK(b.counters.hash_invocations == 1 + 10);
    CHECK(a.counters.leaf_phase_visits == 10 + 1 + 1);
    CHECK(b.counters.leaf_phase_visits == 3 * 10);
    CHECK(a.new_root == b.new_root);

    // Insert, then remove in the same batch, leaves nothing behind.
    auto t = SparseMerkleTree::gen(10);
    const std::vector<LeafOperation> churn = {LeafOperation::insert(LeafIndex{3}, val("a")),
                                              LeafOperation::remove(LeafIndex{3})};
    CHECK(smt::batch_update(t, churn).new_root == SparseMerkleTree::gen(10).root());
    CHECK(t.cache().empty());
}

TEST_CASE("a failing op rolls the whole batch back") {
    oracle::OpGen rng{9};
    for (auto engine : {smt::EngineKind::Obu, smt::EngineKind::TwoPhase}) {
        oracle::NaiveTree model(6);
        auto tree = SparseMerkleTree::gen(6);
        smt::batch_update(tree, rng.valid_ops(model, 6, 30));
        const auto before_cache = tree.cache();
        const auto before_leaves = tree.leaf_values();
        const auto before_root = tree.root();

        auto ops = rng.valid_ops(model, 6, 10);
        std::uint64_t missing = 0;
        while (model.contains(missing)) ++missing;
        ops.push_back(LeafOperation::update(LeafIndex{missing}, val("x")));

        smt::Engine e;
        try {
            e.run(engine, tree, ops);
            FAIL("expected BatchOpError");
        } catch (const smt::BatchOpError& err) {
            CHECK(err.op_index() == 10);
            CHECK_THROWS_AS(std::rethrow_exception(err.cause()), smt::MissingLeafError);
        }
        CHECK(tree.cache() == before_cache);
        CHECK(tree.leaf_values() == before_leaves);
        CHECK(tree.root() == before_root);

        const std::vector<LeafOperation> dup = {LeafOperation::insert(LeafIndex{63}, val("a")),
                                                LeafOperation::insert(LeafIndex{63}, val("b"))};
        if (!tree.contains(LeafIndex{63})) {
            CHECK_THROWS_AS(e.run(engine, tree, dup), smt::BatchOpError);
            CHECK(tree.root() == before_root);
        }
        const std::vector<LeafOperation> range = {LeafOperation::insert(LeafIndex{64}, val("a"))};
        CHECK_THROWS_AS(e.run(engine, tree, range), smt::BatchOpError);
        CHECK(tree.cache() == before_cache);
    }
}

TEST_CASE("apply_op rethrows the underlying error") {
    auto tree = SparseMerkleTree::gen(4);
    CHECK_THROWS_AS(smt::apply_op(tree, LeafOperation::remove(LeafIndex{1})), smt::MissingLeafError);
}

TEST_CASE("parallelism configuration") {
    CHECK_THROWS_AS(smt::set_parallelism({}, 0u), smt::ConfigError);
    CHECK(smt::set_parallelism({}, 4u).threads == 4);
    CHECK(smt::set_parallelism({}, std::nullopt).threads == std::max(1u, std::thread::hardware_concurrency()));
    CHECK(smt::engine_name(smt::EngineKind::Obu) == "obu");
    CHECK(smt::engine_name(smt::EngineKind::TwoPhase) == "two-phase");
}

TEST_CASE("thread count does not change roots, counters or work lists") {
    oracle::OpGen rng{31};
    for (int round = 0; round < 20; ++round) {
        oracle::NaiveTree model(12);
        auto base = SparseMerkleTree::gen(12);
        smt::batch_update(base, rng.valid_ops(model, 12, 200));
        const auto ops = rng.valid_ops(model, 12, 150);

        std::optional<BatchResult> ref_obu, ref_two;
        for (unsigned threads : {1u, 2u, 4u}) {
            smt::Engine e(EngineConfig{threads, true});
            auto t1 = base, t2 = base;
            const auto a = e.batch_update(t1, ops);
            const auto b = e.two_phase_update(t2, ops);
            CHECK(a.new_root.bytes == model.root());
            CHECK(b.new_root == a.new_root);
            if (!ref_obu) {
                ref_obu = a;
                ref_two = b;
                continue;
            }
            CHECK(a.counters.same_work(ref_obu->counters));
            CHECK(b.counters.same_work(ref_two->counters));
            CHECK(a.schedule == ref_obu->schedule);
        }
    }
}

TEST_CASE("schedule levels are strictly bottom-up") {
    oracle::OpGen rng{4};
    oracle::NaiveTree model(9);
    auto tree = SparseMerkleTree::gen(9);
    smt::Engine e(EngineConfig{1, true});
    const auto r = e.batch_update(tree, rng.valid_ops(model, 9, 60));
    REQUIRE(r.schedule.size() == 10);
    for (std::size_t t = 0; t < r.schedule.size(); ++t) {
        CHECK(std::is_sorted(r.schedule[t].begin(), r.schedule[t].end()));
        for (auto idx : r.schedule[t]) CHECK(smt::NodeIndex{idx}.level() == 9 - t);
    }
}
