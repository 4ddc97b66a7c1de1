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

#include <cmath>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "smt/batch.hpp"
#include "smt/workload.hpp"

using smt::LeafIndex;
using smt::LeafOpPlan;
using smt::OpKind;
using smt::TxRecord;
using smt::TxType;

namespace {

TxRecord tx(TxType type, std::optional<std::uint64_t> from, std::optional<std::uint64_t> to,
            smt::Amount amount = 0, smt::TokenId token = 0) {
    TxRecord t;
    t.type = type;
    if (from) t.from = LeafIndex{*from};
    if (to) t.to = LeafIndex{*to};
    t.amount = amount;
    t.token = token;
    return t;
}

const smt::LeafExistence kOneAndTwo = [](LeafIndex k) { return k.value == 1 || k.value == 2; };

std::vector<LeafOpPlan> plan(OpKind a, std::uint64_t i) { return {{a, LeafIndex{i}}}; }
std::vector<LeafOpPlan> plan(OpKind a, std::uint64_t i, OpKind b, std::uint64_t j) {
    return {{a, LeafIndex{i}}, {b, LeafIndex{j}}};
}

}  // namespace

TEST_CASE("sequential generators") {
    const auto w = smt::gen_sequential_updates(3, LeafIndex{0}, 24, 1);
    REQUIRE(w.ops.size() == 3);
    REQUIRE(w.setup.size() == 3);
    for (std::uint64_t i = 0; i < 3; ++i) {
        CHECK(w.ops[i].kind == OpKind::Update);
        CHECK(w.ops[i].index.value == i);
        CHECK(w.ops[i].value.size() == smt::kMicroPayloadSize);
        CHECK(w.setup[i].kind == OpKind::Insert);
        CHECK(w.setup[i].index.value == i);
    }
    CHECK(smt::gen_sequential_updates(3, LeafIndex{0}, 24, 1).ops == w.ops);
    CHECK(smt::gen_sequential_updates(3, LeafIndex{0}, 24, 2).ops != w.ops);
    CHECK(smt::gen_sequential_updates(1000, LeafIndex{0}, 24, 1).ops.size() == 1000);

    CHECK_THROWS_AS(smt::gen_sequential_updates(5, LeafIndex{12}, 4, 1), smt::IndexError);
    CHECK_NOTHROW(smt::gen_sequential_updates(4, LeafIndex{12}, 4, 1));

    const auto ins = smt::gen_sequential_inserts(4, LeafIndex{7}, 8, 1);
    CHECK(ins.setup.empty());
    CHECK(ins.ops.back().index.value == 10);
    CHECK(ins.ops.back().kind == OpKind::Insert);
}

TEST_CASE("uniform generator") {
    CHECK(smt::gen_uniform_updates(0, 42, 24).ops.empty());

    // Derived from an independent mt19937_64 with multiply-shift bounding.
    const std::uint64_t pinned[] = {12669407, 10721167, 12618902, 2286276,
                                    15154338, 1578204,  9639690,  6256017};
    const auto w = smt::gen_uniform_updates(8, 42, 24);
    REQUIRE(w.ops.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(w.ops[i].index.value == pinned[i]);
    CHECK(w.setup.size() == 8);

    // Duplicates get one setup Insert each.
    const auto dup = smt::gen_uniform_updates(100, 1, 3);
    std::set<std::uint64_t> distinct;
    for (const auto& op : dup.ops) distinct.insert(op.index.value);
    CHECK(dup.setup.size() == distinct.size());
    auto tree = smt::SparseMerkleTree::gen(3);
    smt::batch_update(tree, dup.setup);
    CHECK_NOTHROW(smt::batch_update(tree, dup.ops));
}

TEST_CASE("uniform generator frequencies at depth 8") {
    const auto w = smt::gen_uniform_updates(100000, 8, 8);
    std::vector<double> counts(256, 0);
    for (const auto& op : w.ops) counts[op.index.value] += 1;
    const double expect = 100000.0 / 256;
    const double sigma = std::sqrt(100000.0 * (1.0 / 256) * (255.0 / 256));
    double chi2 = 0;
    for (double c : counts) {
        CHECK(std::abs(c - expect) < 5 * sigma);
        chi2 += (c - expect) * (c - expect) / expect;
    }
    // 255 degrees of freedom; 99.9th percentile is about 330.5.
    CHECK(chi2 < 330.5);
}

TEST_CASE("transaction decomposition") {
    using enum OpKind;
    CHECK(smt::tx_to_leaf_ops(tx(TxType::Transfer, 1, 2), kOneAndTwo) == plan(Update, 1, Update, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::Swap, 2, 1), kOneAndTwo) == plan(Update, 2, Update, 1));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::TransferToNew, 1, 5), kOneAndTwo) == plan(Update, 1, Insert, 5));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::Withdraw, 1, {}), kOneAndTwo) == plan(Update, 1));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::WithdrawNFT, 1, 2), kOneAndTwo) == plan(Update, 1, Update, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::MintNFT, 1, 2), kOneAndTwo) == plan(Update, 2, Update, 1));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::ChangePubKey, 2, {}), kOneAndTwo) == plan(Update, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::ForcedExit, 1, 2), kOneAndTwo) == plan(Update, 1, Remove, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::FullExit, 1, 2), kOneAndTwo) == plan(Update, 1, Remove, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::Deposit, {}, 2), kOneAndTwo) == plan(Update, 2));
    CHECK(smt::tx_to_leaf_ops(tx(TxType::Deposit, {}, 9), kOneAndTwo) == plan(Insert, 9));

    CHECK_THROWS_AS(smt::tx_to_leaf_ops(tx(TxType::Transfer, 1, 3), kOneAndTwo), smt::WorkloadError);
    CHECK_THROWS_AS(smt::tx_to_leaf_ops(tx(TxType::TransferToNew, 1, 2), kOneAndTwo), smt::WorkloadError);
    CHECK_THROWS_AS(smt::tx_to_leaf_ops(tx(TxType::Withdraw, {}, 1), kOneAndTwo), smt::WorkloadError);
    CHECK_THROWS_AS(smt::tx_to_leaf_ops(tx(TxType::ForcedExit, 1, 7), kOneAndTwo), smt::WorkloadError);
}

TEST_CASE("type names and priority") {
    for (auto t : {TxType::Transfer, TxType::TransferToNew, TxType::Withdraw, TxType::WithdrawNFT,
                   TxType::MintNFT, TxType::ChangePubKey, TxType::ForcedExit, TxType::Swap,
                   TxType::Deposit, TxType::FullExit}) {
        CHECK(smt::tx_type_from_name(smt::tx_type_name(t)) == t);
        CHECK(smt::is_priority(t) == (t == TxType::Deposit || t == TxType::FullExit));
    }
    CHECK_FALSE(smt::tx_type_from_name("Mint"));
}

TEST_CASE("ledger execution") {
    smt::Ledger ledger(smt::Ledger::required_genesis(std::vector<smt::BlockTrace>{
        {1, {tx(TxType::Transfer, 1, 2, 60), tx(TxType::Transfer, 1, 2, 40)}}}));
    REQUIRE(ledger.exists(LeafIndex{1}));
    REQUIRE(ledger.exists(LeafIndex{2}));
    CHECK(ledger.find(LeafIndex{1})->balances.at(0) == 100);

    auto ops = ledger.execute(tx(TxType::Transfer, 1, 2, 60));
    REQUIRE(ops.size() == 2);
    CHECK(smt::decode_account(ops[0].value).balances.at(0) == 40);
    CHECK(smt::decode_account(ops[0].value).nonce == 1);
    CHECK(smt::decode_account(ops[1].value).balances.at(0) == 60);

    // Infeasible transactions leave the state untouched.
    const auto before = ledger.accounts();
    CHECK_THROWS_AS(ledger.execute(tx(TxType::Transfer, 1, 2, 41)), smt::WorkloadError);
    CHECK(ledger.accounts() == before);

    ops = ledger.execute(tx(TxType::TransferToNew, 2, 9, 10));
    CHECK(ops[1].kind == OpKind::Insert);
    CHECK(ledger.find(LeafIndex{9})->balances.at(0) == 10);

    ops = ledger.execute(tx(TxType::Deposit, {}, 9, 5));
    REQUIRE(ops.size() == 1);
    CHECK(ops[0].kind == OpKind::Update);
    ops = ledger.execute(tx(TxType::Deposit, {}, 10, 5));
    CHECK(ops[0].kind == OpKind::Insert);

    ops = ledger.execute(tx(TxType::ChangePubKey, 2, {}));
    CHECK(ledger.find(LeafIndex{2})->pubkey_hash == smt::derive_pubkey_hash(LeafIndex{2}, 2));

    ops = ledger.execute(tx(TxType::MintNFT, 2, 9, 1, 40000));
    CHECK(ledger.find(LeafIndex{9})->balances.at(40000) == 1);
    ops = ledger.execute(tx(TxType::WithdrawNFT, 9, 2, 1, 40000));
    CHECK_FALSE(ledger.find(LeafIndex{9})->balances.contains(40000));

    ops = ledger.execute(tx(TxType::FullExit, 2, 10));
    CHECK(ops[1].kind == OpKind::Remove);
    CHECK_FALSE(ledger.exists(LeafIndex{10}));
}

TEST_CASE("hot account trace") {
    const auto block = smt::gen_hot_account_trace(48, LeafIndex{7}, LeafIndex{100});
    REQUIRE(block.txs.size() == 48);
    std::set<std::uint64_t> to;
    for (const auto& t : block.txs) {
        CHECK(t.from == LeafIndex{7});
        to.insert(t.to->value);
    }
    CHECK(to.size() == 48);

    for (std::size_t k : {1u, 48u}) {
        const std::vector<smt::BlockTrace> blocks = {smt::gen_hot_account_trace(k, LeafIndex{7}, LeafIndex{100})};
        smt::Ledger ledger(smt::Ledger::required_genesis(blocks));
        CHECK(ledger.find(LeafIndex{7})->balances.at(0) == 100 * k);
        CHECK(ledger.execute_block(blocks[0]).size() == 2 * k);
    }
}

TEST_CASE("synthetic trace shape") {
    const smt::SyntheticTraceParams params;
    const auto blocks = smt::gen_synthetic_trace(params);
    REQUIRE(blocks.size() == 100);
    std::size_t total = 0, lo = SIZE_MAX, hi = 0;
    std::map<TxType, std::size_t> mix;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& txs = blocks[b].txs;
        CHECK(blocks[b].block_number == params.first_block + b);
        total += txs.size();
        lo = std::min(lo, txs.size());
        hi = std::max(hi, txs.size());
        bool seen_priority = false;
        for (const auto& t : txs) {
            ++mix[t.type];
            if (t.is_priority()) seen_priority = true;
            else CHECK_FALSE(seen_priority);
        }
    }
    CHECK(total == 8376);
    CHECK(lo == 74);
    CHECK(hi == 133);
    CHECK(mix == params.mix);

    const auto& hot = blocks[params.hot_block].txs;
    CHECK(hot.size() == 92);
    std::map<std::uint64_t, std::size_t> senders;
    for (const auto& t : hot)
        if (t.from) ++senders[t.from->value];
    std::size_t top = 0;
    for (const auto& [k, n] : senders) top = std::max(top, n);
    CHECK(top == 48);

    CHECK(smt::gen_synthetic_trace(params) == blocks);
}

TEST_CASE("synthetic trace replays through both engines") {
    const auto blocks = smt::gen_synthetic_trace({});
    smt::Ledger ledger(smt::Ledger::required_genesis(blocks));
    auto a = smt::SparseMerkleTree::gen(24);
    smt::batch_update(a, ledger.genesis_ops());
    auto b = a;
    for (const auto& block : blocks) {
        const auto ops = ledger.execute_block(block);
        CHECK(smt::batch_update(a, ops).new_root == smt::two_phase_update(b, ops).new_root);
    }
    CHECK(a.leaf_count() == ledger.accounts().size());
}

TEST_CASE("filters and dispersed fixture") {
    const std::vector<smt::BlockTrace> blocks = {
        {1, {tx(TxType::Deposit, {}, 1, 5), tx(TxType::Transfer, 1, 2, 1)}},
        {2, {tx(TxType::Withdraw, 1, {}, 1)}},
    };
    const auto kept = smt::filter_traces(blocks, smt::TraceFilter::TransferSwap);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].txs.size() == 1);
    CHECK(smt::filter_traces(blocks, smt::TraceFilter::All) == blocks);
    CHECK(smt::trace_filter_from_name("transfer-swap") == smt::TraceFilter::TransferSwap);
    CHECK_THROWS_AS(smt::trace_filter_from_name("swap"), smt::ConfigError);

    const auto dispersed = smt::gen_dispersed_fixture(10, 83, 24, 7);
    std::set<std::uint64_t> accounts;
    std::size_t refs = 0;
    for (const auto& block : dispersed)
        for (const auto& t : block.txs) {
            accounts.insert(t.from->value);
            accounts.insert(t.to->value);
            refs += 2;
        }
    CHECK(accounts.size() == refs);
    CHECK(refs == 10 * 83 * 2);
}
