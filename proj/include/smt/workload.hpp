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
/// Operation generators for micro-benchmarks, and the transaction model
/// used to replay block traces as leaf operations.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smt/account.hpp"
#include "smt/tree.hpp"

namespace smt {

/// Seeded generator. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; bounded draws use multiply-shift so generated
/// fixtures are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    Bytes bytes(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// Untimed setup operations followed by the operations under measurement.
struct MicroWorkload {
    std::vector<LeafOperation> setup;
    std::vector<LeafOperation> ops;
};

inline constexpr std::size_t kMicroPayloadSize = 32;

/// k Updates on start..start+k-1 (set up by Inserts). Throws IndexError
/// when start + k exceeds 2^depth.
MicroWorkload gen_sequential_updates(std::size_t k, LeafIndex start, unsigned depth,
                                     std::uint64_t seed);

/// k Updates on indices drawn uniformly from [0, 2^depth), duplicates
/// allowed. Each distinct index gets one setup Insert.
MicroWorkload gen_uniform_updates(std::size_t k, std::uint64_t seed, unsigned depth);

/// k Inserts on start..start+k-1 into an empty tree.
MicroWorkload gen_sequential_inserts(std::size_t k, LeafIndex start, unsigned depth,
                                     std::uint64_t seed);

enum class TxType {
    Transfer,
    TransferToNew,
    Withdraw,
    WithdrawNFT,
    MintNFT,
    ChangePubKey,
    ForcedExit,
    Swap,
    Deposit,
    FullExit,
};

std::string_view tx_type_name(TxType t);
std::optional<TxType> tx_type_from_name(std::string_view name);

/// Deposit and FullExit are priority transactions.
constexpr bool is_priority(TxType t) { return t == TxType::Deposit || t == TxType::FullExit; }

/// Field roles per type: `from` is the sender / owner / creator / initiator,
/// `to` the receiver / creator (WithdrawNFT) / exit target.
struct TxRecord {
    TxType type = TxType::Transfer;
    std::optional<LeafIndex> from;
    std::optional<LeafIndex> to;
    TokenId token = 0;
    Amount amount = 0;

    bool is_priority() const { return smt::is_priority(type); }
    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

struct BlockTrace {
    std::uint64_t block_number = 0;
    std::vector<TxRecord> txs;

    friend bool operator==(const BlockTrace&, const BlockTrace&) = default;
};

/// Whether `from` / `to` must be present for a record of this type.
bool tx_needs_from(TxType t);
bool tx_needs_to(TxType t);

using LeafExistence = std::function<bool(LeafIndex)>;

struct LeafOpPlan {
    OpKind kind;
    LeafIndex index;
    friend bool operator==(const LeafOpPlan&, const LeafOpPlan&) = default;
};

/// Leaf operations a transaction decomposes into (one or two). Throws
/// WorkloadError when a referenced account is missing, or already present
/// for TransferToNew.
std::vector<LeafOpPlan> tx_to_leaf_ops(const TxRecord& tx, const LeafExistence& exists);

/// k Transfers from hot_index to k distinct counterparties
/// first_counterparty, first_counterparty + 1, ...
BlockTrace gen_hot_account_trace(std::size_t k, LeafIndex hot_index, LeafIndex first_counterparty,
                                 std::uint64_t block_number = 0, Amount amount = 100);

enum class TraceFilter { All, TransferSwap };

std::string_view trace_filter_name(TraceFilter f);
TraceFilter trace_filter_from_name(std::string_view name);

/// Applies the filter and drops blocks left empty.
std::vector<BlockTrace> filter_traces(std::span<const BlockTrace> traces, TraceFilter filter);

/// Account state replayed alongside a tree. Produces the payload-carrying
/// leaf operations for each transaction.
class Ledger {
public:
    /// Accounts that must exist before the trace starts, each funded with
    /// the total it debits per token over the trace.
    static std::map<LeafIndex, Account> required_genesis(std::span<const BlockTrace> traces);

    explicit Ledger(std::map<LeafIndex, Account> accounts = {});

    bool exists(LeafIndex k) const { return accounts_.contains(k); }
    const Account* find(LeafIndex k) const;
    const std::map<LeafIndex, Account>& accounts() const { return accounts_; }

    /// Applies tx to the account state and returns its leaf operations.
    /// Throws WorkloadError on an infeasible transaction; state is then
    /// unchanged.
    std::vector<LeafOperation> execute(const TxRecord& tx);

    std::vector<LeafOperation> execute_block(const BlockTrace& block);

    /// Insert operations that create every current account.
    std::vector<LeafOperation> genesis_ops() const;

private:
    std::map<LeafIndex, Account> accounts_;
};

/// Deterministic 20-byte key hash for an account at a given nonce.
std::array<std::uint8_t, 20> derive_pubkey_hash(LeafIndex id, std::uint64_t nonce);

// Trace files: {"blocks":[{"block_number":n,"txs":[{"type":..,"from":..,
// "to":..,"token":..,"amount":"decimal"}]}]}

/// Throws ParseError (with the offending line) on malformed input.
std::vector<BlockTrace> parse_block_trace_text(std::string_view text);

/// Throws IoError when the file cannot be read, ParseError otherwise.
std::vector<BlockTrace> parse_block_trace(const std::string& path);

/// One transaction per line, keys in fixed order.
std::string serialize_block_trace(std::span<const BlockTrace> traces);

struct SyntheticTraceParams {
    std::size_t blocks = 100;
    std::uint64_t first_block = 299246;
    std::size_t min_txs = 74;
    std::size_t max_txs = 133;
    /// Per-type counts; the total fixes the trace length.
    std::map<TxType, std::size_t> mix = {
        {TxType::Swap, 3971},         {TxType::Transfer, 1897}, {TxType::MintNFT, 1428},
        {TxType::ChangePubKey, 766},  {TxType::Deposit, 266},   {TxType::Withdraw, 47},
        {TxType::WithdrawNFT, 1},
    };
    /// Average transactions per account; sets the account pool size.
    double tx_per_account = 2.5;
    /// Block (by position) in which one account sends hot_txs transactions.
    std::size_t hot_block = 27;
    std::size_t hot_block_size = 92;
    std::size_t hot_txs = 48;
    unsigned depth = 24;
    std::uint64_t seed = 299246;
};

/// Shape-matched synthetic block trace. Priority transactions are placed at
/// the end of their block.
std::vector<BlockTrace> gen_synthetic_trace(const SyntheticTraceParams& params);

/// `blocks` blocks of gen_hot_account_trace with disjoint counterparties.
std::vector<BlockTrace> gen_hot_fixture(std::size_t blocks, std::size_t k, LeafIndex hot_index,
                                        std::uint64_t first_block = 1);

/// Transfers where every transaction touches two accounts used nowhere else.
std::vector<BlockTrace> gen_dispersed_fixture(std::size_t blocks, std::size_t txs_per_block,
                                              unsigned depth, std::uint64_t seed,
                                              std::uint64_t first_block = 1);

}  // namespace smt
