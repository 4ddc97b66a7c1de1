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

#include "smt/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

#include "smt/sha256.hpp"

namespace smt {

std::uint64_t Rng::below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64);
}

Bytes Rng::bytes(std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; i += 8) {
        const std::uint64_t word = engine_();
        for (std::size_t j = 0; j < 8 && i + j < n; ++j) out[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
    return out;
}

namespace {

void check_range(std::size_t k, LeafIndex start, unsigned depth) {
    if (depth < 1 || depth > SparseMerkleTree::kMaxDepth) throw ConfigError("invalid depth");
    const std::uint64_t capacity = std::uint64_t{1} << depth;
    if (start.value > capacity || k > capacity - start.value)
        throw IndexError("range [" + std::to_string(start.value) + ", " + std::to_string(start.value) +
                         " + " + std::to_string(k) + ") exceeds capacity 2^" + std::to_string(depth));
}

}  // namespace

MicroWorkload gen_sequential_updates(std::size_t k, LeafIndex start, unsigned depth,
                                     std::uint64_t seed) {
    check_range(k, start, depth);
    Rng rng(seed);
    MicroWorkload w;
    w.setup.reserve(k);
    w.ops.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        w.setup.push_back(LeafOperation::insert(LeafIndex{start.value + i}, rng.bytes(kMicroPayloadSize)));
    for (std::size_t i = 0; i < k; ++i)
        w.ops.push_back(LeafOperation::update(LeafIndex{start.value + i}, rng.bytes(kMicroPayloadSize)));
    return w;
}

MicroWorkload gen_uniform_updates(std::size_t k, std::uint64_t seed, unsigned depth) {
    check_range(0, LeafIndex{0}, depth);
    Rng rng(seed);
    const std::uint64_t capacity = std::uint64_t{1} << depth;
    std::vector<LeafIndex> indices(k);
    for (auto& idx : indices) idx = LeafIndex{rng.below(capacity)};

    MicroWorkload w;
    std::unordered_set<std::uint64_t> seen;
    for (LeafIndex idx : indices)
        if (seen.insert(idx.value).second)
            w.setup.push_back(LeafOperation::insert(idx, rng.bytes(kMicroPayloadSize)));
    w.ops.reserve(k);
    for (LeafIndex idx : indices) w.ops.push_back(LeafOperation::update(idx, rng.bytes(kMicroPayloadSize)));
    return w;
}

MicroWorkload gen_sequential_inserts(std::size_t k, LeafIndex start, unsigned depth,
                                     std::uint64_t seed) {
    check_range(k, start, depth);
    Rng rng(seed);
    MicroWorkload w;
    w.ops.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        w.ops.push_back(LeafOperation::insert(LeafIndex{start.value + i}, rng.bytes(kMicroPayloadSize)));
    return w;
}

namespace {

constexpr std::pair<TxType, std::string_view> kTxNames[] = {
    {TxType::Transfer, "Transfer"},         {TxType::TransferToNew, "TransferToNew"},
    {TxType::Withdraw, "Withdraw"},         {TxType::WithdrawNFT, "WithdrawNFT"},
    {TxType::MintNFT, "MintNFT"},           {TxType::ChangePubKey, "ChangePubKey"},
    {TxType::ForcedExit, "ForcedExit"},     {TxType::Swap, "Swap"},
    {TxType::Deposit, "Deposit"},           {TxType::FullExit, "FullExit"},
};

}  // namespace

std::string_view tx_type_name(TxType t) {
    for (const auto& [type, name] : kTxNames)
        if (type == t) return name;
    return "?";
}

std::optional<TxType> tx_type_from_name(std::string_view name) {
    for (const auto& [type, n] : kTxNames)
        if (n == name) return type;
    return std::nullopt;
}

bool tx_needs_from(TxType t) { return t != TxType::Deposit; }

bool tx_needs_to(TxType t) {
    return t != TxType::Withdraw && t != TxType::ChangePubKey;
}

std::vector<LeafOpPlan> tx_to_leaf_ops(const TxRecord& tx, const LeafExistence& exists) {
    const auto require = [&](const std::optional<LeafIndex>& k, std::string_view role) {
        if (!k)
            throw WorkloadError(std::string(tx_type_name(tx.type)) + " is missing its '" +
                                std::string(role) + "' account");
        if (!exists(*k))
            throw WorkloadError(std::string(tx_type_name(tx.type)) + ": unresolved account " +
                                std::to_string(k->value) + " ('" + std::string(role) + "')");
        return *k;
    };

    switch (tx.type) {
        case TxType::Transfer:
        case TxType::Swap:
        case TxType::WithdrawNFT:
            return {{OpKind::Update, require(tx.from, "from")}, {OpKind::Update, require(tx.to, "to")}};
        case TxType::MintNFT:
            // Receiver first, then creator.
            return {{OpKind::Update, require(tx.to, "to")}, {OpKind::Update, require(tx.from, "from")}};
        case TxType::TransferToNew: {
            const LeafIndex from = require(tx.from, "from");
            if (!tx.to) throw WorkloadError("TransferToNew is missing its 'to' account");
            if (exists(*tx.to))
                throw WorkloadError("TransferToNew target " + std::to_string(tx.to->value) + " already exists");
            return {{OpKind::Update, from}, {OpKind::Insert, *tx.to}};
        }
        case TxType::Withdraw:
        case TxType::ChangePubKey:
            return {{OpKind::Update, require(tx.from, "from")}};
        case TxType::ForcedExit:
        case TxType::FullExit:
            return {{OpKind::Update, require(tx.from, "from")}, {OpKind::Remove, require(tx.to, "to")}};
        case TxType::Deposit:
            if (!tx.to) throw WorkloadError("Deposit is missing its 'to' account");
            return {{exists(*tx.to) ? OpKind::Update : OpKind::Insert, *tx.to}};
    }
    throw WorkloadError("unknown transaction type");
}

BlockTrace gen_hot_account_trace(std::size_t k, LeafIndex hot_index, LeafIndex first_counterparty,
                                 std::uint64_t block_number, Amount amount) {
    BlockTrace block{block_number, {}};
    block.txs.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        TxRecord tx;
        tx.type = TxType::Transfer;
        tx.from = hot_index;
        tx.to = LeafIndex{first_counterparty.value + i};
        tx.token = 0;
        tx.amount = amount;
        block.txs.push_back(tx);
    }
    return block;
}

std::string_view trace_filter_name(TraceFilter f) {
    return f == TraceFilter::All ? "all" : "transfer-swap";
}

TraceFilter trace_filter_from_name(std::string_view name) {
    if (name == "all") return TraceFilter::All;
    if (name == "transfer-swap") return TraceFilter::TransferSwap;
    throw ConfigError("unknown trace filter '" + std::string(name) + "'");
}

std::vector<BlockTrace> filter_traces(std::span<const BlockTrace> traces, TraceFilter filter) {
    std::vector<BlockTrace> out;
    for (const BlockTrace& block : traces) {
        BlockTrace kept{block.block_number, {}};
        for (const TxRecord& tx : block.txs) {
            const bool keep = filter == TraceFilter::All || tx.type == TxType::Transfer ||
                              tx.type == TxType::TransferToNew || tx.type == TxType::Swap;
            if (keep) kept.txs.push_back(tx);
        }
        if (!kept.txs.empty()) out.push_back(std::move(kept));
    }
    return out;
}

std::array<std::uint8_t, 20> derive_pubkey_hash(LeafIndex id, std::uint64_t nonce) {
    std::uint8_t preimage[4 + 16] = {'p', 'k', 'h', ':'};
    for (int i = 0; i < 8; ++i) {
        preimage[4 + i] = static_cast<std::uint8_t>(id.value >> (8 * i));
        preimage[12 + i] = static_cast<std::uint8_t>(nonce >> (8 * i));
    }
    const auto digest = sha256::hash(sha256::Kernel::Scalar, preimage);
    std::array<std::uint8_t, 20> out;
    std::copy_n(digest.begin(), 20, out.begin());
    return out;
}

namespace {

bool debits_sender(TxType t) {
    return t == TxType::Transfer || t == TxType::TransferToNew || t == TxType::Swap ||
           t == TxType::Withdraw || t == TxType::WithdrawNFT;
}

Account fresh_account(LeafIndex id) {
    Account a;
    a.account_id = id;
    a.pubkey_hash = derive_pubkey_hash(id, 0);
    return a;
}

}  // namespace

std::map<LeafIndex, Account> Ledger::required_genesis(std::span<const BlockTrace> traces) {
    std::set<LeafIndex> live;
    std::set<LeafIndex> seen;
    std::set<LeafIndex> genesis;
    std::map<LeafIndex, std::map<TokenId, Amount>> debits;

    const auto need = [&](const std::optional<LeafIndex>& k) {
        if (!k || live.contains(*k)) return;
        // Accounts created or removed earlier in the trace cannot be seeded.
        if (seen.contains(*k)) return;
        genesis.insert(*k);
        live.insert(*k);
        seen.insert(*k);
    };
    const auto create = [&](const std::optional<LeafIndex>& k) {
        if (!k) return;
        live.insert(*k);
        seen.insert(*k);
    };

    for (const BlockTrace& block : traces) {
        for (const TxRecord& tx : block.txs) {
            switch (tx.type) {
                case TxType::TransferToNew:
                    need(tx.from);
                    create(tx.to);
                    break;
                case TxType::Deposit:
                    create(tx.to);
                    break;
                case TxType::ForcedExit:
                case TxType::FullExit:
                    need(tx.from);
                    need(tx.to);
                    if (tx.to) live.erase(*tx.to);
                    break;
                default:
                    if (tx_needs_from(tx.type)) need(tx.from);
                    if (tx_needs_to(tx.type)) need(tx.to);
                    break;
            }
            if (debits_sender(tx.type) && tx.from && tx.amount > 0) {
                Amount& total = debits[*tx.from][tx.token];
                total = tx.amount > ~Amount{0} - total ? ~Amount{0} : total + tx.amount;
            }
        }
    }

    std::map<LeafIndex, Account> accounts;
    for (LeafIndex id : genesis) {
        Account a = fresh_account(id);
        if (const auto it = debits.find(id); it != debits.end()) a.balances = it->second;
        accounts.emplace(id, std::move(a));
    }
    return accounts;
}

Ledger::Ledger(std::map<LeafIndex, Account> accounts) : accounts_(std::move(accounts)) {}

const Account* Ledger::find(LeafIndex k) const {
    const auto it = accounts_.find(k);
    return it != accounts_.end() ? &it->second : nullptr;
}

std::vector<LeafOperation> Ledger::execute(const TxRecord& tx) {
    const auto plan = tx_to_leaf_ops(tx, [this](LeafIndex k) { return exists(k); });

    // Stage every change so a failing step leaves the ledger untouched.
    std::map<LeafIndex, std::optional<Account>> staged;
    const auto current = [&](LeafIndex k) -> std::optional<Account>& {
        auto it = staged.find(k);
        if (it == staged.end()) {
            const Account* a = find(k);
            it = staged.emplace(k, a ? std::optional<Account>(*a) : std::nullopt).first;
        }
        return it->second;
    };

    std::vector<LeafOperation> ops;
    for (std::size_t step = 0; step < plan.size(); ++step) {
        const LeafOpPlan& p = plan[step];
        std::optional<Account>& acct = current(p.index);
        if (p.kind == OpKind::Remove) {
            acct.reset();
            ops.push_back(LeafOperation::remove(p.index));
            continue;
        }
        if (!acct) acct = fresh_account(p.index);

        TxEffect effect{tx.token, 0, false, false};
        switch (tx.type) {
            case TxType::Transfer:
            case TxType::TransferToNew:
            case TxType::Swap:
                effect.amount = tx.amount;
                effect.debit = step == 0;
                effect.bump_nonce = step == 0;
                break;
            case TxType::Withdraw:
                effect = {tx.token, tx.amount, true, true};
                break;
            case TxType::WithdrawNFT:
                if (step == 0) effect = {tx.token, tx.amount, true, true};
                break;
            case TxType::MintNFT:
                if (step == 0)
                    effect.amount = tx.amount;
                else
                    effect.bump_nonce = true;
                break;
            case TxType::ChangePubKey:
                acct->pubkey_hash = derive_pubkey_hash(p.index, acct->nonce + 1);
                effect.bump_nonce = true;
                break;
            case TxType::ForcedExit:
            case TxType::FullExit:
                effect.bump_nonce = true;
                break;
            case TxType::Deposit:
                effect.amount = tx.amount;
                break;
        }
        *acct = apply_tx_effect(*acct, effect);
        ops.push_back(p.kind == OpKind::Insert ? LeafOperation::insert(p.index, encode_account(*acct))
                                               : LeafOperation::update(p.index, encode_account(*acct)));
    }

    for (auto& [k, acct] : staged) {
        if (acct)
            accounts_[k] = std::move(*acct);
        else
            accounts_.erase(k);
    }
    return ops;
}

std::vector<LeafOperation> Ledger::execute_block(const BlockTrace& block) {
    std::vector<LeafOperation> ops;
    for (std::size_t i = 0; i < block.txs.size(); ++i) {
        try {
            auto tx_ops = execute(block.txs[i]);
            ops.insert(ops.end(), std::make_move_iterator(tx_ops.begin()),
                       std::make_move_iterator(tx_ops.end()));
        } catch (const WorkloadError& e) {
            throw WorkloadError("block " + std::to_string(block.block_number) + " tx #" +
                                std::to_string(i) + ": " + e.what());
        }
    }
    return ops;
}

std::vector<LeafOperation> Ledger::genesis_ops() const {
    std::vector<LeafOperation> ops;
    ops.reserve(accounts_.size());
    for (const auto& [k, a] : accounts_) ops.push_back(LeafOperation::insert(k, encode_account(a)));
    return ops;
}

namespace {

class AccountPicker {
public:
    AccountPicker(Rng& rng, unsigned depth) : rng_(rng), capacity_(std::uint64_t{1} << depth) {}

    LeafIndex fresh() {
        for (;;) {
            const LeafIndex k{rng_.below(capacity_)};
            if (used_.insert(k.value).second) return k;
        }
    }

private:
    Rng& rng_;
    std::uint64_t capacity_;
    std::unordered_set<std::uint64_t> used_;
};

Amount random_amount(Rng& rng) {
    return static_cast<Amount>(rng.below(1'000'000) + 1) * 1'000'000'000'000ULL;
}

std::vector<std::size_t> block_sizes(const SyntheticTraceParams& p, std::size_t total, Rng& rng) {
    const std::size_t n = p.blocks;
    std::vector<std::size_t> sizes(n, 0);
    std::vector<bool> pinned(n, false);
    const auto pin = [&](std::size_t b, std::size_t size) {
        sizes[b] = size;
        pinned[b] = true;
    };
    if (n >= 3) {
        if (p.hot_block < n) pin(p.hot_block, p.hot_block_size);
        std::size_t b = rng.below(n);
        while (pinned[b]) b = (b + 1) % n;
        pin(b, p.max_txs);
        while (pinned[b]) b = (b + 1) % n;
        pin(b, p.min_txs);
    }

    std::size_t fixed = 0, free_count = 0;
    for (std::size_t b = 0; b < n; ++b) {
        if (pinned[b])
            fixed += sizes[b];
        else
            ++free_count;
    }
    if (fixed > total || (free_count == 0 && fixed != total))
        throw ConfigError("synthetic trace: block size constraints cannot reach the transaction total");
    if (free_count) {
        const std::size_t remaining = total - fixed;
        const std::size_t base = remaining / free_count;
        std::size_t extra = remaining % free_count;
        if (base < p.min_txs || base + (extra ? 1 : 0) > p.max_txs)
            throw ConfigError("synthetic trace: transaction total does not fit the block size bounds");
        for (std::size_t b = 0; b < n; ++b) {
            if (pinned[b]) continue;
            sizes[b] = base + (extra ? 1 : 0);
            if (extra) --extra;
        }
        // Jitter: move transactions between free blocks, keeping the bounds.
        std::vector<std::size_t> free_blocks;
        for (std::size_t b = 0; b < n; ++b)
            if (!pinned[b]) free_blocks.push_back(b);
        for (std::size_t step = 0; step < 4 * free_blocks.size() && free_blocks.size() > 1; ++step) {
            const std::size_t from = free_blocks[rng.below(free_blocks.size())];
            const std::size_t to = free_blocks[rng.below(free_blocks.size())];
            const std::size_t d = rng.below(8);
            if (from == to || sizes[from] < p.min_txs + d || sizes[to] + d > p.max_txs) continue;
            sizes[from] -= d;
            sizes[to] += d;
        }
    }
    return sizes;
}

bool is_transfer_like(TxType t) { return t == TxType::Transfer || t == TxType::Swap; }

}  // namespace

std::vector<BlockTrace> gen_synthetic_trace(const SyntheticTraceParams& p) {
    if (p.blocks == 0) throw ConfigError("synthetic trace needs at least one block");
    if (p.min_txs == 0 || p.min_txs > p.max_txs) throw ConfigError("invalid block size bounds");
    if (p.tx_per_account <= 0) throw ConfigError("tx_per_account must be positive");

    Rng rng(p.seed);
    std::vector<TxType> types;
    for (const auto& [type, count] : p.mix) types.insert(types.end(), count, type);
    const std::size_t total = types.size();
    const auto sizes = block_sizes(p, total, rng);
    rng.shuffle(types);

    // Block start offsets into the flat type list.
    std::vector<std::size_t> offsets(p.blocks + 1, 0);
    for (std::size_t b = 0; b < p.blocks; ++b) offsets[b + 1] = offsets[b] + sizes[b];

    // The hot block needs enough transfer-like slots for its hot sender.
    if (p.hot_block < p.blocks) {
        const std::size_t lo = offsets[p.hot_block], hi = offsets[p.hot_block + 1];
        if (p.hot_txs > hi - lo) throw ConfigError("hot_txs exceeds the hot block size");
        std::size_t have = 0;
        for (std::size_t i = lo; i < hi; ++i) have += is_transfer_like(types[i]);
        for (std::size_t i = lo, j = 0; i < hi && have < p.hot_txs; ++i) {
            if (is_transfer_like(types[i]) || types[i] == TxType::WithdrawNFT) continue;
            while (j < total && ((j >= lo && j < hi) || !is_transfer_like(types[j]))) ++j;
            if (j == total) break;
            std::swap(types[i], types[j]);
            ++have;
        }
    }

    // An NFT must be minted before it can be withdrawn.
    const auto first_of = [&](TxType t) {
        return std::find(types.begin(), types.end(), t) - types.begin();
    };
    if (auto w = first_of(TxType::WithdrawNFT), m = first_of(TxType::MintNFT);
        w < static_cast<std::ptrdiff_t>(total) && m > w) {
        if (m == static_cast<std::ptrdiff_t>(total))
            throw ConfigError("WithdrawNFT in the mix requires at least one MintNFT");
        std::swap(types[w], types[m]);
    }

    AccountPicker picker(rng, p.depth);
    const std::size_t pool_size =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(total / p.tx_per_account)));
    std::vector<LeafIndex> pool(pool_size);
    for (auto& k : pool) k = picker.fresh();
    const LeafIndex hot = pool[0];
    // Pool members referenced so far; deposits only top up these, so every
    // account that later spends is seeded by the genesis pass.
    std::vector<LeafIndex> touched;
    std::unordered_set<std::uint64_t> touched_set;
    const auto pick = [&] {
        const LeafIndex k = pool[rng.below(pool.size())];
        if (touched_set.insert(k.value).second) touched.push_back(k);
        return k;
    };
    const auto pick_other = [&](LeafIndex not_this) {
        for (;;) {
            const LeafIndex k = pick();
            if (k != not_this) return k;
        }
    };

    struct Nft {
        TokenId token;
        LeafIndex owner;
        LeafIndex creator;
    };
    std::vector<Nft> nfts;
    TokenId next_nft = 32768;
    constexpr TokenId kFungibleTokens = 6;

    std::vector<BlockTrace> out;
    out.reserve(p.blocks);
    for (std::size_t b = 0; b < p.blocks; ++b) {
        BlockTrace block{p.first_block + b, {}};
        std::size_t hot_left = b == p.hot_block ? p.hot_txs : 0;
        for (std::size_t i = offsets[b]; i < offsets[b + 1]; ++i) {
            TxRecord tx;
            tx.type = types[i];
            switch (tx.type) {
                case TxType::Transfer:
                case TxType::Swap: {
                    const LeafIndex from = hot_left ? hot : pick();
                    if (hot_left && touched_set.insert(hot.value).second) touched.push_back(hot);
                    if (hot_left) --hot_left;
                    tx.from = from;
                    tx.to = pick_other(from);
                    tx.token = static_cast<TokenId>(rng.below(kFungibleTokens));
                    tx.amount = random_amount(rng);
                    break;
                }
                case TxType::MintNFT: {
                    if (next_nft == 0) throw ConfigError("synthetic trace: NFT token ids exhausted");
                    tx.from = pick();
                    tx.to = pick();
                    tx.token = next_nft++;
                    tx.amount = 1;
                    nfts.push_back({tx.token, *tx.to, *tx.from});
                    break;
                }
                case TxType::WithdrawNFT: {
                    const std::size_t n = rng.below(nfts.size());
                    tx.from = nfts[n].owner;
                    tx.to = nfts[n].creator;
                    tx.token = nfts[n].token;
                    tx.amount = 1;
                    nfts.erase(nfts.begin() + static_cast<std::ptrdiff_t>(n));
                    break;
                }
                case TxType::ChangePubKey:
                    tx.from = pick();
                    break;
                case TxType::Withdraw:
                    tx.from = pick();
                    tx.token = static_cast<TokenId>(rng.below(kFungibleTokens));
                    tx.amount = random_amount(rng);
                    break;
                case TxType::Deposit:
                    tx.to = rng.below(2) || touched.empty() ? picker.fresh()
                                                            : touched[rng.below(touched.size())];
                    tx.token = static_cast<TokenId>(rng.below(kFungibleTokens));
                    tx.amount = random_amount(rng);
                    break;
                default:
                    throw ConfigError("synthetic trace does not generate " +
                                      std::string(tx_type_name(tx.type)));
            }
            block.txs.push_back(tx);
        }
        // Priority transactions seal the block, so they come last.
        std::stable_partition(block.txs.begin(), block.txs.end(),
                              [](const TxRecord& tx) { return !tx.is_priority(); });
        out.push_back(std::move(block));
    }
    return out;
}

std::vector<BlockTrace> gen_hot_fixture(std::size_t blocks, std::size_t k, LeafIndex hot_index,
                                        std::uint64_t first_block) {
    std::vector<BlockTrace> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        out.push_back(gen_hot_account_trace(k, hot_index, LeafIndex{hot_index.value + 1 + b * k},
                                            first_block + b));
    return out;
}

std::vector<BlockTrace> gen_dispersed_fixture(std::size_t blocks, std::size_t txs_per_block,
                                              unsigned depth, std::uint64_t seed,
                                              std::uint64_t first_block) {
    Rng rng(seed);
    AccountPicker picker(rng, depth);
    std::vector<BlockTrace> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        BlockTrace block{first_block + b, {}};
        for (std::size_t i = 0; i < txs_per_block; ++i) {
            TxRecord tx;
            tx.type = TxType::Transfer;
            tx.from = picker.fresh();
            tx.to = picker.fresh();
            tx.amount = random_amount(rng);
            block.txs.push_back(tx);
        }
        out.push_back(std::move(block));
    }
    return out;
}

}  // namespace smt
