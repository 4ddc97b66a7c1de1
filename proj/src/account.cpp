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

#include "smt/account.hpp"

#include <algorithm>

namespace smt {

namespace {

constexpr std::size_t kHeaderSize = 8 + 20 + 2;
constexpr std::size_t kEntrySize = 2 + 16;

template <typename T>
void put_le(Bytes& out, T v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p, std::size_t width) {
    T v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::string amount_to_string(Amount a) {
    if (a == 0) return "0";
    std::string s;
    while (a) {
        s.push_back(static_cast<char>('0' + static_cast<int>(a % 10)));
        a /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

Amount parse_amount(std::string_view decimal) {
    if (decimal.empty()) throw DecodeError("empty amount");
    constexpr Amount kMax = ~Amount{0};
    Amount v = 0;
    for (char ch : decimal) {
        if (ch < '0' || ch > '9') throw DecodeError("amount must be decimal digits: '" + std::string(decimal) + "'");
        const unsigned digit = static_cast<unsigned>(ch - '0');
        if (v > (kMax - digit) / 10) throw DecodeError("amount overflows 128 bits");
        v = v * 10 + digit;
    }
    return v;
}

Bytes encode_account(const Account& a) {
    Bytes out;
    out.reserve(kHeaderSize + kEntrySize * a.balances.size());
    put_le(out, a.nonce, 8);
    out.insert(out.end(), a.pubkey_hash.begin(), a.pubkey_hash.end());
    put_le(out, static_cast<std::uint16_t>(a.balances.size()), 2);
    for (const auto& [token, amount] : a.balances) {
        put_le(out, token, 2);
        put_le(out, amount, 16);
    }
    return out;
}

Account decode_account(ByteView bytes, LeafIndex account_id) {
    if (bytes.size() < kHeaderSize)
        throw DecodeError("account encoding truncated: " + std::to_string(bytes.size()) + " bytes");
    Account a;
    a.account_id = account_id;
    const std::uint8_t* p = bytes.data();
    a.nonce = get_le<std::uint64_t>(p, 8);
    std::copy(p + 8, p + 28, a.pubkey_hash.begin());
    const std::size_t count = get_le<std::uint16_t>(p + 28, 2);
    if (bytes.size() != kHeaderSize + count * kEntrySize)
        throw DecodeError("account encoding length " + std::to_string(bytes.size()) +
                          " does not match " + std::to_string(count) + " balances");
    p += kHeaderSize;
    for (std::size_t i = 0; i < count; ++i, p += kEntrySize) {
        const auto token = get_le<TokenId>(p, 2);
        const auto amount = get_le<Amount>(p + 2, 16);
        if (amount == 0) throw DecodeError("zero balance entry");
        if (!a.balances.empty() && a.balances.rbegin()->first >= token)
            throw DecodeError("balance tokens not strictly ascending");
        a.balances.emplace(token, amount);
    }
    return a;
}

Account apply_tx_effect(const Account& a, const TxEffect& effect) {
    Account next = a;
    const auto it = next.balances.find(effect.token);
    const Amount have = it != next.balances.end() ? it->second : 0;
    Amount now = 0;
    if (effect.debit) {
        if (effect.amount > have)
            throw WorkloadError("insufficient balance on account " + std::to_string(a.account_id.value) +
                                " token " + std::to_string(effect.token) + ": have " +
                                amount_to_string(have) + ", need " + amount_to_string(effect.amount));
        now = have - effect.amount;
    } else {
        if (effect.amount > ~Amount{0} - have) throw WorkloadError("balance overflow");
        now = have + effect.amount;
    }
    if (now == 0)
        next.balances.erase(effect.token);
    else
        next.balances[effect.token] = now;
    if (effect.bump_nonce) ++next.nonce;
    return next;
}

}  // namespace smt
