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

#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "smt/account.hpp"
#include "smt/hasher.hpp"

using smt::Account;
using smt::Amount;

namespace {

Account random_account(oracle::OpGen& rng) {
    Account a;
    a.account_id = smt::LeafIndex{rng.below(1 << 24)};
    a.nonce = rng.below(4) == 0 ? rng.next() : rng.below(100);
    for (auto& b : a.pubkey_hash) b = static_cast<std::uint8_t>(rng.next());
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
        const Amount amount = (static_cast<Amount>(rng.next()) << 64 | rng.next()) >> rng.below(128);
        if (amount) a.balances[static_cast<smt::TokenId>(rng.next())] = amount;
    }
    return a;
}

}  // namespace

TEST_CASE("fresh account layout") {
    Account a;
    a.pubkey_hash.fill(0xab);
    const auto bytes = smt::encode_account(a);
    REQUIRE(bytes.size() == 30);
    for (std::size_t i = 0; i < 8; ++i) CHECK(bytes[i] == 0);
    for (std::size_t i = 8; i < 28; ++i) CHECK(bytes[i] == 0xab);
    CHECK(bytes[28] == 0);
    CHECK(bytes[29] == 0);
}

TEST_CASE("encoding fields are little-endian") {
    Account a;
    a.nonce = 0x0102030405060708ULL;
    a.balances[0x0201] = (static_cast<Amount>(1) << 64) | 0xff;
    const auto b = smt::encode_account(a);
    REQUIRE(b.size() == 30 + 18);
    CHECK(b[0] == 0x08);
    CHECK(b[7] == 0x01);
    CHECK(b[28] == 1);
    CHECK(b[30] == 0x01);
    CHECK(b[31] == 0x02);
    CHECK(b[32] == 0xff);
    CHECK(b[33] == 0x00);
    CHECK(b[40] == 0x01);
}

TEST_CASE("balance insertion order does not matter") {
    Account a, b;
    a.balances[5] = 1;
    a.balances[2] = 7;
    b.balances[2] = 7;
    b.balances[5] = 1;
    CHECK(smt::encode_account(a) == smt::encode_account(b));
}

TEST_CASE("decode inverts encode on random accounts") {
    oracle::OpGen rng{3};
    std::set<smt::Bytes> seen;
    std::set<std::tuple<std::uint64_t, std::array<std::uint8_t, 20>, std::map<smt::TokenId, Amount>>> distinct;
    for (int i = 0; i < 2000; ++i) {
        const Account a = random_account(rng);
        const auto bytes = smt::encode_account(a);
        CHECK(smt::decode_account(bytes, a.account_id) == a);
        seen.insert(bytes);
        distinct.insert({a.nonce, a.pubkey_hash, a.balances});
    }
    // No two distinct accounts share an encoding.
    CHECK(seen.size() == distinct.size());
}

TEST_CASE("decode rejects malformed input") {
    CHECK_THROWS_AS(smt::decode_account({}), smt::DecodeError);
    Account a;
    a.balances[1] = 5;
    auto bytes = smt::encode_account(a);
    auto junk = bytes;
    junk.push_back(0);
    CHECK_THROWS_AS(smt::decode_account(junk), smt::DecodeError);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(smt::decode_account(truncated), smt::DecodeError);

    auto zero = bytes;
    for (std::size_t i = 32; i < 48; ++i) zero[i] = 0;
    CHECK_THROWS_AS(smt::decode_account(zero), smt::DecodeError);

    Account two;
    two.balances[1] = 1;
    two.balances[2] = 1;
    auto swapped = smt::encode_account(two);
    std::swap(swapped[30], swapped[48]);
    CHECK_THROWS_AS(smt::decode_account(swapped), smt::DecodeError);
}

TEST_CASE("tx effects") {
    Account a;
    const Account credited = smt::apply_tx_effect(a, {0, 100, false, false});
    CHECK(credited.balances == std::map<smt::TokenId, Amount>{{0, 100}});
    CHECK(credited.nonce == 0);

    const Account debited = smt::apply_tx_effect(credited, {0, 100, true, true});
    const Account back = smt::apply_tx_effect(debited, {0, 100, false, false});
    CHECK(back.balances == credited.balances);
    CHECK(debited.balances.empty());
    CHECK(back.nonce == 1);

    CHECK_THROWS_AS(smt::apply_tx_effect(a, {0, 1, true, true}), smt::WorkloadError);
    Account full;
    full.balances[0] = ~Amount{0};
    CHECK_THROWS_AS(smt::apply_tx_effect(full, {0, 1, false, false}), smt::WorkloadError);
}

TEST_CASE("every field change changes the leaf digest") {
    const auto scheme = smt::HashScheme::sha256();
    Account a;
    a.balances[3] = 10;
    const auto base = scheme.hash_leaf(smt::encode_account(a));
    Account b = a;
    b.nonce++;
    CHECK(scheme.hash_leaf(smt::encode_account(b)) != base);
    b = a;
    b.pubkey_hash[19] = 1;
    CHECK(scheme.hash_leaf(smt::encode_account(b)) != base);
    b = a;
    b.balances[3] = 11;
    CHECK(scheme.hash_leaf(smt::encode_account(b)) != base);
    b = a;
    b.balances[4] = 10;
    CHECK(scheme.hash_leaf(smt::encode_account(b)) != base);
}

TEST_CASE("amount text") {
    CHECK(smt::amount_to_string(0) == "0");
    CHECK(smt::amount_to_string(~Amount{0}) == "340282366920938463463374607431768211455");
    CHECK(smt::parse_amount("340282366920938463463374607431768211455") == ~Amount{0});
    CHECK_THROWS_AS(smt::parse_amount("340282366920938463463374607431768211456"), smt::DecodeError);
    CHECK_THROWS_AS(smt::parse_amount(""), smt::DecodeError);
    CHECK_THROWS_AS(smt::parse_amount("-1"), smt::DecodeError);
    CHECK_THROWS_AS(smt::parse_amount("1e5"), smt::DecodeError);
}
