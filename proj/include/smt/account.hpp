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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "smt/common.hpp"

namespace smt {

using Amount = unsigned __int128;
using TokenId = std::uint16_t;

/// Decimal text of a 128-bit amount.
std::string amount_to_string(Amount a);

/// Throws DecodeError on empty input, non-digits or overflow.
Amount parse_amount(std::string_view decimal);

/// Rollup account stored at leaf `account_id`. Balances never hold zero.
struct Account {
    LeafIndex account_id;
    std::uint64_t nonce = 0;
    std::array<std::uint8_t, 20> pubkey_hash{};
    std::map<TokenId, Amount> balances;

    friend bool operator==(const Account&, const Account&) = default;
};

/// nonce (u64 LE) || pubkey_hash (20) || balance count (u16 LE) ||
/// { token (u16 LE) || amount (u128 LE) } in ascending token order.
///
/// The account id is the leaf position and is not part of the payload.
Bytes encode_account(const Account& a);

/// Inverse of encode_account. Rejects truncated or trailing bytes, a count
/// that disagrees with the length, unsorted tokens and zero balances.
Account decode_account(ByteView bytes, LeafIndex account_id = LeafIndex{0});

/// Balance change for one token, optionally bumping the nonce (sender side).
struct TxEffect {
    TokenId token = 0;
    Amount amount = 0;
    bool debit = false;
    bool bump_nonce = false;
};

/// Throws WorkloadError when a debit exceeds the balance.
Account apply_tx_effect(const Account& a, const TxEffect& effect);

}  // namespace smt
