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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smt {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class DuplicateLeafError : public Error {
public:
    using Error::Error;
};

class MissingLeafError : public Error {
public:
    using Error::Error;
};

class InvalidDigestError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// Raised for infeasible workloads (e.g. a debit exceeding a balance).
class WorkloadError : public Error {
public:
    using Error::Error;
};

/// Raised when a trace file or fixture cannot be parsed. `line()` is 1-based,
/// 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Heap position of a node: root is 1, children of j are 2j and 2j+1.
struct NodeIndex {
    std::uint64_t value = 1;

    constexpr NodeIndex() = default;
    constexpr explicit NodeIndex(std::uint64_t v) : value(v) {}

    constexpr NodeIndex parent() const { return NodeIndex{value >> 1}; }
    constexpr NodeIndex left() const { return NodeIndex{value << 1}; }
    constexpr NodeIndex right() const { return NodeIndex{(value << 1) | 1}; }
    constexpr NodeIndex sibling() const { return NodeIndex{value ^ 1}; }
    constexpr bool is_right() const { return (value & 1) != 0; }
    constexpr unsigned level() const {
        return static_cast<unsigned>(63 - __builtin_clzll(value));
    }

    friend constexpr auto operator<=>(NodeIndex, NodeIndex) = default;
};

/// Position of a leaf in [0, 2^depth).
struct LeafIndex {
    std::uint64_t value = 0;

    constexpr LeafIndex() = default;
    constexpr explicit LeafIndex(std::uint64_t v) : value(v) {}

    constexpr NodeIndex node(unsigned depth) const {
        return NodeIndex{(std::uint64_t{1} << depth) | value};
    }

    friend constexpr auto operator<=>(LeafIndex, LeafIndex) = default;
};

std::string to_hex(ByteView bytes);

/// Accepts upper or lower case; throws DecodeError on odd length or non-hex.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace smt
