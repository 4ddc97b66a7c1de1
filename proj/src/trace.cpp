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

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "smt/workload.hpp"

namespace smt {

namespace {

using Json = nlohmann::ordered_json;

// Character iterator that tracks the current line for the parser callback.
class LineCountingIterator {
public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    LineCountingIterator() = default;
    LineCountingIterator(const char* p, std::size_t* line) : p_(p), line_(line) {}

    reference operator*() const { return *p_; }
    LineCountingIterator& operator++() {
        if (*p_ == '\n') ++*line_;
        ++p_;
        return *this;
    }
    LineCountingIterator operator++(int) {
        auto copy = *this;
        ++*this;
        return copy;
    }
    friend bool operator==(const LineCountingIterator& a, const LineCountingIterator& b) {
        return a.p_ == b.p_;
    }

private:
    const char* p_ = nullptr;
    std::size_t* line_ = nullptr;
};

std::size_t line_at(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Walks the document, mapping each object back to the line it starts on.
class Reader {
public:
    explicit Reader(std::vector<std::size_t> object_lines) : lines_(std::move(object_lines)) {}

    std::vector<BlockTrace> read(const Json& root) {
        const std::size_t root_line = enter(root);
        if (!root.is_object()) throw ParseError("document must be an object", 1);
        check_keys(root, {"blocks"}, root_line);
        const auto it = root.find("blocks");
        if (it == root.end() || !it->is_array())
            throw ParseError("missing 'blocks' array", root_line);
        if (it->empty()) throw ParseError("trace contains no blocks", root_line);

        std::vector<BlockTrace> out;
        out.reserve(it->size());
        for (const Json& block : *it) out.push_back(read_block(block, root_line));
        return out;
    }

private:
    std::size_t enter(const Json& j) {
        if (!j.is_object()) return lines_.empty() ? 0 : lines_.front();
        const std::size_t line = next_ < lines_.size() ? lines_[next_] : 0;
        ++next_;
        return line;
    }

    // Skips nested objects under keys that are rejected anyway.
    void skip(const Json& j) {
        if (j.is_object()) ++next_;
        if (j.is_structured())
            for (const Json& child : j) skip(child);
    }

    static void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                           std::size_t line) {
        for (const auto& [key, value] : obj.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw ParseError("unknown key '" + key + "'", line);
    }

    static std::uint64_t read_uint(const Json& obj, const char* key, std::size_t line) {
        const Json& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ParseError(std::string("'") + key + "' must be a non-negative integer", line);
        return v.get<std::uint64_t>();
    }

    BlockTrace read_block(const Json& block, std::size_t parent_line) {
        if (!block.is_object()) throw ParseError("block must be an object", parent_line);
        const std::size_t line = enter(block);
        check_keys(block, {"block_number", "txs"}, line);
        if (!block.contains("block_number")) throw ParseError("block is missing 'block_number'", line);
        BlockTrace out;
        out.block_number = read_uint(block, "block_number", line);
        const auto it = block.find("txs");
        if (it == block.end() || !it->is_array()) throw ParseError("block is missing 'txs' array", line);
        if (it->empty())
            throw ParseError("block " + std::to_string(out.block_number) + " has no transactions", line);
        out.txs.reserve(it->size());
        for (const Json& tx : *it) out.txs.push_back(read_tx(tx, line));
        return out;
    }

    TxRecord read_tx(const Json& tx, std::size_t parent_line) {
        if (!tx.is_object()) throw ParseError("transaction must be an object", parent_line);
        const std::size_t line = enter(tx);
        for (const auto& [key, value] : tx.items()) skip(value);
        check_keys(tx, {"type", "from", "to", "token", "amount"}, line);

        TxRecord out;
        const auto type = tx.find("type");
        if (type == tx.end() || !type->is_string()) throw ParseError("transaction is missing 'type'", line);
        const auto parsed = tx_type_from_name(type->get<std::string>());
        if (!parsed) throw ParseError("unknown transaction type '" + type->get<std::string>() + "'", line);
        out.type = *parsed;

        if (tx.contains("from")) out.from = LeafIndex{read_uint(tx, "from", line)};
        if (tx.contains("to")) out.to = LeafIndex{read_uint(tx, "to", line)};
        if (tx_needs_from(out.type) && !out.from)
            throw ParseError(std::string(tx_type_name(out.type)) + " requires 'from'", line);
        if (tx_needs_to(out.type) && !out.to)
            throw ParseError(std::string(tx_type_name(out.type)) + " requires 'to'", line);

        if (tx.contains("token")) {
            const std::uint64_t token = read_uint(tx, "token", line);
            if (token > std::numeric_limits<TokenId>::max())
                throw ParseError("token id " + std::to_string(token) + " out of range", line);
            out.token = static_cast<TokenId>(token);
        }
        if (const auto amount = tx.find("amount"); amount != tx.end()) {
            try {
                if (amount->is_string())
                    out.amount = parse_amount(amount->get<std::string>());
                else if (amount->is_number_unsigned())
                    out.amount = amount->get<std::uint64_t>();
                else
                    throw DecodeError("amount must be a decimal string");
            } catch (const DecodeError& e) {
                throw ParseError(e.what(), line);
            }
        }
        return out;
    }

    std::vector<std::size_t> lines_;
    std::size_t next_ = 0;
};

}  // namespace

std::vector<BlockTrace> parse_block_trace_text(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw ParseError("empty trace", 1);

    std::size_t line = 1;
    std::vector<std::size_t> object_lines;
    const Json::parser_callback_t record = [&](int, Json::parse_event_t event, Json&) {
        if (event == Json::parse_event_t::object_start) object_lines.push_back(line);
        return true;
    };

    Json doc;
    try {
        doc = Json::parse(LineCountingIterator(text.data(), &line),
                          LineCountingIterator(text.data() + text.size(), &line), record);
    } catch (const Json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw ParseError(what, line_at(text, at));
    }
    return Reader(std::move(object_lines)).read(doc);
}

std::vector<BlockTrace> parse_block_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trace file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error reading trace file '" + path + "'");
    try {
        return parse_block_trace_text(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line());
    }
}

std::string serialize_block_trace(std::span<const BlockTrace> traces) {
    std::string out = "{\"blocks\":[\n";
    for (std::size_t b = 0; b < traces.size(); ++b) {
        const BlockTrace& block = traces[b];
        out += "{\"block_number\":" + std::to_string(block.block_number) + ",\"txs\":[\n";
        for (std::size_t i = 0; i < block.txs.size(); ++i) {
            const TxRecord& tx = block.txs[i];
            Json j;
            j["type"] = tx_type_name(tx.type);
            if (tx.from) j["from"] = tx.from->value;
            if (tx.to) j["to"] = tx.to->value;
            j["token"] = tx.token;
            j["amount"] = amount_to_string(tx.amount);
            out += "  " + j.dump();
            out += i + 1 < block.txs.size() ? ",\n" : "\n";
        }
        out += b + 1 < traces.size() ? "]},\n" : "]}\n";
    }
    out += "]}\n";
    return out;
}

}  // namespace smt
