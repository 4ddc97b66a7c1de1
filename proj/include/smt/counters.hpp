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

#include <cstdint>

namespace smt {

/// Work counters for one engine run.
///
/// A node visit is one cache lookup-or-write on a heap index made by the
/// operation's own control flow. Visits are split by phase: the leaf phase
/// applies mutations, the hash phase recomputes digests.
struct CounterSet {
    std::uint64_t leaf_phase_visits = 0;
    std::uint64_t hash_phase_visits = 0;
    std::uint64_t hash_invocations = 0;
    std::uint64_t leaf_phase_nanos = 0;
    std::uint64_t hash_phase_nanos = 0;
    std::uint64_t levels_processed = 0;

    std::uint64_t node_visits() const { return leaf_phase_visits + hash_phase_visits; }
    std::uint64_t total_nanos() const { return leaf_phase_nanos + hash_phase_nanos; }

    void reset() { *this = CounterSet{}; }

    /// Equality over the deterministic fields (wall times excluded).
    bool same_work(const CounterSet& o) const {
        return leaf_phase_visits == o.leaf_phase_visits &&
               hash_phase_visits == o.hash_phase_visits &&
               hash_invocations == o.hash_invocations && levels_processed == o.levels_processed;
    }
};

}  // namespace smt
