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
/// Benchmark drivers comparing the one-phase engine with the two-phase
/// baseline, and their CSV reports.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smt/batch.hpp"
#include "smt/workload.hpp"

namespace smt {

class MetricError : public Error {
public:
    using Error::Error;
};

/// 100 * (baseline - obu) / baseline; positive when OBU is faster.
/// Throws MetricError unless baseline > 0.
double percent_decrease(double baseline, double obu);

enum class EngineChoice { Obu, TwoPhase, Both };

std::string_view engine_choice_name(EngineChoice e);
EngineChoice engine_choice_from_name(std::string_view name);

enum class MicroKind { SeqUpdate, RandUpdate, SeqInsert };

std::string_view micro_kind_name(MicroKind k);
MicroKind micro_kind_from_name(std::string_view name);

struct BenchConfig {
    EngineChoice engine = EngineChoice::Both;
    unsigned depth = 24;
    /// nullopt: one thread per hardware thread.
    std::optional<unsigned> threads;
    std::size_t runs = 10;
    std::uint64_t seed = 1;

    MicroKind micro = MicroKind::SeqUpdate;
    std::vector<std::size_t> k_sweep = {10, 100, 1000};

    std::string trace_path;
    TraceFilter filter = TraceFilter::All;

    HashScheme scheme = HashScheme::sha256();
};

/// Throws ConfigError on runs == 0, a bad depth or an empty sweep.
void validate(const BenchConfig& config);

/// Sample statistics; stddev and variance use n - 1 (0 for one sample).
struct Stats {
    double mean = 0;
    double median = 0;
    double stddev = 0;
    double variance = 0;
    double min = 0;
    double max = 0;
    double range = 0;
};

/// Throws MetricError on an empty sample.
Stats describe(std::span<const double> samples);

struct RunRecord {
    std::string workload;
    std::size_t k = 0;
    unsigned depth = 0;
    unsigned threads = 0;
    EngineKind engine = EngineKind::Obu;
    std::size_t run = 0;
    std::uint64_t wall_nanos = 0;
    CounterSet counters;
    Digest root;
};

struct EngineSummary {
    EngineKind engine = EngineKind::Obu;
    Stats nanos;
    CounterSet counters;
    Digest root;
};

/// One workload case: a k value of a micro sweep or one block of a trace.
struct CaseReport {
    std::string workload;
    std::size_t k = 0;
    unsigned depth = 0;
    unsigned threads = 0;
    std::vector<EngineSummary> engines;
    /// Of the mean times; set only when both engines ran.
    std::optional<double> percent_decrease;
    bool roots_equal = true;
};

struct BenchReport {
    std::vector<RunRecord> runs;
    std::vector<CaseReport> cases;
    /// Macro only: statistics of the per-block percent_decrease values.
    std::optional<Stats> macro_stats;
    std::string environment;

    bool roots_equal() const;
};

/// Fresh tree per k, one untimed warm-up per engine, then `runs` timed runs
/// per engine, each on a copy of the same pre-populated tree.
BenchReport run_micro(const BenchConfig& config);

/// Replays the trace block by block from a seeded genesis state. Every block
/// is converted and validated before any timing starts.
BenchReport run_macro(const BenchConfig& config);

/// Same as run_macro on traces already in memory.
BenchReport run_macro(const BenchConfig& config, std::span<const BlockTrace> traces);

/// Hardware threads, hash kernels and engine parallelism.
std::string environment_note(const BenchConfig& config);

inline constexpr int kCsvSchemaVersion = 1;

std::string_view report_csv_header();
std::string_view summary_csv_header();
std::string_view stats_csv_header();

std::string format_report_csv(const BenchReport& report);
std::string format_summary_csv(const BenchReport& report);
/// Empty when the report has no macro statistics.
std::string format_stats_csv(const BenchReport& report);

/// Writes `path` (per-run rows), `<stem>.summary.csv` and, for macro
/// reports, `<stem>.stats.csv`. Returns the paths written. Throws IoError.
std::vector<std::string> write_report(const BenchReport& report, const std::string& path);

enum class FixtureKind { Synthetic100, Hot, Dispersed };

std::string_view fixture_kind_name(FixtureKind k);
FixtureKind fixture_kind_from_name(std::string_view name);

struct FixtureParams {
    std::size_t blocks = 10;
    std::size_t k = 48;
    std::size_t txs_per_block = 83;
    LeafIndex hot_index{1000};
    unsigned depth = 24;
    /// nullopt: the generator's pinned default.
    std::optional<std::uint64_t> seed;
};

std::vector<BlockTrace> make_fixture(FixtureKind kind, const FixtureParams& params);

/// Serialises make_fixture to out_path. Throws IoError.
void gen_fixture(FixtureKind kind, const FixtureParams& params, const std::string& out_path);

}  // namespace smt
