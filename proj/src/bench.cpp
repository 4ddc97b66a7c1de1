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

#include "smt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

namespace smt {

double percent_decrease(double baseline, double obu) {
    if (!(baseline > 0)) throw MetricError("percent decrease is undefined for a non-positive baseline");
    return 100.0 * (baseline - obu) / baseline;
}

std::string_view engine_choice_name(EngineChoice e) {
    switch (e) {
        case EngineChoice::Obu: return "obu";
        case EngineChoice::TwoPhase: return "two-phase";
        case EngineChoice::Both: return "both";
    }
    return "?";
}

EngineChoice engine_choice_from_name(std::string_view name) {
    for (EngineChoice e : {EngineChoice::Obu, EngineChoice::TwoPhase, EngineChoice::Both})
        if (engine_choice_name(e) == name) return e;
    throw ConfigError("unknown engine '" + std::string(name) + "'");
}

std::string_view micro_kind_name(MicroKind k) {
    switch (k) {
        case MicroKind::SeqUpdate: return "seq-update";
        case MicroKind::RandUpdate: return "rand-update";
        case MicroKind::SeqInsert: return "seq-insert";
    }
    return "?";
}

MicroKind micro_kind_from_name(std::string_view name) {
    for (MicroKind k : {MicroKind::SeqUpdate, MicroKind::RandUpdate, MicroKind::SeqInsert})
        if (micro_kind_name(k) == name) return k;
    throw ConfigError("unknown micro workload '" + std::string(name) + "'");
}

void validate(const BenchConfig& config) {
    if (config.runs == 0) throw ConfigError("runs must be at least 1");
    if (config.depth < 1 || config.depth > SparseMerkleTree::kMaxDepth)
        throw ConfigError("depth must be in [1, " + std::to_string(SparseMerkleTree::kMaxDepth) + "]");
    if (config.threads && *config.threads == 0) throw ConfigError("threads must be at least 1");
}

Stats describe(std::span<const double> samples) {
    if (samples.empty()) throw MetricError("no samples");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    Stats s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    s.median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    if (n > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(n - 1);
    }
    s.stddev = std::sqrt(s.variance);
    s.min = v.front();
    s.max = v.back();
    s.range = s.max - s.min;
    return s;
}

bool BenchReport::roots_equal() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseReport& c) { return c.roots_equal; });
}

std::string environment_note(const BenchConfig& config) {
    const EngineConfig ec = set_parallelism({}, config.threads);
    const auto kernel = config.scheme.kernel();
    std::string note = "hardware_threads=" + std::to_string(std::thread::hardware_concurrency()) +
                       " engine_threads=" + std::to_string(ec.threads) +
                       " scheme=" + config.scheme.id() +
                       " kernel_single=" + std::string(sha256::kernel_name(sha256::resolve_single(kernel))) +
                       " kernel_batch=" + std::string(sha256::kernel_name(sha256::resolve_batch(kernel)));
    if (ec.threads > std::thread::hardware_concurrency())
        note += " note=engine threads exceed hardware threads";
    return note;
}

namespace {

std::vector<EngineKind> engines_of(EngineChoice c) {
    switch (c) {
        case EngineChoice::Obu: return {EngineKind::Obu};
        case EngineChoice::TwoPhase: return {EngineKind::TwoPhase};
        case EngineChoice::Both: break;
    }
    return {EngineKind::TwoPhase, EngineKind::Obu};
}

// Times one workload case on copies of `base`.
class CaseRunner {
public:
    CaseRunner(const BenchConfig& config, BenchReport& report)
        : config_(config),
          report_(report),
          engine_(set_parallelism({}, config.threads)),
          kinds_(engines_of(config.engine)) {}

    const EngineConfig& engine_config() const { return engine_.config(); }
    Engine& engine() { return engine_; }

    void run(const std::string& workload, std::size_t k, const SparseMerkleTree& base,
             std::span<const LeafOperation> ops) {
        CaseReport c;
        c.workload = workload;
        c.k = k;
        c.depth = base.depth();
        c.threads = engine_.config().threads;

        for (EngineKind kind : kinds_) {
            SparseMerkleTree warm = base;
            engine_.run(kind, warm, ops);
        }

        std::vector<std::vector<double>> nanos(kinds_.size());
        std::vector<BatchResult> last(kinds_.size());
        for (std::size_t r = 0; r < config_.runs; ++r) {
            for (std::size_t e = 0; e < kinds_.size(); ++e) {
                SparseMerkleTree tree = base;
                const auto t0 = std::chrono::steady_clock::now();
                BatchResult result = engine_.run(kinds_[e], tree, ops);
                const auto t1 = std::chrono::steady_clock::now();
                const auto wall = static_cast<std::uint64_t>(
                    std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
                nanos[e].push_back(static_cast<double>(wall));
                report_.runs.push_back(
                    {workload, k, c.depth, c.threads, kinds_[e], r, wall, result.counters, result.new_root});
                last[e] = std::move(result);
            }
        }

        for (std::size_t e = 0; e < kinds_.size(); ++e) {
            c.engines.push_back({kinds_[e], describe(nanos[e]), last[e].counters, last[e].new_root});
            if (last[e].new_root != last[0].new_root) c.roots_equal = false;
        }
        if (kinds_.size() == 2) {
            // kinds_ is {baseline, obu}.
            c.percent_decrease = percent_decrease(c.engines[0].nanos.mean, c.engines[1].nanos.mean);
        }
        report_.cases.push_back(std::move(c));
    }

private:
    const BenchConfig& config_;
    BenchReport& report_;
    Engine engine_;
    std::vector<EngineKind> kinds_;
};

}  // namespace

BenchReport run_micro(const BenchConfig& config) {
    validate(config);
    if (config.k_sweep.empty()) throw ConfigError("empty k sweep");
    BenchReport report;
    report.environment = environment_note(config);
    CaseRunner runner(config, report);

    for (std::size_t k : config.k_sweep) {
        MicroWorkload w;
        switch (config.micro) {
            case MicroKind::SeqUpdate:
                w = gen_sequential_updates(k, LeafIndex{0}, config.depth, config.seed);
                break;
            case MicroKind::RandUpdate:
                w = gen_uniform_updates(k, config.seed, config.depth);
                break;
            case MicroKind::SeqInsert:
                w = gen_sequential_inserts(k, LeafIndex{0}, config.depth, config.seed);
                break;
        }
        SparseMerkleTree base = SparseMerkleTree::gen(config.depth, config.scheme);
        if (!w.setup.empty()) runner.engine().batch_update(base, w.setup);
        runner.run(std::string(micro_kind_name(config.micro)), k, base, w.ops);
    }
    return report;
}

BenchReport run_macro(const BenchConfig& config) {
    if (config.trace_path.empty()) throw ConfigError("macro benchmark needs a trace path");
    validate(config);
    const auto traces = parse_block_trace(config.trace_path);
    return run_macro(config, traces);
}

BenchReport run_macro(const BenchConfig& config, std::span<const BlockTrace> traces) {
    validate(config);
    const auto blocks = filter_traces(traces, config.filter);
    if (blocks.empty()) throw WorkloadError("no blocks left after the '" +
                                            std::string(trace_filter_name(config.filter)) + "' filter");

    Ledger ledger(Ledger::required_genesis(blocks));
    const auto genesis = ledger.genesis_ops();

    // Convert and validate everything before timing.
    const std::uint64_t capacity = std::uint64_t{1} << config.depth;
    std::vector<std::vector<LeafOperation>> block_ops;
    block_ops.reserve(blocks.size());
    for (const BlockTrace& block : blocks) block_ops.push_back(ledger.execute_block(block));
    for (const LeafOperation& op : genesis)
        if (op.index.value >= capacity)
            throw WorkloadError("account " + std::to_string(op.index.value) + " exceeds tree capacity");
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (const LeafOperation& op : block_ops[b])
            if (op.index.value >= capacity)
                throw WorkloadError("block " + std::to_string(blocks[b].block_number) + ": account " +
                                    std::to_string(op.index.value) + " exceeds tree capacity");

    BenchReport report;
    report.environment = environment_note(config);
    CaseRunner runner(config, report);

    SparseMerkleTree tree = SparseMerkleTree::gen(config.depth, config.scheme);
    runner.engine().batch_update(tree, genesis);

    std::vector<double> decreases;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        runner.run("block-" + std::to_string(blocks[b].block_number), block_ops[b].size(), tree, block_ops[b]);
        if (const auto& pd = report.cases.back().percent_decrease) decreases.push_back(*pd);
        runner.engine().batch_update(tree, block_ops[b]);
    }
    if (!decreases.empty()) report.macro_stats = describe(decreases);
    return report;
}

namespace {

std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string row_prefix(const std::string& workload, std::size_t k, unsigned depth, unsigned threads,
                       std::string_view engine) {
    return workload + "," + std::to_string(k) + "," + std::to_string(depth) + "," +
           std::to_string(threads) + "," + std::string(engine) + ",";
}

std::string stem_of(const std::string& path) {
    const std::filesystem::path p(path);
    return (p.parent_path() / p.stem()).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.close();
    if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace

std::string_view report_csv_header() {
    return "workload,k,depth,threads,engine,run,wall_nanos,node_visits,hash_invocations,root_hex";
}

std::string_view summary_csv_header() {
    return "workload,k,depth,threads,engine,run,wall_nanos,node_visits,hash_invocations,root_hex,"
           "mean_nanos,median_nanos,stddev_nanos,percent_decrease";
}

std::string_view stats_csv_header() { return "statistic,percent_decrease"; }

std::string format_report_csv(const BenchReport& report) {
    std::string out(report_csv_header());
    out += '\n';
    for (const RunRecord& r : report.runs) {
        out += row_prefix(r.workload, r.k, r.depth, r.threads, engine_name(r.engine));
        out += std::to_string(r.run) + "," + std::to_string(r.wall_nanos) + "," +
               std::to_string(r.counters.node_visits()) + "," + std::to_string(r.counters.hash_invocations) +
               "," + r.root.hex() + "\n";
    }
    return out;
}

std::string format_summary_csv(const BenchReport& report) {
    std::string out(summary_csv_header());
    out += '\n';
    for (const CaseReport& c : report.cases) {
        const std::string pd = c.percent_decrease ? fixed(*c.percent_decrease, 4) : "";
        for (const EngineSummary& e : c.engines) {
            out += row_prefix(c.workload, c.k, c.depth, c.threads, engine_name(e.engine));
            out += "agg," + fixed(e.nanos.mean, 0) + "," + std::to_string(e.counters.node_visits()) + "," +
                   std::to_string(e.counters.hash_invocations) + "," + e.root.hex() + "," +
                   fixed(e.nanos.mean, 1) + "," + fixed(e.nanos.median, 1) + "," + fixed(e.nanos.stddev, 1) +
                   "," + pd + "\n";
        }
    }
    if (report.macro_stats && !report.cases.empty()) {
        // One row for the whole trace; time columns hold per-block OBU means.
        std::size_t ops = 0;
        std::uint64_t visits = 0, hashes = 0;
        std::vector<double> obu_means;
        for (const CaseReport& c : report.cases) {
            ops += c.k;
            const EngineSummary& obu = c.engines.back();
            visits += obu.counters.node_visits();
            hashes += obu.counters.hash_invocations;
            obu_means.push_back(obu.nanos.mean);
        }
        const Stats t = describe(obu_means);
        const CaseReport& last = report.cases.back();
        out += row_prefix("macro-aggregate", ops, last.depth, last.threads, "both");
        out += "agg," + fixed(t.mean * static_cast<double>(obu_means.size()), 0) + "," +
               std::to_string(visits) + "," + std::to_string(hashes) + "," + last.engines.back().root.hex() +
               "," + fixed(t.mean, 1) + "," + fixed(t.median, 1) + "," + fixed(t.stddev, 1) + "," +
               fixed(report.macro_stats->mean, 4) + "\n";
    }
    return out;
}

std::string format_stats_csv(const BenchReport& report) {
    if (!report.macro_stats) return {};
    const Stats& s = *report.macro_stats;
    std::string out(stats_csv_header());
    out += '\n';
    const std::pair<const char*, double> rows[] = {
        {"Mean", s.mean},       {"Median", s.median}, {"Standard Deviation", s.stddev},
        {"Variance", s.variance}, {"Minimum", s.min},  {"Maximum", s.max},
        {"Range", s.range},
    };
    for (const auto& [name, value] : rows) out += std::string(name) + "," + fixed(value, 4) + "\n";
    return out;
}

std::vector<std::string> write_report(const BenchReport& report, const std::string& path) {
    std::vector<std::string> written;
    write_file(path, format_report_csv(report));
    written.push_back(path);
    const std::string summary = stem_of(path) + ".summary.csv";
    write_file(summary, format_summary_csv(report));
    written.push_back(summary);
    if (report.macro_stats) {
        const std::string stats = stem_of(path) + ".stats.csv";
        write_file(stats, format_stats_csv(report));
        written.push_back(stats);
    }
    return written;
}

std::string_view fixture_kind_name(FixtureKind k) {
    switch (k) {
        case FixtureKind::Synthetic100: return "synthetic100";
        case FixtureKind::Hot: return "hot";
        case FixtureKind::Dispersed: return "dispersed";
    }
    return "?";
}

FixtureKind fixture_kind_from_name(std::string_view name) {
    for (FixtureKind k : {FixtureKind::Synthetic100, FixtureKind::Hot, FixtureKind::Dispersed})
        if (fixture_kind_name(k) == name) return k;
    throw ConfigError("unknown fixture kind '" + std::string(name) + "'");
}

std::vector<BlockTrace> make_fixture(FixtureKind kind, const FixtureParams& params) {
    switch (kind) {
        case FixtureKind::Synthetic100: {
            SyntheticTraceParams p;
            p.depth = params.depth;
            if (params.seed) p.seed = *params.seed;
            return gen_synthetic_trace(p);
        }
        case FixtureKind::Hot:
            if (params.hot_index.value + params.blocks * params.k >= (std::uint64_t{1} << params.depth))
                throw ConfigError("hot fixture does not fit the tree depth");
            return gen_hot_fixture(params.blocks, params.k, params.hot_index);
        case FixtureKind::Dispersed:
            return gen_dispersed_fixture(params.blocks, params.txs_per_block, params.depth,
                                         params.seed.value_or(7));
    }
    throw ConfigError("unknown fixture kind");
}

void gen_fixture(FixtureKind kind, const FixtureParams& params, const std::string& out_path) {
    write_file(out_path, serialize_block_trace(make_fixture(kind, params)));
}

}  // namespace smt
