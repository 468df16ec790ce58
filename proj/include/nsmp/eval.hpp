#pragma once
// Filtered MRR evaluation over JSONL query files and the latency benchmark.
//
// Query JSONL, one object per line:
//   {"formula": "...", "type": "2p", "easy_answers": [ids], "hard_answers": [ids]}

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsmp/engine.hpp"
#include "nsmp/templates.hpp"

namespace nsmp {

using QueryRecord = GeneratedQuery;

// Mean reciprocal rank of the hard answers. Each hard answer competes only
// with entities outside easy and hard; ties count against it. nullopt when
// `hard` is empty. Throws on out-of-range ids or overlapping sets.
std::optional<double> mrr(std::span<const double> scores, std::span<const EntityId> easy,
                          std::span<const EntityId> hard);

QueryRecord parse_query_record(std::string_view line);
std::string to_jsonl(const QueryRecord& record);
void write_queries(const std::filesystem::path& path, std::span<const QueryRecord> records);

struct TemplateStats {
    std::string type;
    std::size_t queries = 0;
    double mrr = 0.0;
    double mean_latency_ms = 0.0;
};

struct EvalReport {
    std::vector<TemplateStats> templates;  // sorted by type
    std::size_t records = 0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
    EngineConfig config;
};

inline constexpr double kMaxSkippedFraction = 0.1;

// Records that fail to parse, reference unknown ids, or have no hard answers
// are skipped with a warning. Throws when there are no records or more than
// kMaxSkippedFraction of them are skipped.
EvalReport run_eval(const Engine& engine, std::span<const std::string> lines);
EvalReport run_eval(const Engine& engine, const std::filesystem::path& queries);

std::string report_json(const EvalReport& report);

struct BenchSize {
    std::size_t entities;
    std::size_t edges;
};

struct BenchOptions {
    std::size_t relations = 4;
    std::size_t queries_per_template = 10;
    std::size_t repeats = 3;
    std::size_t rank = 32;
    bool neural = true;
    EngineConfig engine;
};

struct BenchRow {
    std::string type;
    std::size_t entities = 0;
    std::size_t edges = 0;
    std::size_t samples = 0;
    double median_ms = 0.0;
};

struct BenchFit {
    std::string type;
    // Least-squares slope of log latency against log size; absent when the
    // size does not vary.
    std::optional<double> exponent_vs_edges;
    std::optional<double> exponent_vs_entities;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchFit> fits;
};

// Slope of log(y) on log(x). nullopt with fewer than two distinct x.
std::optional<double> fit_exponent(std::span<const double> x, std::span<const double> y);

// Sizes must be strictly ascending. Each size gets a random graph and random
// embeddings; every query is answered once untimed, then timed `repeats`
// times.
BenchReport bench_scaling(std::span<const std::string> templates, std::span<const BenchSize> sizes,
                          std::uint64_t seed, const BenchOptions& options = {});

std::string bench_json(const BenchReport& report);

// Output of `nsmp answer`: the query, config, top-k answers with labels and
// scores, warnings, and per-variable top-k when `explain` is set. Key order
// is fixed.
std::string answer_json(const TripleStore& kg, std::string_view query,
                        const AnswerDistribution& result, const EngineConfig& cfg,
                        std::size_t top, bool explain);

}  // namespace nsmp
