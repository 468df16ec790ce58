#include "nsmp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "json.hpp"
#include "nsmp/synthetic.hpp"

namespace nsmp {

using Json = nlohmann::ordered_json;

std::optional<double> mrr(std::span<const double> scores, std::span<const EntityId> easy,
                          std::span<const EntityId> hard) {
    if (hard.empty()) return std::nullopt;
    const std::size_t n = scores.size();
    // 1 = easy, 2 = hard
    std::vector<std::uint8_t> mark(n, 0);
    for (EntityId e : easy) {
        if (e >= n) throw DimensionError("easy answer " + std::to_string(e) + " out of range");
        mark[e] = 1;
    }
    for (EntityId a : hard) {
        if (a >= n) throw DimensionError("hard answer " + std::to_string(a) + " out of range");
        if (mark[a] == 1) throw Error("entity " + std::to_string(a) + " is both easy and hard");
        mark[a] = 2;
    }

    double total = 0.0;
    for (EntityId a : hard) {
        std::size_t rank = 1;
        for (std::size_t c = 0; c < n; ++c)
            if (mark[c] == 0 && scores[c] >= scores[a]) ++rank;
        total += 1.0 / static_cast<double>(rank);
    }
    return total / static_cast<double>(hard.size());
}

namespace {

std::vector<EntityId> id_list(const Json& j, const char* key) {
    if (!j.contains(key)) return {};
    const Json& arr = j.at(key);
    if (!arr.is_array()) throw ParseError(std::string("field '") + key + "' is not an array");
    std::vector<EntityId> out;
    for (const Json& v : arr) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
            v.get<std::int64_t>() > std::numeric_limits<EntityId>::max())
            throw ParseError(std::string("field '") + key + "' holds a non-id value");
        out.push_back(v.get<EntityId>());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Json config_to_json(const EngineConfig& cfg) {
    Json j;
    j["epsilon"] = cfg.epsilon;
    j["alpha"] = cfg.alpha;
    j["lambda"] = cfg.effective_lambda();
    j["layers"] = cfg.layers.kind == LayerPolicy::Kind::Auto
                      ? "auto+" + std::to_string(cfg.layers.value)
                      : std::to_string(cfg.layers.value);
    j["neural"] = cfg.neural_enabled;
    j["dynamic_pruning"] = cfg.dynamic_pruning;
    j["union"] = cfg.union_rule == UnionRule::Max ? "max" : "probabilistic_sum";
    return j;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

QueryRecord parse_query_record(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("record is not a JSON object");
    if (!j.contains("formula") || !j.at("formula").is_string())
        throw ParseError("record has no string field 'formula'");

    QueryRecord r;
    r.formula = j.at("formula").get<std::string>();
    if (j.contains("type")) {
        if (!j.at("type").is_string()) throw ParseError("field 'type' is not a string");
        r.type = j.at("type").get<std::string>();
    }
    r.easy = id_list(j, "easy_answers");
    r.hard = id_list(j, "hard_answers");
    std::vector<EntityId> overlap;
    std::set_intersection(r.easy.begin(), r.easy.end(), r.hard.begin(), r.hard.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty())
        throw ParseError("entity " + std::to_string(overlap.front()) + " is both easy and hard");
    return r;
}

std::string to_jsonl(const QueryRecord& record) {
    Json j;
    j["formula"] = record.formula;
    j["type"] = record.type;
    j["easy_answers"] = record.easy;
    j["hard_answers"] = record.hard;
    return j.dump();
}

void write_queries(const std::filesystem::path& path, std::span<const QueryRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& r : records) out << to_jsonl(r) << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

EvalReport run_eval(const Engine& engine, std::span<const std::string> lines) {
    EvalReport report;
    report.config = engine.config();

    struct Accumulator {
        std::size_t queries = 0;
        double mrr_sum = 0.0;
        double latency_ms = 0.0;
    };
    std::map<std::string, Accumulator> by_type;
    const std::size_t num_entities = engine.kg().num_entities();

    std::size_t line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++report.records;
        auto skip = [&](const std::string& why) {
            ++report.skipped;
            report.warnings.push_back("record " + std::to_string(line_no) + " skipped: " + why);
        };
        try {
            QueryRecord rec = parse_query_record(line);
            if (rec.hard.empty()) {
                skip("no hard answers");
                continue;
            }
            for (const auto* ids : {&rec.easy, &rec.hard})
                if (!ids->empty() && ids->back() >= num_entities)
                    throw ParseError("answer id " + std::to_string(ids->back()) + " out of range");
            const Formula f = parse_formula(rec.formula, engine.kg());

            const auto start = std::chrono::steady_clock::now();
            const AnswerDistribution result = engine.answer_query(f);
            const auto stop = std::chrono::steady_clock::now();

            auto& acc = by_type[rec.type.empty() ? "unknown" : rec.type];
            ++acc.queries;
            acc.mrr_sum += *mrr(result.scores, rec.easy, rec.hard);
            acc.latency_ms += std::chrono::duration<double, std::milli>(stop - start).count();
            ++report.evaluated;
        } catch (const Error& e) {
            skip(e.what());
        }
    }

    if (report.records == 0) throw Error("query file has no records");
    if (static_cast<double>(report.skipped) >
        kMaxSkippedFraction * static_cast<double>(report.records)) {
        std::string msg = std::to_string(report.skipped) + " of " +
                          std::to_string(report.records) + " records skipped";
        if (!report.warnings.empty()) msg += " (first: " + report.warnings.front() + ")";
        throw Error(msg);
    }

    for (const auto& [type, acc] : by_type) {
        const auto q = static_cast<double>(acc.queries);
        report.templates.push_back({type, acc.queries, acc.mrr_sum / q, acc.latency_ms / q});
    }
    return report;
}

EvalReport run_eval(const Engine& engine, const std::filesystem::path& queries) {
    std::ifstream in(queries, std::ios::binary);
    if (!in) throw Error("cannot open query file " + queries.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    return run_eval(engine, lines);
}

std::string report_json(const EvalReport& report) {
    Json j;
    j["records"] = report.records;
    j["evaluated"] = report.evaluated;
    j["skipped"] = report.skipped;
    j["config"] = config_to_json(report.config);
    Json templates = Json::array();
    for (const auto& t : report.templates)
        templates.push_back({{"type", t.type},
                             {"queries", t.queries},
                             {"mrr", t.mrr},
                             {"mean_latency_ms", t.mean_latency_ms}});
    j["templates"] = std::move(templates);
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::optional<double> fit_exponent(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fit_exponent: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw Error("fit_exponent needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx < 1e-24) return std::nullopt;
    return sxy / sxx;
}

BenchReport bench_scaling(std::span<const std::string> templates, std::span<const BenchSize> sizes,
                          std::uint64_t seed, const BenchOptions& options) {
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        const auto& a = sizes[i - 1];
        const auto& b = sizes[i];
        if (b.entities < a.entities || b.edges < a.edges ||
            (b.entities == a.entities && b.edges == a.edges))
            throw Error("benchmark sizes must be strictly ascending");
    }
    if (options.repeats == 0 || options.queries_per_template == 0)
        throw Error("benchmark needs at least one query and one repeat");

    EngineConfig cfg = options.engine;
    cfg.neural_enabled = options.neural;
    GenerationOptions gen;
    gen.check_answers = false;

    BenchReport report;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const auto& size = sizes[s];
        const std::uint64_t size_seed = seed + 1000003ULL * s;
        const TripleStore kg =
            make_random_kg(size.entities, options.relations, size.edges, size_seed);

        std::optional<ComplexEmbeddingTable> table;
        if (options.neural) {
            table.emplace(size.entities, options.relations, options.rank);
            std::mt19937_64 rng(size_seed ^ 0x9e3779b97f4a7c15ULL);
            std::normal_distribution<float> normal(0.0f, 0.1f);
            for (auto* arr : {&table->entity_real(), &table->entity_imag(),
                              &table->relation_real(), &table->relation_imag()})
                for (float& x : *arr) x = normal(rng);
        }
        const Engine engine(kg, table ? &*table : nullptr, cfg);

        for (const auto& name : templates) {
            const auto queries =
                generate_queries(kg, kg, name, options.queries_per_template, size_seed, gen);
            std::vector<Formula> formulas;
            for (const auto& q : queries) formulas.push_back(parse_formula(q.formula, kg));
            for (const auto& f : formulas) (void)engine.answer_query(f);

            std::vector<double> samples;
            for (std::size_t rep = 0; rep < options.repeats; ++rep) {
                for (const auto& f : formulas) {
                    const auto start = std::chrono::steady_clock::now();
                    const auto result = engine.answer_query(f);
                    const auto stop = std::chrono::steady_clock::now();
                    samples.push_back(
                        std::chrono::duration<double, std::milli>(stop - start).count());
                    if (result.scores.empty()) throw Error("empty answer vector");
                }
            }
            report.rows.push_back(
                {name, size.entities, size.edges, samples.size(), median(samples)});
        }
    }

    for (const auto& name : templates) {
        std::vector<double> edges, entities, latency;
        for (const auto& row : report.rows) {
            if (row.type != name) continue;
            edges.push_back(static_cast<double>(row.edges));
            entities.push_back(static_cast<double>(row.entities));
            latency.push_back(std::max(row.median_ms, 1e-9));
        }
        report.fits.push_back({name, fit_exponent(edges, latency), fit_exponent(entities, latency)});
    }
    return report;
}

std::string bench_json(const BenchReport& report) {
    Json j;
    Json rows = Json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"type", r.type},
                        {"entities", r.entities},
                        {"edges", r.edges},
                        {"samples", r.samples},
                        {"median_ms", r.median_ms}});
    j["rows"] = std::move(rows);
    Json fits = Json::array();
    for (const auto& f : report.fits) {
        Json item;
        item["type"] = f.type;
        if (f.exponent_vs_edges) item["exponent_vs_edges"] = *f.exponent_vs_edges;
        if (f.exponent_vs_entities) item["exponent_vs_entities"] = *f.exponent_vs_entities;
        fits.push_back(std::move(item));
    }
    j["fits"] = std::move(fits);
    return j.dump(2) + "\n";
}

std::string answer_json(const TripleStore& kg, std::string_view query,
                        const AnswerDistribution& result, const EngineConfig& cfg,
                        std::size_t top, bool explain_variables) {
    auto ranked = [&](std::span<const RankedEntity> entries) {
        Json arr = Json::array();
        for (const auto& e : entries)
            arr.push_back({{"id", e.id}, {"entity", kg.entities().label(e.id)}, {"score", e.weight}});
        return arr;
    };

    Json j;
    j["query"] = std::string(query);
    j["config"] = config_to_json(cfg);
    Json branches = Json::array();
    for (const auto& b : result.branches)
        branches.push_back({{"formula", b.formula},
                            {"depth", b.depth},
                            {"layers", b.layers},
                            {"messages", b.messages}});
    j["branches"] = std::move(branches);
    j["answers"] = ranked(top_k(result.scores, top));
    if (explain_variables) {
        Json vars = Json::array();
        for (const auto& v : explain(result, top))
            vars.push_back({{"branch", v.branch}, {"variable", v.name}, {"top", ranked(v.top)}});
        j["explanations"] = std::move(vars);
    }
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

}  // namespace nsmp
