// nsmp: command-line front end for answering, training, query generation,
// evaluation and benchmarking.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "nsmp/complex_model.hpp"
#include "nsmp/engine.hpp"
#include "nsmp/eval.hpp"
#include "nsmp/kg_store.hpp"
#include "nsmp/synthetic.hpp"
#include "nsmp/templates.hpp"
#include "nsmp/toy_trainer.hpp"

namespace {

using namespace nsmp;

struct EngineFlags {
    double epsilon = kDefaultEpsilon;
    double alpha = 100.0;
    double lambda = 0.3;
    std::string layers = "auto";
    bool no_neural = false;
    bool no_pruning = false;
    std::string union_rule = "max";

    void attach(CLI::App* app) {
        app->add_option("--epsilon", epsilon, "Normalization threshold")->capture_default_str();
        app->add_option("--alpha", alpha, "Negation mass (alpha / |V| per entity)")
            ->capture_default_str();
        app->add_option("--lambda", lambda, "Weight of the symbolic term in the answer")
            ->capture_default_str();
        app->add_option("--layers", layers, "'auto' (depth + 1) or a fixed layer count")
            ->capture_default_str();
        app->add_flag("--no-neural", no_neural, "Symbolic messages only; answers use lambda = 1");
        app->add_flag("--no-pruning", no_pruning, "Disable dynamic pruning");
        app->add_option("--union", union_rule, "DNF branch combination")
            ->check(CLI::IsMember({"max", "psum"}))
            ->capture_default_str();
    }

    EngineConfig config() const {
        EngineConfig cfg;
        cfg.epsilon = epsilon;
        cfg.alpha = alpha;
        cfg.lambda = lambda;
        cfg.neural_enabled = !no_neural;
        cfg.dynamic_pruning = !no_pruning;
        cfg.union_rule = union_rule == "psum" ? UnionRule::ProbabilisticSum : UnionRule::Max;
        if (layers == "auto") {
            cfg.layers = LayerPolicy::automatic();
        } else {
            std::size_t value = 0;
            auto [end, ec] = std::from_chars(layers.data(), layers.data() + layers.size(), value);
            if (ec != std::errc() || end != layers.data() + layers.size() || value == 0)
                throw Error("--layers expects 'auto' or a positive integer, got '" + layers + "'");
            cfg.layers = LayerPolicy::fixed(value);
        }
        cfg.validate();
        return cfg;
    }
};

std::optional<ComplexEmbeddingTable> load_table(const std::string& path, bool needed) {
    if (path.empty()) {
        if (needed) throw Error("--emb is required unless --no-neural is given");
        return std::nullopt;
    }
    return load_embeddings(path);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

TripleStore load_with_vocab(const std::string& path, const std::string& vocab_path) {
    if (vocab_path.empty()) return load_triples(path);
    const TripleStore vocab = load_triples(vocab_path);
    return load_triples(path, &vocab);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string::npos ? s.size() : comma;
        if (end > start) out.push_back(s.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<BenchSize> parse_sizes(const std::string& s) {
    std::vector<BenchSize> out;
    for (const auto& item : split_list(s)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw Error("size '" + item + "' is not ENTITIES:EDGES");
        BenchSize size{};
        auto parse = [&](std::string_view text, std::size_t& value) {
            auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || end != text.data() + text.size() || value == 0)
                throw Error("size '" + item + "' is not ENTITIES:EDGES");
        };
        parse(std::string_view(item).substr(0, colon), size.entities);
        parse(std::string_view(item).substr(colon + 1), size.edges);
        out.push_back(size);
    }
    if (out.empty()) throw Error("--sizes is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural-symbolic message passing for complex queries over knowledge graphs"};
    app.require_subcommand(1);

    // answer
    auto* answer = app.add_subcommand("answer", "Answer one query and print JSON");
    std::string kg_path, observed_path, emb_path, query, out_path;
    std::size_t topk = 10;
    bool explain_flag = false;
    EngineFlags answer_flags;
    answer->add_option("--kg", kg_path, "Triple TSV used for reasoning")->required();
    answer->add_option("--emb", emb_path, "Embedding file (NSMPEMB1)");
    std::string vocab_path;
    answer->add_option("--vocab", vocab_path, "TSV graph whose ids --kg should share");
    answer->add_option("--query", query, "Formula text")->required();
    answer->add_option("--topk", topk, "Number of answers to list")->capture_default_str();
    answer->add_flag("--explain", explain_flag, "List top entities of every variable");
    answer_flags.attach(answer);

    // train-toy
    auto* train = app.add_subcommand("train-toy", "Train small ComplEx embeddings");
    ToyTrainConfig train_cfg;
    train->add_option("--kg", kg_path, "Training triples (TSV)")->required();
    train->add_option("--vocab", vocab_path, "TSV graph whose ids --kg should share");
    train->add_option("--rank", train_cfg.rank)->capture_default_str();
    train->add_option("--epochs", train_cfg.epochs)->capture_default_str();
    train->add_option("--seed", train_cfg.seed)->capture_default_str();
    train->add_option("--lr", train_cfg.step_size, "Adagrad step size")->capture_default_str();
    train->add_option("--n3", train_cfg.n3_weight, "N3 regularization weight")
        ->capture_default_str();
    train->add_option("--out", out_path, "Output embedding file")->required();

    // gen-queries
    auto* gen = app.add_subcommand("gen-queries", "Sample queries with easy/hard answers");
    std::string template_name;
    std::size_t count = 100;
    std::uint64_t seed = 0;
    gen->add_option("--kg", kg_path, "Full graph (TSV)")->required();
    gen->add_option("--observed", observed_path, "Observed graph (TSV), subset of --kg")
        ->required();
    gen->add_option("--template", template_name)->required();
    gen->add_option("--count", count)->capture_default_str();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--out", out_path, "Output JSONL")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Filtered MRR over a JSONL query file");
    std::string queries_path, report_path;
    EngineFlags eval_flags;
    eval->add_option("--kg", kg_path, "Full graph (TSV); defines the vocabulary")->required();
    eval->add_option("--observed", observed_path,
                     "Graph the engine reasons over (TSV); defaults to --kg");
    eval->add_option("--emb", emb_path, "Embedding file (NSMPEMB1)");
    eval->add_option("--queries", queries_path, "Query JSONL")->required();
    eval->add_option("--report", report_path, "Report path ('-' for stdout)");
    eval_flags.attach(eval);

    // bench
    auto* bench = app.add_subcommand("bench", "Latency scaling on synthetic graphs");
    std::string sizes = "1000:8000,2000:16000";
    std::string templates = "2p,3c";
    BenchOptions bench_opts;
    bool bench_symbolic = false;
    bench->add_option("--sizes", sizes, "ENTITIES:EDGES,...")->capture_default_str();
    bench->add_option("--templates", templates)->capture_default_str();
    bench->add_option("--seed", seed)->capture_default_str();
    bench->add_option("--queries", bench_opts.queries_per_template, "Queries per template")
        ->capture_default_str();
    bench->add_option("--repeats", bench_opts.repeats)->capture_default_str();
    bench->add_option("--rank", bench_opts.rank)->capture_default_str();
    bench->add_option("--relations", bench_opts.relations)->capture_default_str();
    bench->add_flag("--no-neural", bench_symbolic, "Benchmark the symbolic path only");
    bench->add_option("--out", out_path, "Report path ('-' for stdout)");

    // gen-kg
    auto* gen_kg = app.add_subcommand("gen-kg", "Write a synthetic graph as TSV");
    std::size_t entities = 30, relations = 4, edges = 360, clusters = 0, degree = 3;
    double holdout = 0.0;
    gen_kg->add_option("--entities", entities)->capture_default_str();
    gen_kg->add_option("--relations", relations)->capture_default_str();
    gen_kg->add_option("--edges", edges, "Edge count for uniform graphs")->capture_default_str();
    gen_kg->add_option("--clusters", clusters, "Use the clustered generator with this many groups");
    gen_kg->add_option("--out-degree", degree, "Tails per (entity, relation) when clustered")
        ->capture_default_str();
    gen_kg->add_option("--seed", seed)->capture_default_str();
    gen_kg->add_option("--out", out_path, "Full graph TSV")->required();
    gen_kg->add_option("--holdout", holdout, "Fraction of edges removed for --observed-out");
    gen_kg->add_option("--observed-out", observed_path, "Observed graph TSV");

    // ids
    auto* ids = app.add_subcommand("ids", "Print the label -> id mapping of a TSV graph");
    ids->add_option("--kg", kg_path)->required();
    ids->add_option("--out", out_path, "Output path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (answer->parsed()) {
            const EngineConfig cfg = answer_flags.config();
            const TripleStore kg = load_with_vocab(kg_path, vocab_path);
            const auto table = load_table(emb_path, cfg.neural_enabled);
            const Engine engine(kg, table ? &*table : nullptr, cfg);
            const auto result = engine.answer_query(parse_formula(query, kg));
            std::cout << answer_json(kg, query, result, cfg, topk, explain_flag);
        } else if (train->parsed()) {
            const TripleStore kg = load_with_vocab(kg_path, vocab_path);
            save_embeddings(train_toy(kg, train_cfg), out_path);
        } else if (gen->parsed()) {
            const TripleStore full = load_triples(kg_path);
            const TripleStore observed = load_triples(observed_path, &full);
            const auto queries = generate_queries(observed, full, template_name, count, seed);
            write_queries(out_path, queries);
        } else if (eval->parsed()) {
            const EngineConfig cfg = eval_flags.config();
            const TripleStore full = load_triples(kg_path);
            const TripleStore observed =
                observed_path.empty() ? full : load_triples(observed_path, &full);
            const auto table = load_table(emb_path, cfg.neural_enabled);
            const Engine engine(observed, table ? &*table : nullptr, cfg);
            const EvalReport report = run_eval(engine, std::filesystem::path(queries_path));
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
            write_text(report_path, report_json(report));
        } else if (bench->parsed()) {
            bench_opts.neural = !bench_symbolic;
            const auto names = split_list(templates);
            const auto size_list = parse_sizes(sizes);
            write_text(out_path, bench_json(bench_scaling(names, size_list, seed, bench_opts)));
        } else if (gen_kg->parsed()) {
            const TripleStore full = clusters > 0
                                         ? make_clustered_kg(entities, relations, clusters, degree, seed)
                                         : make_random_kg(entities, relations, edges, seed);
            write_triples(full, out_path);
            if (!observed_path.empty()) write_triples(hold_out(full, holdout, seed), observed_path);
        } else if (ids->parsed()) {
            const TripleStore kg = load_triples(kg_path);
            if (out_path.empty() || out_path == "-") {
                for (std::size_t i = 0; i < kg.num_entities(); ++i)
                    std::cout << kg.entities().label(static_cast<EntityId>(i)) << '\t' << i << '\n';
            } else {
                write_entity_ids(kg, out_path);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
