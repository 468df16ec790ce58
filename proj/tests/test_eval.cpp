#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "nsmp/eval.hpp"
#include "nsmp/synthetic.hpp"
#include "toy_graph.hpp"

using namespace nsmp;

TEST_CASE("mrr hand cases") {
    // entities 0..5; hard {0, 1}; easy {2}
    // 0 beats everything (rank 1); 1 is beaten by 3, 4, 5 (rank 4); 2 is filtered
    const std::vector<double> scores{0.9, 0.1, 0.95, 0.5, 0.4, 0.3};
    const std::vector<EntityId> easy{2}, hard{0, 1};
    CHECK(*mrr(scores, easy, hard) == 0.625);

    CHECK(*mrr(std::vector<double>{0.1, 0.9, 0.2}, {}, std::vector<EntityId>{1}) == 1.0);
    CHECK(*mrr(std::vector<double>{0.5, 0.5, 0.2}, {}, std::vector<EntityId>{1}) == 0.5);
    CHECK_FALSE(mrr(scores, easy, {}).has_value());
    CHECK_THROWS_AS(mrr(scores, easy, std::vector<EntityId>{2}), Error);
    CHECK_THROWS_AS(mrr(scores, easy, std::vector<EntityId>{6}), DimensionError);
}

TEST_CASE("mrr is invariant under monotone transforms and hard-list order") {
    const std::vector<double> scores{0.3, 0.1, 0.7, 0.2, 0.9, 0.4, 0.4};
    const std::vector<EntityId> easy{4}, hard{0, 5, 1};
    const double base = *mrr(scores, easy, hard);
    std::vector<double> t1, t2;
    for (double s : scores) {
        t1.push_back(std::exp(3 * s) - 7);
        t2.push_back(std::atan(s) * 100 + s * s);
    }
    CHECK(*mrr(t1, easy, hard) == base);
    CHECK(*mrr(t2, easy, hard) == base);
    CHECK(*mrr(scores, easy, std::vector<EntityId>{1, 0, 5}) == base);
}

TEST_CASE("query records") {
    const QueryRecord r{"r0(e1,x1)&r1(x1,y)", "2p", {3, 1}, {7}};
    const auto line = to_jsonl(r);
    CHECK(line ==
          R"j({"formula":"r0(e1,x1)&r1(x1,y)","type":"2p","easy_answers":[3,1],"hard_answers":[7]})j");
    const auto back = parse_query_record(line);
    CHECK(back.formula == r.formula);
    CHECK(back.easy == std::vector<EntityId>{1, 3});
    CHECK(back.hard == r.hard);

    CHECK_THROWS_AS(parse_query_record("{not json"), ParseError);
    CHECK_THROWS_AS(parse_query_record(R"j({"type":"1p"})j"), ParseError);
    CHECK_THROWS_AS(parse_query_record(R"j({"formula":"x","easy_answers":[1],"hard_answers":[1]})j"),
                    ParseError);
    CHECK_THROWS_AS(parse_query_record(R"j({"formula":"x","hard_answers":[-1]})j"), ParseError);
}

TEST_CASE("run_eval") {
    const auto kg = toy::graph();
    EngineConfig cfg;
    cfg.neural_enabled = false;
    const Engine engine(kg, nullptr, cfg);

    CHECK_THROWS_AS(run_eval(engine, std::vector<std::string>{}), Error);

    // complete graph, symbolic only: nothing is hard, everything is skipped
    const std::vector<std::string> trivial{
        to_jsonl({"r(A,y)", "1p", {1, 2}, {}}),
        to_jsonl({"r(A,x)&s(x,y)", "2p", {3}, {}}),
    };
    CHECK_THROWS_WITH_AS(run_eval(engine, trivial), doctest::Contains("2 of 2"), Error);

    // hard answers given by hand
    std::vector<std::string> lines;
    for (int i = 0; i < 9; ++i) lines.push_back(to_jsonl({"r(A,y)", "1p", {1}, {2}}));
    lines.push_back(to_jsonl({"s(B,y)", "1p-other", {}, {3}}));
    lines.push_back("");
    auto report = run_eval(engine, lines);
    CHECK(report.records == 10);
    CHECK(report.evaluated == 10);
    REQUIRE(report.templates.size() == 2);
    CHECK(report.templates[0].type == "1p");
    CHECK(report.templates[0].queries == 9);
    CHECK(report.templates[0].mrr == 1.0);
    CHECK(report.templates[0].mean_latency_ms >= 0.0);
    CHECK(report.templates[1].mrr == 1.0);

    // one bad record in ten is tolerated, two are not
    lines[0] = "garbage";
    report = run_eval(engine, lines);
    CHECK(report.skipped == 1);
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("record 1") != std::string::npos);
    lines[1] = to_jsonl({"q(A,y)", "1p", {}, {2}});
    CHECK_THROWS_AS(run_eval(engine, lines), Error);

    const auto json = nlohmann::json::parse(report_json(report));
    CHECK(json["templates"][0]["type"] == "1p");
    CHECK(json["config"]["lambda"] == 1.0);
    CHECK(json["skipped"] == 1);
}

TEST_CASE("queries written by the generator evaluate") {
    const auto full = make_random_kg(20, 3, 120, 5);
    const auto observed = hold_out(full, 0.2, 6);
    const auto qs = generate_queries(observed, full, "2p", 10, 7);
    const auto path = std::filesystem::temp_directory_path() / "nsmp_eval_queries.jsonl";
    write_queries(path, qs);
    EngineConfig cfg;
    cfg.neural_enabled = false;
    const Engine engine(observed, nullptr, cfg);
    const auto report = run_eval(engine, path);
    REQUIRE(report.templates.size() == 1);
    CHECK(report.templates[0].queries == 10);
    CHECK(report.templates[0].mrr > 0.0);
    CHECK(report.templates[0].mrr <= 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("fit_exponent") {
    const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
    CHECK(*fit_exponent(x, y) == doctest::Approx(2.0));
    CHECK_FALSE(fit_exponent(std::vector<double>{5}, std::vector<double>{1}).has_value());
    CHECK_FALSE(fit_exponent(std::vector<double>{5, 5}, std::vector<double>{1, 2}).has_value());
}

TEST_CASE("bench_scaling smoke run") {
    BenchOptions opts;
    opts.queries_per_template = 2;
    opts.repeats = 1;
    opts.rank = 4;
    const std::vector<std::string> templates{"2p", "3c"};
    const std::vector<BenchSize> one{{100, 400}};
    auto single = bench_scaling(templates, one, 1, opts);
    CHECK(single.rows.size() == 2);
    CHECK_FALSE(single.fits[0].exponent_vs_edges.has_value());

    const std::vector<BenchSize> two{{100, 400}, {100, 800}};
    auto report = bench_scaling(templates, two, 1, opts);
    CHECK(report.rows.size() == 4);
    CHECK(report.fits[0].exponent_vs_edges.has_value());
    CHECK_FALSE(report.fits[0].exponent_vs_entities.has_value());
    const auto json = nlohmann::json::parse(bench_json(report));
    CHECK(json["rows"].size() == 4);

    const std::vector<BenchSize> descending{{200, 800}, {100, 400}};
    CHECK_THROWS_AS(bench_scaling(templates, descending, 1, opts), Error);
}

TEST_CASE("answer json") {
    const auto kg = toy::graph();
    EngineConfig cfg;
    cfg.neural_enabled = false;
    const Engine engine(kg, nullptr, cfg);
    const auto result = engine.answer_query(parse_formula("r(A,x)&s(x,y)", kg));
    const auto text = answer_json(kg, "r(A,x)&s(x,y)", result, cfg, 2, true);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["answers"][0]["entity"] == "D");
    CHECK(j["answers"][0]["score"] == 1.0);
    CHECK(j["explanations"][0]["variable"] == "x1");
    CHECK(j["branches"][0]["formula"] == "r(A,x1)&s(x1,y)");
    CHECK(answer_json(kg, "r(A,x)&s(x,y)", result, cfg, 2, true) == text);
    CHECK_FALSE(nlohmann::json::parse(answer_json(kg, "q", result, cfg, 2, false))
                    .contains("explanations"));
}
