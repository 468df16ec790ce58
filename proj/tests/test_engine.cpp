#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "nsmp/engine.hpp"
#include "toy_graph.hpp"

using namespace nsmp;

namespace {

EngineConfig symbolic(double alpha = 4.0) {
    EngineConfig cfg;
    cfg.neural_enabled = false;
    cfg.alpha = alpha;
    return cfg;
}

QueryGraph graph_of(const TripleStore& kg, std::string_view text) {
    return build_graph(to_dnf(parse_formula(text, kg))[0]);
}

ComplexEmbeddingTable random_table(std::size_t nv, std::size_t nr, std::size_t rank,
                                   std::uint64_t seed) {
    ComplexEmbeddingTable t(nv, nr, rank);
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n(0.0f, 1.0f);
    for (auto* a : {&t.entity_real(), &t.entity_imag(), &t.relation_real(), &t.relation_imag()})
        for (float& x : *a) x = n(rng);
    return t;
}

}  // namespace

TEST_CASE("config validation") {
    const auto kg = toy::graph();
    EngineConfig cfg = symbolic();
    cfg.epsilon = 0;
    CHECK_THROWS_AS(Engine(kg, nullptr, cfg), Error);
    cfg = symbolic();
    cfg.lambda = 1.5;
    CHECK_THROWS_AS(Engine(kg, nullptr, cfg), Error);
    cfg = symbolic();
    cfg.alpha = -1;
    CHECK_THROWS_AS(Engine(kg, nullptr, cfg), Error);
    CHECK_THROWS_AS(Engine(kg, nullptr, EngineConfig{}), Error);
    const ComplexEmbeddingTable wrong(5, 2, 3);
    CHECK_THROWS_AS(Engine(kg, &wrong, EngineConfig{}), DimensionError);
}

TEST_CASE("encode_message") {
    const auto kg = toy::graph();
    const Engine engine(kg, nullptr, symbolic());
    const auto g = graph_of(kg, "r(A,y)");
    const auto states = engine.initial_states(g);
    CHECK(engine.encode_message(states[0], toy::r, Direction::HeadToTail, Polarity::Positive) ==
          FuzzyVec(4, {{toy::B, 0.5}, {toy::C, 0.5}}));
    NodeState empty;
    empty.symbolic = FuzzyVec(4);
    CHECK(engine.encode_message(empty, toy::r, Direction::HeadToTail, Polarity::Positive).empty());

    // all-zero embeddings: f is uniform (0.25 each), plus {B:.5, C:.5}
    const ComplexEmbeddingTable zeros(4, 2, 2);
    EngineConfig cfg;
    const Engine neural(kg, &zeros, cfg);
    const auto ns = neural.initial_states(g);
    const auto m = neural.encode_message(ns[0], toy::r, Direction::HeadToTail, Polarity::Positive);
    CHECK(m.weight(0) == doctest::Approx(0.125));
    CHECK(m.weight(1) == doctest::Approx(0.375));
    CHECK(m.weight(2) == doctest::Approx(0.375));
    CHECK(m.weight(3) == doctest::Approx(0.125));
}

TEST_CASE("initial states") {
    const auto kg = toy::graph();
    const auto table = random_table(4, 2, 3, 1);
    const Engine engine(kg, &table, EngineConfig{});
    const auto g = graph_of(kg, "r(A,x)&s(x,y)");
    const auto states = engine.initial_states(g);
    CHECK(states[0].updated);
    CHECK(states[0].symbolic == kg.one_hot(toy::A));
    CHECK(states[0].neural == table.entity(toy::A));
    CHECK_FALSE(states[1].updated);
    CHECK(states[1].symbolic.empty());
    CHECK(states[1].neural == ComplexVec(3));
}

TEST_CASE("2p pruning trace") {
    const auto kg = toy::graph();
    const Engine engine(kg, nullptr, symbolic());
    const auto g = graph_of(kg, "r(A,x)&s(x,y)");
    const std::size_t x = 1, y = 2;
    auto states = engine.initial_states(g);

    CHECK(engine.layer_step(g, states, 1) == 1);
    CHECK(states[x].updated);
    CHECK(states[x].symbolic == FuzzyVec(4, {{toy::B, 0.5}, {toy::C, 0.5}}));
    CHECK_FALSE(states[y].updated);

    // layer 2: y from x; x from A only (y was not updated after layer 1)
    CHECK(engine.layer_step(g, states, 2) == 2);
    CHECK(states[y].symbolic == FuzzyVec(4, {{toy::D, 1.0}}));
    CHECK(states[y].first_update_layer == 2);
    CHECK(states[x].last_update_layer == 2);

    // layer 3: x now also hears from y
    CHECK(engine.layer_step(g, states, 3) == 3);
    CHECK_THROWS_AS(engine.layer_step(g, states, 0), Error);
}

TEST_CASE("3i aggregates three messages in the first layer") {
    const auto kg = parse_triples("a\tp\tz\nb\tq\tz\nc\tp\tz\nc\tp\tw\n");
    const Engine engine(kg, nullptr, symbolic(4.0));
    const auto g = graph_of(kg, "p(a,y)&q(b,y)&p(c,y)");
    auto states = engine.initial_states(g);
    CHECK(engine.layer_step(g, states, 1) == 3);
    CHECK(states[g.free_node()].symbolic.support() == std::vector<EntityId>{1});
}

TEST_CASE("without pruning, unreached neighbors still send (empty) messages") {
    const auto kg = toy::graph();
    EngineConfig cfg = symbolic();
    cfg.dynamic_pruning = false;
    const Engine engine(kg, nullptr, cfg);
    const auto g = graph_of(kg, "r(A,x)&s(x,y)");
    auto states = engine.initial_states(g);
    CHECK(engine.layer_step(g, states, 1) == 3);
    // y aggregated the empty message from x
    CHECK(states[2].updated);
    CHECK(states[2].symbolic.empty());
    // x combined A's message with the empty message from y
    CHECK(states[1].symbolic.empty());
}

TEST_CASE("answers on the toy graph") {
    const auto kg = toy::graph();
    const Engine engine(kg, nullptr, symbolic());
    auto two_p = engine.answer_query(parse_formula("r(A,x)&s(x,y)", kg));
    CHECK(two_p.scores == std::vector<double>{0, 0, 0, 1});
    REQUIRE(two_p.branches.size() == 1);
    CHECK(two_p.branches[0].depth == 2);
    CHECK(two_p.branches[0].layers == 3);
    CHECK(two_p.branches[0].messages == 1 + 2 + 3);
    CHECK(two_p.warnings.empty());

    auto listing = explain(two_p, 2);
    REQUIRE(listing.size() == 2);
    CHECK(listing[0].name == "x1");
    REQUIRE(listing[0].top.size() == 2);
    CHECK(listing[0].top[0].id == toy::B);
    CHECK(listing[0].top[0].weight == doctest::Approx(0.5));
    CHECK(listing[0].top[1].id == toy::C);
    CHECK(listing[1].name == "y");
    REQUIRE(listing[1].top.size() == 1);
    CHECK(listing[1].top[0].id == toy::D);
    CHECK(explain(two_p, 1)[0].top.size() == 1);

    // union of two 1p branches
    auto u = engine.answer_query(parse_formula("r(A,y)|s(B,y)", kg));
    CHECK(u.scores == std::vector<double>{0, 0.5, 0.5, 1.0});
    CHECK(u.branches.size() == 2);

    // an unsatisfiable branch does not disturb the other
    auto v = engine.answer_query(parse_formula("s(A,y)|s(B,y)", kg));
    CHECK(v.scores == std::vector<double>{0, 0, 0, 1.0});

    // contradictory query: y is updated but empty
    auto c = engine.answer_query(parse_formula("r(A,y)&!r(A,y)", kg));
    CHECK(c.scores == std::vector<double>{0, 0, 0, 0});
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("empty fuzzy state") != std::string::npos);
    CHECK(explain(c, 3)[0].top.empty());
}

TEST_CASE("layer policy") {
    const auto kg = toy::graph();
    EngineConfig cfg = symbolic();
    cfg.layers = LayerPolicy::fixed(1);
    const auto g = graph_of(kg, "r(A,x)&s(x,y)");
    CHECK_THROWS_AS(Engine(kg, nullptr, cfg).resolve_layers(g), Error);
    cfg.layers = LayerPolicy::fixed(5);
    CHECK(Engine(kg, nullptr, cfg).resolve_layers(g) == 5);
    cfg.layers = LayerPolicy::automatic(0);
    CHECK(Engine(kg, nullptr, cfg).resolve_layers(g) == 2);
    // L = D reaches y exactly once
    auto r = Engine(kg, nullptr, cfg).answer_query(parse_formula("r(A,x)&s(x,y)", kg));
    CHECK(r.scores[toy::D] == 1.0);
}

TEST_CASE("symbolic_to_neural") {
    const auto kg = toy::graph();
    const auto table = random_table(4, 2, 3, 7);
    const Engine engine(kg, &table, EngineConfig{});
    CHECK(engine.symbolic_to_neural(FuzzyVec(4, {{2, 1.0}})) == table.entity(2));
    const auto mix = engine.symbolic_to_neural(FuzzyVec(4, {{0, 0.25}, {3, 0.75}}));
    const auto a = table.entity(0), b = table.entity(3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(mix[k].real() == doctest::Approx(0.25 * a[k].real() + 0.75 * b[k].real()));
        CHECK(mix[k].imag() == doctest::Approx(0.25 * a[k].imag() + 0.75 * b[k].imag()));
    }
    CHECK(engine.symbolic_to_neural(FuzzyVec(4)) == ComplexVec(3));
}

TEST_CASE("answer blend") {
    const auto kg = toy::graph();
    const auto table = random_table(4, 2, 6, 8);
    EngineConfig cfg;
    cfg.lambda = 1.0;
    const Engine sym_only(kg, &table, cfg);
    // lambda = 1: scores equal y's symbolic state
    const auto r1 = sym_only.answer_query(parse_formula("r(A,y)", kg));
    const auto& y = r1.branches[0].variables.back();
    CHECK(y.name == "y");
    CHECK(r1.scores == y.state.to_dense());

    // lambda = 0: a softmax over cosine similarities
    cfg.lambda = 0.0;
    const Engine neural_only(kg, &table, cfg);
    const auto r0 = neural_only.answer_query(parse_formula("r(A,x)&s(x,y)", kg));
    double sum = 0;
    for (double s : r0.scores) sum += s;
    CHECK(sum == doctest::Approx(1.0));

    // scaling entity embeddings keeps the lambda = 0 argmax
    auto scaled = table;
    scaled.scale_entities(3.5);
    const Engine neural_scaled(kg, &scaled, cfg);
    const auto rs = neural_scaled.answer_query(parse_formula("r(A,x)&s(x,y)", kg));
    CHECK(top_k(rs.scores, 1)[0].id == top_k(r0.scores, 1)[0].id);
}

TEST_CASE("free variable is unreached before depth layers; fewer layers are refused") {
    const auto kg = toy::graph();
    const auto table = random_table(4, 2, 3, 9);
    EngineConfig cfg;
    cfg.layers = LayerPolicy::fixed(2);
    const Engine engine(kg, &table, cfg);
    const auto g = graph_of(kg, "r(A,x1)&s(x1,x2)&r(x2,y)");
    // fixed(2) < depth 3 is refused, so drive layers by hand
    auto states = engine.initial_states(g);
    engine.layer_step(g, states, 1);
    engine.layer_step(g, states, 2);
    CHECK_FALSE(states[g.free_node()].updated);
    CHECK_THROWS_AS(engine.answer_query(parse_formula("r(A,x1)&s(x1,x2)&r(x2,y)", kg)), Error);
}

TEST_CASE("top_k breaks ties by id") {
    const std::vector<double> s{0.2, 0.5, 0.5, 0.1};
    auto t = top_k(s, 3);
    REQUIRE(t.size() == 3);
    CHECK(t[0].id == 1);
    CHECK(t[1].id == 2);
    CHECK(t[2].id == 0);
    CHECK(top_k(s, 10).size() == 4);
}

TEST_CASE("determinism") {
    const auto kg = toy::graph();
    const auto table = random_table(4, 2, 5, 10);
    const Engine engine(kg, &table, EngineConfig{});
    const auto f = parse_formula("r(A,x)&s(x,y)&!r(A,y)", kg);
    CHECK(engine.answer_query(f).scores == engine.answer_query(f).scores);
}
