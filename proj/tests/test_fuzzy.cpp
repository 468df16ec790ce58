#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "nsmp/fuzzy.hpp"
#include "toy_graph.hpp"

using namespace nsmp;

namespace {

// Straight transcription of the thresholded normalization, dense in, dense out.
std::vector<double> reference_normalize(std::vector<double> v, double eps) {
    double sum = 0;
    for (double& x : v) {
        if (x < eps) x = 0;
        sum += x;
    }
    for (double& x : v) x /= std::max(eps, sum);
    return v;
}

RelationMatrix dense_matrix(const std::vector<std::vector<int>>& m) {
    std::vector<std::pair<EntityId, EntityId>> entries;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j)
            if (m[i][j]) entries.emplace_back(i, j);
    return RelationMatrix(m.size(), entries);
}

}  // namespace

TEST_CASE("FuzzyVec rejects unsorted ids and nonpositive weights") {
    CHECK_THROWS_AS(FuzzyVec(4, {{2, 0.5}, {1, 0.5}}), Error);
    CHECK_THROWS_AS(FuzzyVec(4, {{1, 0.5}, {1, 0.5}}), Error);
    CHECK_THROWS_AS(FuzzyVec(4, {{1, 0.0}}), Error);
    CHECK_THROWS_AS(FuzzyVec(4, {{4, 1.0}}), Error);
    FuzzyVec v(4, {{1, 0.25}, {3, 0.75}});
    CHECK(v.weight(3) == 0.75);
    CHECK(v.weight(2) == 0.0);
    CHECK(v.support() == std::vector<EntityId>{1, 3});
    CHECK(v.to_dense() == std::vector<double>{0, 0.25, 0, 0.75});
}

TEST_CASE("normalize examples") {
    auto a = normalize(std::vector<double>{0.2, 0.2, 0, 0});
    CHECK(a == FuzzyVec(4, {{0, 0.5}, {1, 0.5}}));
    CHECK(normalize(std::vector<double>{0, 0, 0}).empty());
    auto b = normalize(std::vector<double>{0.5, 1e-20});
    CHECK(b == FuzzyVec(2, {{0, 1.0}}));
    // negative inputs are clamped before thresholding
    CHECK(normalize(std::vector<double>{-1.0, 3.0}) == FuzzyVec(2, {{1, 1.0}}));
    // the indicator keeps weights equal to eps
    CHECK(normalize(std::vector<double>{1e-14, 0}, 1e-14).size() == 1);
}

TEST_CASE("normalize with a large threshold") {
    auto v = normalize(std::vector<double>{0.5, 0.25}, 1.0);
    CHECK(v.empty());
    auto w = normalize(std::vector<double>{2.0, 0.5}, 1.0);
    CHECK(w == FuzzyVec(2, {{0, 1.0}}));
}

TEST_CASE("normalize is not idempotent when a survivor falls below eps after scaling") {
    // 1e-14 survives the first pass (>= eps) but becomes 1e-14 / 2 afterwards.
    auto once = normalize(std::vector<double>{1.0, 1e-14}, 1e-14);
    CHECK(once.size() == 2);
    auto twice = normalize(once, 1e-14);
    CHECK(twice.size() == 1);
}

TEST_CASE("normalize agrees with a dense transcription") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(12);
        for (double& x : v) x = u(rng) < 0.4 ? 0.0 : u(rng) - 0.1;
        auto got = normalize(v).to_dense();
        auto want = reference_normalize(v, kDefaultEpsilon);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-15));
    }
}

TEST_CASE("mu on the toy graph") {
    const auto kg = toy::graph();
    const auto a = kg.one_hot(toy::A);
    CHECK(mu(a, kg, toy::r, Direction::HeadToTail, Polarity::Positive, 4.0) ==
          FuzzyVec(4, {{toy::B, 0.5}, {toy::C, 0.5}}));
    CHECK(mu(a, kg, toy::r, Direction::HeadToTail, Polarity::Negative, 4.0) ==
          FuzzyVec(4, {{toy::A, 0.5}, {toy::D, 0.5}}));
    CHECK(mu(FuzzyVec(4), kg, toy::r, Direction::HeadToTail, Polarity::Positive, 4.0).empty());
    // tail -> head walks the transpose
    CHECK(mu(kg.one_hot(toy::D), kg, toy::s, Direction::TailToHead, Polarity::Positive, 4.0) ==
          FuzzyVec(4, {{toy::B, 0.5}, {toy::C, 0.5}}));
    // weights propagate: 0.25 A + 0.75 B over s reaches D with all of B's mass
    FuzzyVec p(4, {{toy::A, 0.25}, {toy::B, 0.75}});
    CHECK(mu(p, kg, toy::s, Direction::HeadToTail, Polarity::Positive, 4.0) ==
          FuzzyVec(4, {{toy::D, 1.0}}));
}

TEST_CASE("mu negative with alpha below |V| clamps negative coordinates") {
    const auto kg = toy::graph();
    // alpha/|V| = 0.25; p*M = [0, .5, .5, 0] -> [.25, -.25, -.25, .25] -> clamp
    FuzzyVec p(4, {{toy::A, 0.5}, {toy::B, 0.5}});
    auto pm = propagate_dense(p, kg.oriented(toy::r, Direction::HeadToTail));
    CHECK(pm == std::vector<double>{0, 0.5, 0.5, 0});
    CHECK(mu(p, kg, toy::r, Direction::HeadToTail, Polarity::Negative, 1.0) ==
          FuzzyVec(4, {{toy::A, 0.5}, {toy::D, 0.5}}));
}

TEST_CASE("mu dimension mismatch") {
    const auto kg = toy::graph();
    CHECK_THROWS_AS(mu(FuzzyVec(5), kg.oriented(0, Direction::HeadToTail), Polarity::Positive, 1.0),
                    DimensionError);
}

TEST_CASE("mu matches dense matrix arithmetic") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 7;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<int>> m(n, std::vector<int>(n));
        for (auto& row : m)
            for (int& x : row) x = u(rng) < 0.3;
        const auto M = dense_matrix(m);
        std::vector<double> dense(n);
        for (double& x : dense) x = u(rng) < 0.5 ? 0.0 : u(rng);
        const auto p = normalize(dense);
        const auto pd = p.to_dense();
        std::vector<double> prod(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) prod[j] += pd[i] * m[i][j];
        const double alpha = 3.0;
        std::vector<double> neg(n);
        for (std::size_t j = 0; j < n; ++j) neg[j] = std::max(0.0, alpha / n - prod[j]);

        auto pos_got = mu(p, M, Polarity::Positive, alpha).to_dense();
        auto neg_got = mu(p, M, Polarity::Negative, alpha).to_dense();
        auto pos_want = reference_normalize(prod, kDefaultEpsilon);
        auto neg_want = reference_normalize(neg, kDefaultEpsilon);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(pos_got[j] == doctest::Approx(pos_want[j]).epsilon(1e-12));
            CHECK(neg_got[j] == doctest::Approx(neg_want[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("hadamard_aggregate") {
    FuzzyVec m1(4, {{0, 0.5}, {1, 0.5}});
    FuzzyVec m2(4, {{0, 1.0}});
    std::vector<FuzzyVec> both{m1, m2};
    CHECK(hadamard_aggregate(both) == FuzzyVec(4, {{0, 1.0}}));

    FuzzyVec raw(4, {{1, 2.0}, {3, 6.0}});
    std::vector<FuzzyVec> single{raw};
    CHECK(hadamard_aggregate(single) == normalize(raw));

    std::vector<FuzzyVec> disjoint{FuzzyVec(4, {{0, 1.0}}), FuzzyVec(4, {{2, 1.0}})};
    CHECK(hadamard_aggregate(disjoint).empty());

    // [.2,.8] o [.5,.5] = [.1,.4] -> [.2,.8]
    std::vector<FuzzyVec> weighted{FuzzyVec(2, {{0, 0.2}, {1, 0.8}}),
                                   FuzzyVec(2, {{0, 0.5}, {1, 0.5}})};
    auto h = hadamard_aggregate(weighted);
    CHECK(h.weight(0) == doctest::Approx(0.2));
    CHECK(h.weight(1) == doctest::Approx(0.8));

    CHECK_THROWS_AS(hadamard_aggregate(std::vector<FuzzyVec>{}), Error);
    std::vector<FuzzyVec> mismatch{FuzzyVec(3), FuzzyVec(4)};
    CHECK_THROWS_AS(hadamard_aggregate(mismatch), DimensionError);
}

TEST_CASE("union of branch scores") {
    std::vector<std::vector<double>> b{{0.1, 0.9}, {0.8, 0.2}};
    CHECK(union_max(b) == std::vector<double>{0.8, 0.9});
    std::vector<std::vector<double>> one{{0.3, 0.7}};
    CHECK(union_max(one) == one[0]);
    std::vector<std::vector<double>> zero{{0, 0}, {0.4, 0.6}};
    CHECK(union_max(zero) == zero[1]);
    auto ps = union_scores(b, UnionRule::ProbabilisticSum);
    CHECK(ps[0] == doctest::Approx(0.1 + 0.8 - 0.08));
    CHECK(ps[1] == doctest::Approx(0.9 + 0.2 - 0.18));
    CHECK_THROWS_AS(union_max(std::vector<std::vector<double>>{}), Error);
}

TEST_CASE("debug dump") {
    std::ostringstream os;
    write_debug(os, FuzzyVec(4, {{1, 0.1}, {3, 0.9}}));
    CHECK(os.str() == "1\t0.10000000000000001\n3\t0.90000000000000002\n");
}
