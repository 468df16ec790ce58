#include "nsmp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

namespace nsmp {

namespace {

std::pair<Dictionary, Dictionary> vocabulary(std::size_t num_entities,
                                             std::size_t num_relations) {
    Dictionary entities, relations;
    for (std::size_t i = 0; i < num_entities; ++i) entities.get_or_add("ent" + std::to_string(i));
    for (std::size_t i = 0; i < num_relations; ++i) relations.get_or_add("rel" + std::to_string(i));
    return {std::move(entities), std::move(relations)};
}

std::uint32_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

}  // namespace

TripleStore make_random_kg(std::size_t num_entities, std::size_t num_relations,
                           std::size_t num_edges, std::uint64_t seed) {
    if (num_entities == 0 || num_relations == 0)
        throw Error("synthetic graph needs at least one entity and one relation");
    const std::size_t capacity = num_entities * num_entities * num_relations;
    if (num_edges > capacity)
        throw Error("requested " + std::to_string(num_edges) + " edges but only " +
                    std::to_string(capacity) + " are possible");

    std::mt19937_64 rng(seed);
    std::unordered_set<std::uint64_t> seen;
    std::vector<Triple> triples;
    triples.reserve(num_edges);
    while (triples.size() < num_edges) {
        const Triple t{draw(rng, num_entities), draw(rng, num_relations), draw(rng, num_entities)};
        const std::uint64_t key =
            (static_cast<std::uint64_t>(t.relation) * num_entities + t.head) * num_entities + t.tail;
        if (seen.insert(key).second) triples.push_back(t);
    }
    auto [entities, relations] = vocabulary(num_entities, num_relations);
    return TripleStore(std::move(entities), std::move(relations), std::move(triples));
}

TripleStore make_clustered_kg(std::size_t num_entities, std::size_t num_relations,
                              std::size_t num_clusters, std::size_t out_degree,
                              std::uint64_t seed) {
    if (num_clusters == 0 || num_entities < num_clusters || num_relations == 0)
        throw Error("clustered graph needs 1 <= clusters <= entities and a relation");
    const std::size_t smallest = num_entities / num_clusters;
    if (out_degree > smallest)
        throw Error("out degree exceeds the smallest cluster size");

    std::vector<std::vector<EntityId>> members(num_clusters);
    for (std::size_t e = 0; e < num_entities; ++e)
        members[e % num_clusters].push_back(static_cast<EntityId>(e));

    std::mt19937_64 rng(seed);
    std::vector<Triple> triples;
    for (std::size_t r = 0; r < num_relations; ++r) {
        std::vector<std::size_t> target(num_clusters);
        std::iota(target.begin(), target.end(), 0);
        std::shuffle(target.begin(), target.end(), rng);
        for (std::size_t h = 0; h < num_entities; ++h) {
            std::vector<EntityId> pool = members[target[h % num_clusters]];
            std::shuffle(pool.begin(), pool.end(), rng);
            for (std::size_t k = 0; k < out_degree; ++k)
                triples.push_back({static_cast<EntityId>(h), static_cast<RelationId>(r), pool[k]});
        }
    }
    auto [entities, relations] = vocabulary(num_entities, num_relations);
    return TripleStore(std::move(entities), std::move(relations), std::move(triples));
}

TripleStore hold_out(const TripleStore& full, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("hold-out fraction must be in [0, 1]");
    std::vector<Triple> triples = full.triples();
    std::mt19937_64 rng(seed);
    std::shuffle(triples.begin(), triples.end(), rng);
    const auto removed =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(triples.size())));
    triples.resize(triples.size() - removed);
    return full.with_triples(std::move(triples));
}

}  // namespace nsmp
