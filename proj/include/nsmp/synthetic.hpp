#pragma once
// Seeded synthetic knowledge graphs for tests and benchmarks. Entity and
// relation labels are `ent<i>` and `rel<i>`.

#include <cstdint>

#include "nsmp/kg_store.hpp"

namespace nsmp {

// `num_edges` distinct triples drawn uniformly from V x R x V.
TripleStore make_random_kg(std::size_t num_entities, std::size_t num_relations,
                           std::size_t num_edges, std::uint64_t seed);

// Entities are split round-robin into `num_clusters` groups and each relation
// maps every group onto one target group (a random permutation per
// relation). Every entity gets `out_degree` distinct tails per relation, all
// drawn from the target group, so held-out edges are predictable from the
// remaining ones.
TripleStore make_clustered_kg(std::size_t num_entities, std::size_t num_relations,
                              std::size_t num_clusters, std::size_t out_degree,
                              std::uint64_t seed);

// Same vocabulary, with round(fraction * |triples|) triples removed at random.
TripleStore hold_out(const TripleStore& full, double fraction, std::uint64_t seed);

}  // namespace nsmp
