#pragma once
// Named query shapes (1p ... 3cm) and a seeded generator that grounds them
// on a knowledge graph and labels each query with its easy/hard answers.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsmp/formula.hpp"
#include "nsmp/kg_store.hpp"

namespace nsmp {

// Skeleton placeholders: R0..R5 relations, C0..C2 constants.
struct QueryTemplate {
    std::string name;
    std::string skeleton;
    std::size_t num_relations;
    std::size_t num_constants;
};

const std::vector<QueryTemplate>& query_templates();
const QueryTemplate& find_template(std::string_view name);

// Substitutes ids for placeholders; the result is in canonical numeric form.
std::string instantiate(const QueryTemplate& t, std::span<const RelationId> relations,
                        std::span<const EntityId> constants);

struct GeneratedQuery {
    std::string formula;
    std::string type;
    std::vector<EntityId> easy;
    std::vector<EntityId> hard;
};

struct GenerationOptions {
    // When false the sampler only requires a nonempty answer set over the
    // full graph (used for complete-graph checks where nothing is hard).
    bool require_hard = true;
    std::size_t attempts_per_query = 2000;
    // Reject groundings whose full answer set covers more than this
    // fraction of entities.
    double max_answer_fraction = 1.0;
    // When false no answers are computed and every grounding is accepted;
    // easy/hard stay empty (timing workloads).
    bool check_answers = true;
};

// Deterministic for a fixed seed. `observed` and `full` share a vocabulary.
std::vector<GeneratedQuery> generate_queries(const TripleStore& observed, const TripleStore& full,
                                             std::string_view template_name, std::size_t count,
                                             std::uint64_t seed,
                                             const GenerationOptions& options = {});

}  // namespace nsmp
