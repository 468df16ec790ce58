#pragma once
// Brute-force ground truth for EFO-1 queries by exhaustive assignment search.
// Deliberately independent of the sparse matrices used by the engine.

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "nsmp/formula.hpp"
#include "nsmp/kg_store.hpp"

namespace nsmp {

inline constexpr std::size_t kMaxOracleExistentials = 4;

// Adjacency lists plus a membership set over a plain triple list.
class TripleIndex {
   public:
    TripleIndex(std::span<const Triple> triples, std::size_t num_entities,
                std::size_t num_relations);
    explicit TripleIndex(const TripleStore& store)
        : TripleIndex(store.triples(), store.num_entities(), store.num_relations()) {}

    std::size_t num_entities() const { return num_entities_; }
    bool has(EntityId h, RelationId r, EntityId t) const;
    const std::vector<EntityId>& successors(RelationId r, EntityId h) const {
        return out_[r * num_entities_ + h];
    }
    const std::vector<EntityId>& predecessors(RelationId r, EntityId t) const {
        return in_[r * num_entities_ + t];
    }

   private:
    std::uint64_t key(EntityId h, RelationId r, EntityId t) const {
        return (static_cast<std::uint64_t>(r) * num_entities_ + h) * num_entities_ + t;
    }

    std::size_t num_entities_;
    std::size_t num_relations_;
    std::vector<std::vector<EntityId>> out_;
    std::vector<std::vector<EntityId>> in_;
    std::unordered_set<std::uint64_t> edges_;
};

// Sorted answer ids. Throws UnsupportedQuery when a branch has more than
// kMaxOracleExistentials existential variables.
std::vector<EntityId> enumerate_answers(const Conjunction& scq, const TripleIndex& kg);
std::vector<EntityId> enumerate_answers(const Formula& f, const TripleIndex& kg);

struct AnswerSplit {
    std::vector<EntityId> easy;  // answers over the observed graph
    std::vector<EntityId> hard;  // answers over the full graph that are not easy
};

// Requires observed to be a subset of full (same vocabulary).
AnswerSplit split_answers(const Formula& f, const TripleStore& observed, const TripleStore& full);
AnswerSplit split_answers(const Formula& f, const TripleIndex& observed, const TripleIndex& full);

}  // namespace nsmp
