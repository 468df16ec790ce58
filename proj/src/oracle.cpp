#include "nsmp/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

namespace nsmp {

TripleIndex::TripleIndex(std::span<const Triple> triples, std::size_t num_entities,
                         std::size_t num_relations)
    : num_entities_(num_entities),
      num_relations_(num_relations),
      out_(num_entities * num_relations),
      in_(num_entities * num_relations) {
    for (const auto& t : triples) {
        if (t.head >= num_entities || t.tail >= num_entities || t.relation >= num_relations)
            throw DimensionError("triple out of range");
        if (!edges_.insert(key(t.head, t.relation, t.tail)).second) continue;
        out_[t.relation * num_entities_ + t.head].push_back(t.tail);
        in_[t.relation * num_entities_ + t.tail].push_back(t.head);
    }
}

bool TripleIndex::has(EntityId h, RelationId r, EntityId t) const {
    return edges_.count(key(h, r, t)) > 0;
}

namespace {

// Backtracking search over variable assignments for one conjunction.
class Search {
   public:
    Search(const Conjunction& scq, const TripleIndex& kg) : scq_(scq), kg_(kg) {
        // slot 0 is y, slots 1.. are existentials in first-appearance order
        std::map<std::uint32_t, std::size_t> slot_of;
        for (const auto& a : scq_) {
            for (const Term& t : {a.head, a.tail}) {
                if (t.kind == Term::Kind::Existential && !slot_of.count(t.value))
                    slot_of.emplace(t.value, slot_of.size() + 1);
            }
        }
        if (slot_of.size() > kMaxOracleExistentials)
            throw UnsupportedQuery("oracle refuses branches with more than " +
                                   std::to_string(kMaxOracleExistentials) +
                                   " existential variables");
        num_slots_ = slot_of.size() + 1;
        slot_ = [slot_of](const Term& t) -> std::optional<std::size_t> {
            if (t.kind == Term::Kind::Free) return 0;
            if (t.kind == Term::Kind::Existential) return slot_of.at(t.value);
            return std::nullopt;
        };

        // Assign y first, then repeatedly the variable with the most atoms
        // linking it to already-fixed terms.
        std::vector<bool> placed(num_slots_, false);
        order_.push_back(0);
        placed[0] = true;
        while (order_.size() < num_slots_) {
            std::size_t best = 0;
            int best_links = -1;
            for (std::size_t s = 1; s < num_slots_; ++s) {
                if (placed[s]) continue;
                int links = 0;
                for (const auto& a : scq_) {
                    auto h = slot_(a.head), t = slot_(a.tail);
                    if ((h == s && (!t || placed[*t])) || (t == s && (!h || placed[*h]))) ++links;
                }
                if (links > best_links) {
                    best = s;
                    best_links = links;
                }
            }
            order_.push_back(best);
            placed[best] = true;
        }

        // Atoms become checkable at the depth where their last variable is set.
        position_.assign(num_slots_, 0);
        for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;
        checks_.resize(num_slots_);
        for (std::size_t i = 0; i < scq_.size(); ++i) {
            auto h = slot_(scq_[i].head), t = slot_(scq_[i].tail);
            if (!h && !t) {
                ground_.push_back(i);
                continue;
            }
            std::size_t depth = 0;
            if (h) depth = std::max(depth, position_[*h]);
            if (t) depth = std::max(depth, position_[*t]);
            checks_[depth].push_back(i);
        }
        value_.assign(num_slots_, 0);
    }

    std::vector<EntityId> answers() {
        for (auto i : ground_)
            if (!holds(scq_[i])) return {};
        std::vector<EntityId> out;
        for (EntityId y : candidates(0)) {
            value_[0] = y;
            if (consistent(0) && extend(1)) out.push_back(y);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

   private:
    EntityId value(const Term& t) const {
        auto s = slot_(t);
        return s ? value_[*s] : t.value;
    }

    bool holds(const Atom& a) const {
        const bool edge = kg_.has(value(a.head), a.relation, value(a.tail));
        return a.negated ? !edge : edge;
    }

    bool consistent(std::size_t depth) const {
        for (auto i : checks_[depth])
            if (!holds(scq_[i])) return false;
        return true;
    }

    bool extend(std::size_t depth) {
        if (depth == num_slots_) return true;
        const std::size_t s = order_[depth];
        for (EntityId v : candidates(depth)) {
            value_[s] = v;
            if (consistent(depth) && extend(depth + 1)) return true;
        }
        return false;
    }

    // Smallest adjacency list from a positive atom tying the slot at `depth`
    // to a fixed term; every entity if there is none.
    std::vector<EntityId> candidates(std::size_t depth) const {
        const std::size_t s = order_[depth];
        const std::vector<EntityId>* best = nullptr;
        for (const auto& a : scq_) {
            if (a.negated) continue;
            auto h = slot_(a.head), t = slot_(a.tail);
            const std::vector<EntityId>* list = nullptr;
            if (t == s && h != s && (!h || position_[*h] < depth))
                list = &kg_.successors(a.relation, value(a.head));
            else if (h == s && t != s && (!t || position_[*t] < depth))
                list = &kg_.predecessors(a.relation, value(a.tail));
            if (list && (!best || list->size() < best->size())) best = list;
        }
        if (best) return *best;
        std::vector<EntityId> all(kg_.num_entities());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<EntityId>(i);
        return all;
    }

    const Conjunction& scq_;
    const TripleIndex& kg_;
    std::size_t num_slots_ = 1;
    std::function<std::optional<std::size_t>(const Term&)> slot_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> position_;
    std::vector<std::vector<std::size_t>> checks_;
    std::vector<std::size_t> ground_;
    std::vector<EntityId> value_;
};

}  // namespace

std::vector<EntityId> enumerate_answers(const Conjunction& scq, const TripleIndex& kg) {
    return Search(scq, kg).answers();
}

std::vector<EntityId> enumerate_answers(const Formula& f, const TripleIndex& kg) {
    std::vector<EntityId> out;
    for (const auto& branch : to_dnf(f)) {
        auto part = enumerate_answers(branch, kg);
        std::vector<EntityId> merged;
        std::set_union(out.begin(), out.end(), part.begin(), part.end(),
                       std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

AnswerSplit split_answers(const Formula& f, const TripleIndex& observed, const TripleIndex& full) {
    AnswerSplit split;
    split.easy = enumerate_answers(f, observed);
    auto all = enumerate_answers(f, full);
    std::set_difference(all.begin(), all.end(), split.easy.begin(), split.easy.end(),
                        std::back_inserter(split.hard));
    return split;
}

AnswerSplit split_answers(const Formula& f, const TripleStore& observed, const TripleStore& full) {
    if (observed.num_entities() != full.num_entities() ||
        observed.num_relations() != full.num_relations())
        throw DimensionError("observed and full graphs use different vocabularies");
    for (const auto& t : observed.triples())
        if (!full.contains(t)) throw Error("observed graph is not a subset of the full graph");
    return split_answers(f, TripleIndex(observed), TripleIndex(full));
}

}  // namespace nsmp
