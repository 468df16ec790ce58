#pragma once
// Knowledge graph storage: dense id dictionaries, a deduplicated triple list,
// and lazily built per-relation boolean adjacency matrices (row-compressed).

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nsmp/fuzzy.hpp"
#include "nsmp/relation_matrix.hpp"
#include "nsmp/types.hpp"

namespace nsmp {

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Label <-> dense id mapping in first-appearance order.
class Dictionary {
   public:
    EntityId get_or_add(std::string_view label);
    std::optional<std::uint32_t> find(std::string_view label) const;
    const std::string& label(std::uint32_t id) const { return labels_.at(id); }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

   private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

class TripleStore {
   public:
    TripleStore() = default;
    TripleStore(Dictionary entities, Dictionary relations, std::vector<Triple> triples);

    TripleStore(const TripleStore& other);
    TripleStore& operator=(const TripleStore& other);
    TripleStore(TripleStore&&) noexcept;
    TripleStore& operator=(TripleStore&&) noexcept;
    ~TripleStore();

    std::size_t num_entities() const { return entities_.size(); }
    std::size_t num_relations() const { return relations_.size(); }
    std::size_t num_triples() const { return triples_.size(); }

    const Dictionary& entities() const { return entities_; }
    const Dictionary& relations() const { return relations_; }
    const std::vector<Triple>& triples() const { return triples_; }

    bool contains(const Triple& t) const;

    // M_r, or M_r^T when transposed. Built on first use and cached; the
    // returned reference stays valid for the lifetime of the store.
    const RelationMatrix& adjacency(RelationId r, bool transposed) const;

    // Matrix whose rows are scattered when propagating in direction d.
    const RelationMatrix& oriented(RelationId r, Direction d) const {
        return adjacency(r, d == Direction::TailToHead);
    }

    // Same vocabulary, subset of triples. Every triple must be in range.
    TripleStore with_triples(std::vector<Triple> triples) const;

    FuzzyVec one_hot(EntityId e) const;

   private:
    Dictionary entities_;
    Dictionary relations_;
    std::vector<Triple> triples_;  // sorted, unique

    struct Cache;
    std::unique_ptr<Cache> cache_;
};

// mu over relation r of `kg`, oriented by direction.
FuzzyVec mu(const FuzzyVec& p, const TripleStore& kg, RelationId r, Direction direction,
            Polarity polarity, double alpha, double eps = kDefaultEpsilon);

// Reads `head<TAB>relation<TAB>tail` lines. When `vocab` is given, labels are
// resolved against its dictionaries (unknown labels are an error) so the
// result shares ids with it; otherwise ids are assigned by first appearance.
TripleStore load_triples(const std::filesystem::path& path, const TripleStore* vocab = nullptr);
TripleStore parse_triples(std::string_view text, const TripleStore* vocab = nullptr);

void write_triples(const TripleStore& store, const std::filesystem::path& path);

// `label<TAB>id` lines, one per entity.
void write_entity_ids(const TripleStore& store, const std::filesystem::path& path);

}  // namespace nsmp
