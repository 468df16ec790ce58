#include "nsmp/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace nsmp {

RelationMatrix::RelationMatrix(std::size_t dim,
                               std::span<const std::pair<EntityId, EntityId>> entries)
    : offsets_(dim + 1, 0) {
    for (const auto& [i, j] : entries) {
        if (i >= dim || j >= dim) throw DimensionError("relation matrix entry out of range");
        ++offsets_[i + 1];
    }
    for (std::size_t i = 0; i < dim; ++i) offsets_[i + 1] += offsets_[i];

    columns_.resize(entries.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [i, j] : entries) columns_[cursor[i]++] = j;

    for (std::size_t i = 0; i < dim; ++i) {
        auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last)
            throw Error("relation matrix has duplicate entries");
    }
}

bool RelationMatrix::contains(EntityId i, EntityId j) const {
    if (i >= dim()) return false;
    auto r = row(i);
    return std::binary_search(r.begin(), r.end(), j);
}

EntityId Dictionary::get_or_add(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

struct TripleStore::Cache {
    std::mutex mutex;
    // index 2r is M_r, 2r+1 is M_r^T
    std::vector<std::unique_ptr<RelationMatrix>> matrices;
};

TripleStore::TripleStore(Dictionary entities, Dictionary relations, std::vector<Triple> triples)
    : entities_(std::move(entities)),
      relations_(std::move(relations)),
      triples_(std::move(triples)),
      cache_(std::make_unique<Cache>()) {
    for (const auto& t : triples_) {
        if (t.head >= entities_.size() || t.tail >= entities_.size() ||
            t.relation >= relations_.size())
            throw DimensionError("triple id out of range");
    }
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    cache_->matrices.resize(2 * relations_.size());
}

TripleStore::TripleStore(const TripleStore& other)
    : TripleStore(other.entities_, other.relations_, other.triples_) {}

TripleStore& TripleStore::operator=(const TripleStore& other) {
    if (this != &other) *this = TripleStore(other);
    return *this;
}

TripleStore::TripleStore(TripleStore&&) noexcept = default;
TripleStore& TripleStore::operator=(TripleStore&&) noexcept = default;
TripleStore::~TripleStore() = default;

bool TripleStore::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

const RelationMatrix& TripleStore::adjacency(RelationId r, bool transposed) const {
    if (r >= relations_.size())
        throw DimensionError("relation id " + std::to_string(r) + " out of range");
    std::lock_guard lock(cache_->mutex);
    auto& slot = cache_->matrices[2 * r + (transposed ? 1 : 0)];
    if (!slot) {
        // triples_ is sorted by relation after head, so scan the whole list
        std::vector<std::pair<EntityId, EntityId>> entries;
        for (const auto& t : triples_) {
            if (t.relation != r) continue;
            if (transposed)
                entries.emplace_back(t.tail, t.head);
            else
                entries.emplace_back(t.head, t.tail);
        }
        slot = std::make_unique<RelationMatrix>(entities_.size(), entries);
    }
    return *slot;
}

TripleStore TripleStore::with_triples(std::vector<Triple> triples) const {
    return TripleStore(entities_, relations_, std::move(triples));
}

FuzzyVec TripleStore::one_hot(EntityId e) const {
    if (e >= entities_.size())
        throw DimensionError("entity id " + std::to_string(e) + " out of range");
    return FuzzyVec(entities_.size(), {{e, 1.0}});
}

FuzzyVec mu(const FuzzyVec& p, const TripleStore& kg, RelationId r, Direction direction,
            Polarity polarity, double alpha, double eps) {
    return mu(p, kg.oriented(r, direction), polarity, alpha, eps);
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

TripleStore parse_triples(std::string_view text, const TripleStore* vocab) {
    Dictionary entities;
    Dictionary relations;
    std::vector<Triple> triples;

    auto resolve = [&](const Dictionary& dict, std::string_view label, std::size_t line_no,
                       const char* kind) {
        auto id = dict.find(label);
        if (!id)
            throw ParseError("line " + std::to_string(line_no) + ": unknown " + kind + " '" +
                             std::string(label) + "'");
        return *id;
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        auto fields = split_tabs(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected head<TAB>relation<TAB>tail");
        Triple t{};
        if (vocab) {
            t.head = resolve(vocab->entities(), fields[0], line_no, "entity");
            t.relation = resolve(vocab->relations(), fields[1], line_no, "relation");
            t.tail = resolve(vocab->entities(), fields[2], line_no, "entity");
        } else {
            t.head = entities.get_or_add(fields[0]);
            t.relation = relations.get_or_add(fields[1]);
            t.tail = entities.get_or_add(fields[2]);
        }
        triples.push_back(t);
    }
    if (triples.empty()) throw ParseError("triple file contains no triples");

    if (vocab) return vocab->with_triples(std::move(triples));
    return TripleStore(std::move(entities), std::move(relations), std::move(triples));
}

TripleStore load_triples(const std::filesystem::path& path, const TripleStore* vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open triple file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_triples(buf.str(), vocab);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_triples(const TripleStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& t : store.triples()) {
        out << store.entities().label(t.head) << '\t' << store.relations().label(t.relation)
            << '\t' << store.entities().label(t.tail) << '\n';
    }
}

void write_entity_ids(const TripleStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    const auto& labels = store.entities().labels();
    for (std::size_t i = 0; i < labels.size(); ++i) out << labels[i] << '\t' << i << '\n';
}

}  // namespace nsmp
