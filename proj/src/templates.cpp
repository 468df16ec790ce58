#include "nsmp/templates.hpp"

#include <optional>
#include <random>

#include "nsmp/oracle.hpp"

namespace nsmp {

const std::vector<QueryTemplate>& query_templates() {
    static const std::vector<QueryTemplate> templates = {
        {"1p", "R0(C0,y)", 1, 1},
        {"2p", "R0(C0,x1)&R1(x1,y)", 2, 1},
        {"3p", "R0(C0,x1)&R1(x1,x2)&R2(x2,y)", 3, 1},
        {"2i", "R0(C0,y)&R1(C1,y)", 2, 2},
        {"3i", "R0(C0,y)&R1(C1,y)&R2(C2,y)", 3, 3},
        {"pi", "R0(C0,x1)&R1(x1,y)&R2(C1,y)", 3, 2},
        {"ip", "R0(C0,x1)&R1(C1,x1)&R2(x1,y)", 3, 2},
        {"2u", "R0(C0,y)|R1(C1,y)", 2, 2},
        {"up", "(R0(C0,x1)|R1(C1,x1))&R2(x1,y)", 3, 2},
        {"2in", "R0(C0,y)&!R1(C1,y)", 2, 2},
        {"3in", "R0(C0,y)&R1(C1,y)&!R2(C2,y)", 3, 3},
        {"inp", "R0(C0,x1)&!R1(C1,x1)&R2(x1,y)", 3, 2},
        {"pin", "R0(C0,x1)&R1(x1,y)&!R2(C1,y)", 3, 2},
        {"pni", "R0(C0,x1)&!R1(x1,y)&R2(C1,y)", 3, 2},
        {"2il", "R0(C0,y)&R1(x1,y)", 2, 1},
        {"3il", "R0(C0,y)&R1(C1,y)&R2(x1,y)", 3, 2},
        {"2m", "R0(C0,x1)&R1(x1,y)&R2(x1,y)", 3, 1},
        {"2nm", "R0(C0,x1)&R1(x1,y)&!R2(x1,y)", 3, 1},
        {"3mp", "R0(C0,x1)&R1(x1,x2)&R2(x2,y)&R3(x1,x2)", 4, 1},
        {"3pm", "R0(C0,x1)&R1(x1,x2)&R2(x2,y)&R3(x2,y)", 4, 1},
        {"im", "R0(C0,x1)&R1(C1,x1)&R2(x1,y)&R3(x1,y)", 4, 2},
        {"3c", "R0(C0,x1)&R1(x1,y)&R2(C1,x2)&R3(x2,y)&R4(x1,x2)", 5, 2},
        {"3cm", "R0(C0,x1)&R1(x1,y)&R2(C1,x2)&R3(x2,y)&R4(x1,x2)&R5(x1,x2)", 6, 2},
    };
    return templates;
}

const QueryTemplate& find_template(std::string_view name) {
    for (const auto& t : query_templates())
        if (t.name == name) return t;
    throw Error("unknown query template '" + std::string(name) + "'");
}

std::string instantiate(const QueryTemplate& t, std::span<const RelationId> relations,
                        std::span<const EntityId> constants) {
    if (relations.size() != t.num_relations || constants.size() != t.num_constants)
        throw Error("wrong number of bindings for template " + t.name);
    std::string out;
    for (std::size_t i = 0; i < t.skeleton.size(); ++i) {
        const char c = t.skeleton[i];
        if ((c == 'R' || c == 'C') && i + 1 < t.skeleton.size()) {
            const auto slot = static_cast<std::size_t>(t.skeleton[++i] - '0');
            out += c == 'R' ? "r" + std::to_string(relations[slot])
                            : "e" + std::to_string(constants[slot]);
        } else {
            out += c;
        }
    }
    return out;
}

namespace {

// Relation bound to a placeholder for which constant slot `slot` is the
// head of a positive atom, if any.
std::optional<std::size_t> anchoring_relation(const QueryTemplate& t, std::size_t slot) {
    const std::string needle = "(C" + std::to_string(slot) + ",";
    auto pos = t.skeleton.find(needle);
    if (pos == std::string::npos || pos < 2) return std::nullopt;
    if (pos >= 3 && t.skeleton[pos - 3] == '!') return std::nullopt;
    return static_cast<std::size_t>(t.skeleton[pos - 1] - '0');
}

}  // namespace

std::vector<GeneratedQuery> generate_queries(const TripleStore& observed, const TripleStore& full,
                                             std::string_view template_name, std::size_t count,
                                             std::uint64_t seed,
                                             const GenerationOptions& options) {
    const QueryTemplate& tmpl = find_template(template_name);
    const std::size_t nv = full.num_entities(), nr = full.num_relations();
    if (observed.num_entities() != nv || observed.num_relations() != nr)
        throw DimensionError("observed and full graphs use different vocabularies");
    if (nv == 0 || nr == 0) throw Error("cannot generate queries on an empty graph");

    const TripleIndex observed_index(observed);
    const TripleIndex full_index(full);

    // Heads with at least one outgoing edge, per relation, in the full graph.
    std::vector<std::vector<EntityId>> heads(nr);
    for (const auto& t : full.triples())
        if (heads[t.relation].empty() || heads[t.relation].back() != t.head)
            heads[t.relation].push_back(t.head);

    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t n) {
        return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    };

    std::vector<GeneratedQuery> out;
    const std::size_t budget = count * options.attempts_per_query;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (attempts++ >= budget)
            throw Error("query sampling budget exhausted for template " + tmpl.name + " (" +
                        std::to_string(out.size()) + " of " + std::to_string(count) +
                        " generated)");

        std::vector<RelationId> rels(tmpl.num_relations);
        for (auto& r : rels) r = uniform(nr);
        std::vector<EntityId> consts(tmpl.num_constants);
        for (std::size_t c = 0; c < consts.size(); ++c) {
            auto anchor = anchoring_relation(tmpl, c);
            const auto& pool = anchor ? heads[rels[*anchor]] : std::vector<EntityId>{};
            consts[c] = pool.empty() ? uniform(nv) : pool[uniform(pool.size())];
        }

        const std::string text = instantiate(tmpl, rels, consts);
        const Formula f = parse_formula(text, nv, nr);
        if (!options.check_answers) {
            out.push_back({render(f, &full), tmpl.name, {}, {}});
            continue;
        }
        auto split = split_answers(f, observed_index, full_index);
        const std::size_t total = split.easy.size() + split.hard.size();
        if (options.require_hard ? split.hard.empty() : total == 0) continue;
        if (static_cast<double>(total) > options.max_answer_fraction * static_cast<double>(nv))
            continue;

        out.push_back({render(f, &full), tmpl.name, std::move(split.easy), std::move(split.hard)});
    }
    return out;
}

}  // namespace nsmp
