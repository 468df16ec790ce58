#include "nsmp/engine.hpp"

#include <algorithm>
#include <cmath>

namespace nsmp {

void EngineConfig::validate() const {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (!(alpha > 0.0)) throw Error("alpha must be positive");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must lie in [0, 1]");
}

std::size_t AnswerDistribution::message_count() const {
    std::size_t n = 0;
    for (const auto& b : branches) n += b.messages;
    return n;
}

Engine::Engine(const TripleStore& kg, const ComplexEmbeddingTable* table, EngineConfig cfg)
    : kg_(kg), table_(table), cfg_(cfg) {
    cfg_.validate();
    if (cfg_.neural_enabled) {
        if (!table_) throw Error("neural path enabled but no embedding table given");
        check_compatible(*table_, kg_);
    }
}

std::vector<NodeState> Engine::initial_states(const QueryGraph& g) const {
    std::vector<NodeState> states(g.nodes().size());
    const std::size_t nv = kg_.num_entities();
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto& s = states[i];
        const Term& t = g.nodes()[i];
        if (t.kind == Term::Kind::Constant) {
            s.symbolic = kg_.one_hot(t.value);
            if (cfg_.neural_enabled) s.neural = table_->entity(t.value);
            s.updated = true;
            s.first_update_layer = s.last_update_layer = 0;
        } else {
            s.symbolic = FuzzyVec(nv);
            if (cfg_.neural_enabled) s.neural.assign(table_->rank(), {0.0, 0.0});
        }
    }
    return states;
}

FuzzyVec Engine::encode_message(const NodeState& from, RelationId r, Direction direction,
                                Polarity polarity) const {
    FuzzyVec symbolic = mu(from.symbolic, kg_, r, direction, polarity, cfg_.alpha, cfg_.epsilon);
    if (!cfg_.neural_enabled) return normalize(symbolic, cfg_.epsilon);

    auto combined = embedding_to_fuzzy(*table_, rho(*table_, from.neural, r, direction, polarity));
    for (const auto& [id, w] : symbolic) combined[id] += w;
    return normalize(combined, cfg_.epsilon);
}

ComplexVec Engine::symbolic_to_neural(const FuzzyVec& s) const {
    if (!table_) throw Error("no embedding table");
    const std::size_t rank = table_->rank();
    ComplexVec out(rank, {0.0, 0.0});
    const float* re = table_->entity_real().data();
    const float* im = table_->entity_imag().data();
    for (const auto& [id, w] : s) {
        for (std::size_t k = 0; k < rank; ++k)
            out[k] += std::complex<double>(w * re[id * rank + k], w * im[id * rank + k]);
    }
    return out;
}

std::size_t Engine::layer_step(const QueryGraph& g, std::vector<NodeState>& states,
                               std::size_t layer) const {
    if (layer == 0) throw Error("layers are numbered from 1");
    const std::vector<NodeState> previous = states;
    std::size_t count = 0;

    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
        if (g.is_constant(v)) continue;
        std::vector<FuzzyVec> messages;
        for (const auto& inc : g.incident(v)) {
            const NodeState& from = previous[inc.neighbor];
            if (cfg_.dynamic_pruning && !g.is_constant(inc.neighbor) && !from.updated) continue;
            const auto& edge = g.edges()[inc.edge];
            messages.push_back(encode_message(from, edge.relation, inc.direction,
                                              edge.negated ? Polarity::Negative
                                                           : Polarity::Positive));
        }
        if (messages.empty()) continue;  // carried over from layer - 1
        count += messages.size();

        NodeState& s = states[v];
        s.symbolic = hadamard_aggregate(messages, cfg_.epsilon);
        if (cfg_.neural_enabled) s.neural = symbolic_to_neural(s.symbolic);
        if (!s.updated) s.first_update_layer = static_cast<int>(layer);
        s.updated = true;
        s.last_update_layer = static_cast<int>(layer);
    }
    return count;
}

std::size_t Engine::resolve_layers(const QueryGraph& g) const {
    const std::size_t d = depth(g).depth;
    if (cfg_.layers.kind == LayerPolicy::Kind::Auto) return d + cfg_.layers.value;
    if (cfg_.layers.value < d)
        throw Error("layer count " + std::to_string(cfg_.layers.value) +
                    " is smaller than the query depth " + std::to_string(d));
    return cfg_.layers.value;
}

std::vector<double> Engine::neural_scores(std::span<const std::complex<double>> state) const {
    return softmax(cosine_similarities(*table_, state));
}

namespace {

std::string node_name(const Term& t) {
    return t.kind == Term::Kind::Free ? "y" : "x" + std::to_string(t.value);
}

}  // namespace

BranchResult Engine::answer_scq(const QueryGraph& g, std::vector<std::string>* warnings) const {
    BranchResult out;
    out.depth = depth(g).depth;
    out.layers = resolve_layers(g);

    auto states = initial_states(g);
    for (std::size_t l = 1; l <= out.layers; ++l) out.messages += layer_step(g, states, l);

    const std::size_t nv = kg_.num_entities();
    const NodeState& free_state = states[g.free_node()];
    if (warnings) {
        if (!free_state.updated)
            warnings->push_back("free variable was never updated after " +
                                std::to_string(out.layers) + " layers");
        for (auto v : g.variable_nodes())
            if (states[v].updated && states[v].symbolic.empty())
                warnings->push_back("variable " + node_name(g.nodes()[v]) +
                                    " has an empty fuzzy state");
    }

    const double lambda = cfg_.effective_lambda();
    out.scores.assign(nv, 0.0);
    for (const auto& [id, w] : free_state.symbolic) out.scores[id] = lambda * w;
    if (lambda < 1.0) {
        const auto neural = neural_scores(free_state.neural);
        for (std::size_t i = 0; i < nv; ++i) out.scores[i] += (1.0 - lambda) * neural[i];
    }

    for (auto v : g.variable_nodes())
        out.variables.push_back({node_name(g.nodes()[v]), states[v].symbolic});
    std::sort(out.variables.begin(), out.variables.end(),
              [](const auto& a, const auto& b) {
                  // y last, existentials by index
                  if ((a.name == "y") != (b.name == "y")) return b.name == "y";
                  return a.name.size() != b.name.size() ? a.name.size() < b.name.size()
                                                        : a.name < b.name;
              });
    return out;
}

AnswerDistribution Engine::answer_query(const Formula& f) const {
    AnswerDistribution out;
    std::vector<std::vector<double>> branch_scores;
    for (const auto& scq : to_dnf(f)) {
        auto result = answer_scq(build_graph(scq), &out.warnings);
        result.formula = render(scq, &kg_);
        branch_scores.push_back(result.scores);
        out.branches.push_back(std::move(result));
    }
    out.scores = union_scores(branch_scores, cfg_.union_rule);
    return out;
}

std::vector<RankedEntity> top_k(std::span<const double> scores, std::size_t k) {
    std::vector<RankedEntity> all;
    all.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        all.push_back({static_cast<EntityId>(i), scores[i]});
    k = std::min(k, all.size());
    auto better = [](const RankedEntity& a, const RankedEntity& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      better);
    all.resize(k);
    return all;
}

std::vector<VariableListing> explain(const AnswerDistribution& result, std::size_t k) {
    std::vector<VariableListing> out;
    for (std::size_t b = 0; b < result.branches.size(); ++b) {
        for (const auto& var : result.branches[b].variables) {
            std::vector<RankedEntity> entries;
            for (const auto& [id, w] : var.state) entries.push_back({id, w});
            std::stable_sort(entries.begin(), entries.end(),
                             [](const auto& a, const auto& c) { return a.weight > c.weight; });
            if (entries.size() > k) entries.resize(k);
            out.push_back({b, var.name, std::move(entries)});
        }
    }
    return out;
}

}  // namespace nsmp
