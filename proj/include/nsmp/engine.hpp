#pragma once
// Neural-symbolic message passing over query graphs.
//
// Every variable node carries a neural state (complex embedding) and a
// symbolic state (fuzzy set over entities). Each layer, a variable collects
// one message per incident edge from neighbors that are constants or that
// were already updated at the previous layer, combines them with the
// product t-norm, and refreshes its neural state as the probability-weighted
// sum of entity embeddings. Constants are never message targets. All reads
// in layer l see layer l-1 states.

#include <optional>
#include <string>
#include <vector>

#include "nsmp/complex_model.hpp"
#include "nsmp/formula.hpp"
#include "nsmp/fuzzy.hpp"
#include "nsmp/kg_store.hpp"
#include "nsmp/query_graph.hpp"

namespace nsmp {

struct LayerPolicy {
    enum class Kind { Auto, Fixed };
    Kind kind = Kind::Auto;
    // Offset added to the query depth for Auto; the layer count for Fixed.
    std::size_t value = 1;

    static LayerPolicy automatic(std::size_t offset = 1) { return {Kind::Auto, offset}; }
    static LayerPolicy fixed(std::size_t layers) { return {Kind::Fixed, layers}; }
};

struct EngineConfig {
    double epsilon = kDefaultEpsilon;
    double alpha = 100.0;
    double lambda = 0.3;
    LayerPolicy layers = LayerPolicy::automatic(1);
    // Off: messages use the symbolic term only and answers use lambda = 1.
    bool neural_enabled = true;
    // Off: variables also take messages from neighbors not yet updated.
    bool dynamic_pruning = true;
    UnionRule union_rule = UnionRule::Max;

    void validate() const;
    double effective_lambda() const { return neural_enabled ? lambda : 1.0; }
};

struct NodeState {
    ComplexVec neural;  // empty when the neural path is disabled
    FuzzyVec symbolic;
    bool updated = false;
    // -1 until the node first aggregates messages; constants stay at 0.
    int first_update_layer = -1;
    int last_update_layer = -1;
};

struct VariableExplanation {
    std::string name;
    FuzzyVec state;
};

struct BranchResult {
    std::string formula;
    std::size_t depth = 0;
    std::size_t layers = 0;
    std::size_t messages = 0;
    std::vector<double> scores;
    std::vector<VariableExplanation> variables;
};

struct AnswerDistribution {
    std::vector<double> scores;
    std::vector<BranchResult> branches;
    std::vector<std::string> warnings;

    std::size_t message_count() const;
};

struct RankedEntity {
    EntityId id;
    double weight;
};

struct VariableListing {
    std::size_t branch;
    std::string name;
    std::vector<RankedEntity> top;
};

class Engine {
   public:
    // `table` may be null only when cfg.neural_enabled is false.
    Engine(const TripleStore& kg, const ComplexEmbeddingTable* table, EngineConfig cfg);

    const EngineConfig& config() const { return cfg_; }
    const TripleStore& kg() const { return kg_; }

    std::vector<NodeState> initial_states(const QueryGraph& g) const;

    // N(f(rho(n_u)) + mu(s_u)) for a message travelling along relation r.
    FuzzyVec encode_message(const NodeState& from, RelationId r, Direction direction,
                            Polarity polarity) const;

    // One synchronous layer (l >= 1). Returns the number of messages computed.
    std::size_t layer_step(const QueryGraph& g, std::vector<NodeState>& states,
                           std::size_t layer) const;

    // Probability-weighted sum of entity embeddings over the support of s.
    ComplexVec symbolic_to_neural(const FuzzyVec& s) const;

    std::size_t resolve_layers(const QueryGraph& g) const;

    BranchResult answer_scq(const QueryGraph& g, std::vector<std::string>* warnings = nullptr) const;
    AnswerDistribution answer_query(const Formula& f) const;

   private:
    std::vector<double> neural_scores(std::span<const std::complex<double>> state) const;

    const TripleStore& kg_;
    const ComplexEmbeddingTable* table_;
    EngineConfig cfg_;
};

// Top-k entities of every variable's final fuzzy state, per branch; ties go
// to the smaller entity id.
std::vector<VariableListing> explain(const AnswerDistribution& result, std::size_t k);

// Highest-scoring entities of a dense score vector, ties by ascending id.
std::vector<RankedEntity> top_k(std::span<const double> scores, std::size_t k);

}  // namespace nsmp
