#pragma once
// Small ComplEx-N3 trainer for desk-scale experiments. Full softmax
// cross-entropy over tail and head prediction, full-batch Adagrad.

#include <cstdint>
#include <span>
#include <vector>

#include "nsmp/complex_model.hpp"
#include "nsmp/kg_store.hpp"

namespace nsmp {

struct ToyTrainConfig {
    std::size_t rank = 16;
    std::size_t epochs = 200;
    double step_size = 0.1;
    double n3_weight = 1e-3;
    double init_scale = 0.1;
    std::uint64_t seed = 0;
};

// Training loss over a fixed triple set. Parameters are a flat vector laid
// out as entity_real | entity_imag | relation_real | relation_imag, each
// row-major with `rank` columns.
class ToyObjective {
   public:
    ToyObjective(const TripleStore& store, std::size_t rank, double n3_weight);

    std::size_t num_parameters() const { return 2 * (num_entities_ + num_relations_) * rank_; }

    double loss(std::span<const double> params) const;
    // Writes dLoss/dparams into `grad` (same size as params) and returns the loss.
    double loss_and_gradient(std::span<const double> params, std::span<double> grad) const;

    ComplexEmbeddingTable to_table(std::span<const double> params) const;

   private:
    double evaluate(std::span<const double> params, std::span<double> grad) const;

    std::vector<Triple> triples_;
    std::size_t num_entities_;
    std::size_t num_relations_;
    std::size_t rank_;
    double n3_weight_;
};

// Seeded N(0, init_scale^2) parameters, laid out as for ToyObjective.
std::vector<double> initial_parameters(std::size_t num_entities, std::size_t num_relations,
                                       const ToyTrainConfig& cfg);

ComplexEmbeddingTable train_toy(const TripleStore& store, const ToyTrainConfig& cfg);

}  // namespace nsmp
