#pragma once
// Frozen ComplEx link predictor: embedding table, trilinear score, the
// closed-form one-hop neural messages, and the embedding -> fuzzy set
// conversion used by the neural-symbolic encoder.
//
// Embedding file layout (little-endian):
//   "NSMPEMB1"            8 bytes
//   version               u32 (= 1)
//   |V|, |R|, rank        u64 each
//   entity_real           f32[|V| * rank]  row-major
//   entity_imag           f32[|V| * rank]
//   relation_real         f32[|R| * rank]
//   relation_imag         f32[|R| * rank]

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "nsmp/types.hpp"

namespace nsmp {

class TripleStore;

using ComplexVec = std::vector<std::complex<double>>;

class ComplexEmbeddingTable {
   public:
    ComplexEmbeddingTable() = default;
    ComplexEmbeddingTable(std::size_t num_entities, std::size_t num_relations, std::size_t rank);

    std::size_t rank() const { return rank_; }
    std::size_t num_entities() const { return num_entities_; }
    std::size_t num_relations() const { return num_relations_; }

    ComplexVec entity(EntityId e) const;
    ComplexVec relation(RelationId r) const;
    void set_entity(EntityId e, std::span<const std::complex<double>> value);
    void set_relation(RelationId r, std::span<const std::complex<double>> value);

    std::span<const float> entity_real(EntityId e) const { return row(entity_real_, e); }
    std::span<const float> entity_imag(EntityId e) const { return row(entity_imag_, e); }

    // Whole arrays, row-major; exposed for file I/O and bulk scoring.
    std::vector<float>& entity_real() { return entity_real_; }
    std::vector<float>& entity_imag() { return entity_imag_; }
    std::vector<float>& relation_real() { return relation_real_; }
    std::vector<float>& relation_imag() { return relation_imag_; }
    const std::vector<float>& entity_real() const { return entity_real_; }
    const std::vector<float>& entity_imag() const { return entity_imag_; }
    const std::vector<float>& relation_real() const { return relation_real_; }
    const std::vector<float>& relation_imag() const { return relation_imag_; }

    // Multiplies every entity embedding by `factor`.
    void scale_entities(double factor);

    friend bool operator==(const ComplexEmbeddingTable&, const ComplexEmbeddingTable&) = default;

   private:
    std::span<const float> row(const std::vector<float>& a, std::size_t i) const {
        return {a.data() + i * rank_, rank_};
    }

    std::size_t num_entities_ = 0;
    std::size_t num_relations_ = 0;
    std::size_t rank_ = 0;
    std::vector<float> entity_real_, entity_imag_;
    std::vector<float> relation_real_, relation_imag_;
};

// Re(sum_k h_k * r_k * conj(t_k))
double score(std::span<const std::complex<double>> h, std::span<const std::complex<double>> r,
             std::span<const std::complex<double>> t);
double score(const ComplexEmbeddingTable& table, EntityId h, RelationId r, EntityId t);

// Closed-form neural one-hop message:
//   head->tail:  r (x) h      tail->head:  conj(r) (x) t
// negated for Polarity::Negative.
ComplexVec rho(const ComplexEmbeddingTable& table, std::span<const std::complex<double>> state,
               RelationId r, Direction direction, Polarity polarity);

// S(message, E_e) = Re(sum_k E_e,k * conj(message_k)) for every entity e.
std::vector<double> similarities(const ComplexEmbeddingTable& table,
                                 std::span<const std::complex<double>> message);

// Numerically stable softmax (max subtracted before exponentiation).
std::vector<double> softmax(std::span<const double> logits);

// f: softmax over similarities to every entity embedding.
std::vector<double> embedding_to_fuzzy(const ComplexEmbeddingTable& table,
                                       std::span<const std::complex<double>> message);

// Cosine similarity between `v` and every entity embedding, treating complex
// vectors as real vectors of length 2*rank. Zero vectors have cosine 0.
std::vector<double> cosine_similarities(const ComplexEmbeddingTable& table,
                                        std::span<const std::complex<double>> v);

void save_embeddings(const ComplexEmbeddingTable& table, const std::filesystem::path& path);
ComplexEmbeddingTable load_embeddings(const std::filesystem::path& path);

// Throws DimensionError unless the table covers exactly the store's ids.
void check_compatible(const ComplexEmbeddingTable& table, const TripleStore& store);

}  // namespace nsmp
