#pragma once
// Sparse fuzzy sets over entities and the arithmetic used by symbolic
// message passing: thresholded normalization, one-hop propagation through a
// boolean relation matrix, product-t-norm aggregation, and branch union.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "nsmp/relation_matrix.hpp"
#include "nsmp/types.hpp"

namespace nsmp {

inline constexpr double kDefaultEpsilon = 1e-14;

struct FuzzyEntry {
    EntityId id;
    double weight;

    friend bool operator==(const FuzzyEntry&, const FuzzyEntry&) = default;
};

// Sparse nonnegative weight vector of length dim(). Entries are sorted by
// strictly increasing id and every stored weight is > 0; the constructor
// enforces both.
class FuzzyVec {
   public:
    FuzzyVec() = default;
    explicit FuzzyVec(std::size_t dim) : dim_(dim) {}
    FuzzyVec(std::size_t dim, std::vector<FuzzyEntry> entries);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::span<const FuzzyEntry> entries() const { return entries_; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    // 0 when id is outside the support.
    double weight(EntityId id) const;
    bool contains(EntityId id) const { return weight(id) > 0.0; }
    double sum() const;

    std::vector<double> to_dense() const;
    std::vector<EntityId> support() const;

    friend bool operator==(const FuzzyVec&, const FuzzyVec&) = default;

   private:
    std::size_t dim_ = 0;
    std::vector<FuzzyEntry> entries_;
};

// N(p) = p * 1(p >= eps) / max(eps, sum(p * 1(p >= eps))).
// Negative inputs are clamped to 0 first. Requires eps > 0.
FuzzyVec normalize(std::span<const double> dense, double eps = kDefaultEpsilon);
FuzzyVec normalize(const FuzzyVec& v, double eps = kDefaultEpsilon);

// Raw sparse product p * M, where `oriented` is M_r for head->tail
// propagation and M_r^T for tail->head. Not normalized.
std::vector<double> propagate_dense(const FuzzyVec& p, const RelationMatrix& oriented);

// Symbolic one-hop inference.
//   positive: N(p * M)
//   negative: N(alpha / |V| - p * M)
// `oriented` as for propagate_dense.
FuzzyVec mu(const FuzzyVec& p, const RelationMatrix& oriented, Polarity polarity, double alpha,
            double eps = kDefaultEpsilon);

// N(m_1 o m_2 o ... o m_k) with o the elementwise (product t-norm) product.
FuzzyVec hadamard_aggregate(std::span<const FuzzyVec> messages, double eps = kDefaultEpsilon);

enum class UnionRule {
    Max,             // Goedel t-conorm
    ProbabilisticSum // a + b - ab
};

// Combines per-branch dense score vectors of a DNF query.
std::vector<double> union_scores(std::span<const std::vector<double>> branch_scores,
                                 UnionRule rule = UnionRule::Max);

inline std::vector<double> union_max(std::span<const std::vector<double>> branch_scores) {
    return union_scores(branch_scores, UnionRule::Max);
}

// `id<TAB>weight` per entry, weights with 17 significant digits.
void write_debug(std::ostream& os, const FuzzyVec& v);

}  // namespace nsmp
