#include "nsmp/fuzzy.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace nsmp {

FuzzyVec::FuzzyVec(std::size_t dim, std::vector<FuzzyEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.id >= dim_) throw DimensionError("fuzzy entry id out of range");
        if (!(e.weight > 0.0)) throw Error("fuzzy entry weight must be positive");
        if (i > 0 && entries_[i - 1].id >= e.id)
            throw Error("fuzzy entries must have strictly increasing ids");
    }
}

double FuzzyVec::weight(EntityId id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const FuzzyEntry& e, EntityId v) { return e.id < v; });
    return it != entries_.end() && it->id == id ? it->weight : 0.0;
}

double FuzzyVec::sum() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.weight;
    return s;
}

std::vector<double> FuzzyVec::to_dense() const {
    std::vector<double> out(dim_, 0.0);
    for (const auto& e : entries_) out[e.id] = e.weight;
    return out;
}

std::vector<EntityId> FuzzyVec::support() const {
    std::vector<EntityId> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
}

namespace {

void check_epsilon(double eps) {
    if (!(eps > 0.0)) throw Error("normalization threshold must be positive");
}

// Thresholds and rescales entries already in increasing id order.
FuzzyVec finish(std::size_t dim, std::vector<FuzzyEntry> kept, double eps) {
    double total = 0.0;
    for (const auto& e : kept) total += e.weight;
    const double denom = std::max(eps, total);
    for (auto& e : kept) e.weight /= denom;
    return FuzzyVec(dim, std::move(kept));
}

}  // namespace

FuzzyVec normalize(std::span<const double> dense, double eps) {
    check_epsilon(eps);
    std::vector<FuzzyEntry> kept;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double w = std::max(0.0, dense[i]);
        if (w >= eps) kept.push_back({static_cast<EntityId>(i), w});
    }
    return finish(dense.size(), std::move(kept), eps);
}

FuzzyVec normalize(const FuzzyVec& v, double eps) {
    check_epsilon(eps);
    std::vector<FuzzyEntry> kept;
    kept.reserve(v.size());
    for (const auto& e : v)
        if (e.weight >= eps) kept.push_back(e);
    return finish(v.dim(), std::move(kept), eps);
}

std::vector<double> propagate_dense(const FuzzyVec& p, const RelationMatrix& oriented) {
    if (p.dim() != oriented.dim())
        throw DimensionError("fuzzy vector dimension " + std::to_string(p.dim()) +
                             " does not match relation matrix dimension " +
                             std::to_string(oriented.dim()));
    std::vector<double> out(p.dim(), 0.0);
    for (const auto& [i, w] : p)
        for (EntityId j : oriented.row(i)) out[j] += w;
    return out;
}

FuzzyVec mu(const FuzzyVec& p, const RelationMatrix& oriented, Polarity polarity, double alpha,
            double eps) {
    auto product = propagate_dense(p, oriented);
    if (polarity == Polarity::Negative) {
        const double base = p.dim() == 0 ? 0.0 : alpha / static_cast<double>(p.dim());
        for (auto& x : product) x = base - x;
    }
    return normalize(product, eps);
}

FuzzyVec hadamard_aggregate(std::span<const FuzzyVec> messages, double eps) {
    if (messages.empty()) throw Error("cannot aggregate an empty message list");
    const std::size_t dim = messages.front().dim();
    for (const auto& m : messages)
        if (m.dim() != dim) throw DimensionError("message dimensions differ");

    std::vector<FuzzyEntry> acc(messages.front().begin(), messages.front().end());
    for (std::size_t k = 1; k < messages.size() && !acc.empty(); ++k) {
        std::vector<FuzzyEntry> next;
        auto a = acc.begin();
        auto b = messages[k].begin();
        while (a != acc.end() && b != messages[k].end()) {
            if (a->id < b->id) {
                ++a;
            } else if (b->id < a->id) {
                ++b;
            } else {
                const double w = a->weight * b->weight;
                if (w > 0.0) next.push_back({a->id, w});
                ++a;
                ++b;
            }
        }
        acc = std::move(next);
    }
    return normalize(FuzzyVec(dim, std::move(acc)), eps);
}

std::vector<double> union_scores(std::span<const std::vector<double>> branch_scores,
                                 UnionRule rule) {
    if (branch_scores.empty()) throw Error("cannot union an empty branch list");
    std::vector<double> out = branch_scores.front();
    for (std::size_t b = 1; b < branch_scores.size(); ++b) {
        const auto& v = branch_scores[b];
        if (v.size() != out.size()) throw DimensionError("branch score dimensions differ");
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (rule == UnionRule::Max)
                out[i] = std::max(out[i], v[i]);
            else
                out[i] = out[i] + v[i] - out[i] * v[i];
        }
    }
    return out;
}

void write_debug(std::ostream& os, const FuzzyVec& v) {
    char buf[64];
    for (const auto& e : v) {
        std::snprintf(buf, sizeof buf, "%.17g", e.weight);
        os << e.id << '\t' << buf << '\n';
    }
}

}  // namespace nsmp
