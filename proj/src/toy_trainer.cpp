#include "nsmp/toy_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nsmp {

namespace {

// Views into the flat parameter vector.
struct Layout {
    std::size_t nv, nr, rank;
    std::size_t ent_re(std::size_t e, std::size_t k) const { return e * rank + k; }
    std::size_t ent_im(std::size_t e, std::size_t k) const { return (nv + e) * rank + k; }
    std::size_t rel_re(std::size_t r, std::size_t k) const { return (2 * nv + r) * rank + k; }
    std::size_t rel_im(std::size_t r, std::size_t k) const {
        return (2 * nv + nr + r) * rank + k;
    }
};

// Softmax cross-entropy of `target` against scores <query, E_j> for all j.
// Accumulates dL/dquery into gq and dL/dE_j into grad (when non-empty).
double cross_entropy(const Layout& lay, std::span<const double> p, std::span<const double> qre,
                     std::span<const double> qim, EntityId target, std::span<double> grad,
                     std::vector<double>& gq_re, std::vector<double>& gq_im,
                     std::vector<double>& scratch) {
    scratch.resize(lay.nv);
    for (std::size_t j = 0; j < lay.nv; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < lay.rank; ++k)
            s += qre[k] * p[lay.ent_re(j, k)] + qim[k] * p[lay.ent_im(j, k)];
        scratch[j] = s;
    }
    const double top = *std::max_element(scratch.begin(), scratch.end());
    double z = 0.0;
    for (double s : scratch) z += std::exp(s - top);
    const double loss = top + std::log(z) - scratch[target];
    if (grad.empty()) return loss;

    std::fill(gq_re.begin(), gq_re.end(), 0.0);
    std::fill(gq_im.begin(), gq_im.end(), 0.0);
    for (std::size_t j = 0; j < lay.nv; ++j) {
        const double coef = std::exp(scratch[j] - top) / z - (j == target ? 1.0 : 0.0);
        for (std::size_t k = 0; k < lay.rank; ++k) {
            gq_re[k] += coef * p[lay.ent_re(j, k)];
            gq_im[k] += coef * p[lay.ent_im(j, k)];
            grad[lay.ent_re(j, k)] += coef * qre[k];
            grad[lay.ent_im(j, k)] += coef * qim[k];
        }
    }
    return loss;
}

}  // namespace

ToyObjective::ToyObjective(const TripleStore& store, std::size_t rank, double n3_weight)
    : triples_(store.triples()),
      num_entities_(store.num_entities()),
      num_relations_(store.num_relations()),
      rank_(rank),
      n3_weight_(n3_weight) {
    if (triples_.empty()) throw Error("cannot train on an empty triple set");
    if (rank == 0) throw DimensionError("rank must be positive");
}

double ToyObjective::loss(std::span<const double> params) const { return evaluate(params, {}); }

double ToyObjective::loss_and_gradient(std::span<const double> params,
                                       std::span<double> grad) const {
    if (grad.size() != params.size()) throw DimensionError("gradient buffer has wrong size");
    std::fill(grad.begin(), grad.end(), 0.0);
    return evaluate(params, grad);
}

double ToyObjective::evaluate(std::span<const double> p, std::span<double> grad) const {
    if (p.size() != num_parameters()) throw DimensionError("parameter vector has wrong size");
    const Layout lay{num_entities_, num_relations_, rank_};
    const std::size_t d = rank_;
    const bool want_grad = !grad.empty();

    std::vector<double> qre(d), qim(d), gq_re(d), gq_im(d), scratch;
    // Per-triple gradient contributions are scaled by 1/|T| at the end.
    double total = 0.0;
    for (const auto& [h, r, t] : triples_) {
        // Tail prediction: query q = h (x) r, score_j = Re(q . conj(E_j)).
        for (std::size_t k = 0; k < d; ++k) {
            const double a = p[lay.ent_re(h, k)], b = p[lay.ent_im(h, k)];
            const double c = p[lay.rel_re(r, k)], dd = p[lay.rel_im(r, k)];
            qre[k] = a * c - b * dd;
            qim[k] = a * dd + b * c;
        }
        total += cross_entropy(lay, p, qre, qim, t, grad, gq_re, gq_im, scratch);
        if (want_grad) {
            for (std::size_t k = 0; k < d; ++k) {
                const double a = p[lay.ent_re(h, k)], b = p[lay.ent_im(h, k)];
                const double c = p[lay.rel_re(r, k)], dd = p[lay.rel_im(r, k)];
                grad[lay.ent_re(h, k)] += gq_re[k] * c + gq_im[k] * dd;
                grad[lay.ent_im(h, k)] += -gq_re[k] * dd + gq_im[k] * c;
                grad[lay.rel_re(r, k)] += gq_re[k] * a + gq_im[k] * b;
                grad[lay.rel_im(r, k)] += -gq_re[k] * b + gq_im[k] * a;
            }
        }

        // Head prediction: query u = conj(r) (x) t, score_j = Re(E_j . conj(u)).
        for (std::size_t k = 0; k < d; ++k) {
            const double c = p[lay.rel_re(r, k)], dd = p[lay.rel_im(r, k)];
            const double e = p[lay.ent_re(t, k)], f = p[lay.ent_im(t, k)];
            qre[k] = c * e + dd * f;
            qim[k] = c * f - dd * e;
        }
        total += cross_entropy(lay, p, qre, qim, h, grad, gq_re, gq_im, scratch);
        if (want_grad) {
            for (std::size_t k = 0; k < d; ++k) {
                const double c = p[lay.rel_re(r, k)], dd = p[lay.rel_im(r, k)];
                const double e = p[lay.ent_re(t, k)], f = p[lay.ent_im(t, k)];
                grad[lay.rel_re(r, k)] += gq_re[k] * e + gq_im[k] * f;
                grad[lay.rel_im(r, k)] += gq_re[k] * f - gq_im[k] * e;
                grad[lay.ent_re(t, k)] += gq_re[k] * c - gq_im[k] * dd;
                grad[lay.ent_im(t, k)] += gq_re[k] * dd + gq_im[k] * c;
            }
        }

        // N3: sum_k |h_k|^3 + |r_k|^3 + |t_k|^3
        if (n3_weight_ > 0.0) {
            auto cube = [&](std::size_t ire, std::size_t iim) {
                const double x = p[ire], y = p[iim];
                const double m = std::sqrt(x * x + y * y);
                if (want_grad) {
                    grad[ire] += n3_weight_ * 3.0 * m * x;
                    grad[iim] += n3_weight_ * 3.0 * m * y;
                }
                return m * m * m;
            };
            double reg = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                reg += cube(lay.ent_re(h, k), lay.ent_im(h, k));
                reg += cube(lay.rel_re(r, k), lay.rel_im(r, k));
                reg += cube(lay.ent_re(t, k), lay.ent_im(t, k));
            }
            total += n3_weight_ * reg;
        }
    }

    const double inv = 1.0 / static_cast<double>(triples_.size());
    if (want_grad)
        for (auto& g : grad) g *= inv;
    return total * inv;
}

ComplexEmbeddingTable ToyObjective::to_table(std::span<const double> params) const {
    if (params.size() != num_parameters()) throw DimensionError("parameter vector has wrong size");
    ComplexEmbeddingTable table(num_entities_, num_relations_, rank_);
    const std::size_t ne = num_entities_ * rank_, nr = num_relations_ * rank_;
    auto copy = [&](std::vector<float>& dst, std::size_t offset) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(params[offset + i]);
    };
    copy(table.entity_real(), 0);
    copy(table.entity_imag(), ne);
    copy(table.relation_real(), 2 * ne);
    copy(table.relation_imag(), 2 * ne + nr);
    return table;
}

std::vector<double> initial_parameters(std::size_t num_entities, std::size_t num_relations,
                                       const ToyTrainConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> dist(0.0, cfg.init_scale);
    std::vector<double> params(2 * (num_entities + num_relations) * cfg.rank);
    for (auto& x : params) x = dist(rng);
    return params;
}

ComplexEmbeddingTable train_toy(const TripleStore& store, const ToyTrainConfig& cfg) {
    ToyObjective objective(store, cfg.rank, cfg.n3_weight);
    auto params = initial_parameters(store.num_entities(), store.num_relations(), cfg);

    std::vector<double> grad(params.size());
    std::vector<double> accum(params.size(), 0.0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        objective.loss_and_gradient(params, grad);
        for (std::size_t i = 0; i < params.size(); ++i) {
            accum[i] += grad[i] * grad[i];
            params[i] -= cfg.step_size * grad[i] / (std::sqrt(accum[i]) + 1e-10);
        }
    }
    return objective.to_table(params);
}

}  // namespace nsmp
