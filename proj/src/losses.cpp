#include "bmih/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace bmih {

namespace {

void check_gradient(const Embedding& emb, std::span<double> grad) {
    if (!grad.empty() && grad.size() != emb.values().size()) {
        throw std::invalid_argument("gradient buffer does not match embedding size");
    }
}

void check_id(const Embedding& emb, ItemId id) {
    if (id >= emb.rows()) throw std::invalid_argument("item id " + std::to_string(id) + " outside the embedding");
}

}  // namespace

void ObjectiveParams::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("objective: epsilon must be > 0");
    if (lambda < 0.0 || beta < 0.0) throw std::invalid_argument("objective: lambda and beta must be >= 0");
    if (k_prime == 0) throw std::invalid_argument("objective: k' must be >= 1");
}

double triplet_loss(const Embedding& emb, const Triplet& t, double epsilon, std::span<double> grad, double weight) {
    if (t.anchor == t.positive || t.anchor == t.negative) {
        throw std::invalid_argument("triplet_loss: degenerate triplet");
    }
    check_id(emb, t.anchor);
    check_id(emb, t.positive);
    check_id(emb, t.negative);
    check_gradient(emb, grad);

    const auto a = emb.row(t.anchor);
    const auto p = emb.row(t.positive);
    const auto n = emb.row(t.negative);
    const double value = epsilon + relaxed_distance(a, p) - relaxed_distance(a, n);
    if (value <= 0.0) return 0.0;
    if (!grad.empty()) {
        const std::size_t cols = emb.cols();
        add_relaxed_distance_gradient(a, p, 0, cols, weight, grad_row(grad, cols, t.anchor),
                                      grad_row(grad, cols, t.positive));
        add_relaxed_distance_gradient(a, n, 0, cols, -weight, grad_row(grad, cols, t.anchor),
                                      grad_row(grad, cols, t.negative));
    }
    return value;
}

double psi_loss(const Embedding& emb, ItemId i, ItemId j, std::span<double> grad, double weight) {
    if (i == j) throw std::invalid_argument("psi_loss: pair must be two distinct items");
    check_id(emb, i);
    check_id(emb, j);
    check_gradient(emb, grad);

    const SubstringLayout& layout = emb.layout();
    const std::size_t m = layout.tables();
    const auto a = emb.row(i);
    const auto b = emb.row(j);
    const double target = std::floor(relaxed_distance(a, b) / static_cast<double>(m));

    double value = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const std::size_t begin = layout.offset(t);
        const std::size_t end = begin + layout.width(t);
        const double d = relaxed_distance(a, b, begin, end);
        double slope = 0.0;
        if (target - d > 0.0) {
            value += target - d;
            slope = -1.0;
        } else if (d - (target + 1.0) > 0.0) {
            value += d - (target + 1.0);
            slope = 1.0;
        }
        if (slope != 0.0 && !grad.empty()) {
            add_relaxed_distance_gradient(a, b, begin, end, weight * slope, grad_row(grad, emb.cols(), i),
                                          grad_row(grad, emb.cols(), j));
        }
    }
    return value;
}

double accumulate_objective(const Embedding& emb, std::span<const Triplet> triplets,
                            std::span<const ItemPair> psi_pairs, std::span<const GroupAssignment> assignments,
                            const ObjectiveParams& params, std::span<double> grad, ObjectiveValue* terms) {
    params.validate();
    check_gradient(emb, grad);
    double triplet_sum = 0.0;
    double psi_sum = 0.0;
    double phi_sum = 0.0;
    for (const Triplet& t : triplets) triplet_sum += triplet_loss(emb, t, params.epsilon, grad);
    if (params.lambda > 0.0) {
        for (const auto& [i, j] : psi_pairs) psi_sum += psi_loss(emb, i, j, grad, params.lambda);
    }
    if (params.beta > 0.0) {
        for (const auto& ga : assignments) phi_sum += phi_loss(ga, emb, grad, params.beta);
    }
    const double value = triplet_sum + params.lambda * psi_sum + params.beta * phi_sum;
    if (terms != nullptr) {
        terms->value = value;
        terms->triplet_term = triplet_sum;
        terms->psi_term = psi_sum;
        terms->phi_term = phi_sum;
    }
    return value;
}

ObjectiveValue total_objective(const Embedding& emb, std::span<const Triplet> triplets,
                               std::span<const ItemPair> psi_pairs, std::span<const GroupAssignment> assignments,
                               const ObjectiveParams& params) {
    ObjectiveValue out;
    out.gradient.assign(emb.values().size(), 0.0);
    accumulate_objective(emb, triplets, psi_pairs, assignments, params, out.gradient, &out);
    return out;
}

}  // namespace bmih
