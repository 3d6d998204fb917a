#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bmih/embedding.hpp"
#include "bmih/rebalance.hpp"

namespace bmih {

struct ObjectiveParams {
    double epsilon = 0.0;   // triplet margin, l/2 by default
    double lambda = 0.1;    // feature-level weight
    double beta = 0.1;      // instance-level weight
    std::size_t k_prime = 20;

    static ObjectiveParams defaults_for(std::size_t bits) {
        ObjectiveParams p;
        p.epsilon = static_cast<double>(bits) / 2.0;
        return p;
    }
    /// Throws std::invalid_argument unless epsilon > 0, lambda, beta >= 0 and k_prime >= 1.
    void validate() const;
};

/// anchor is closer in label to positive than to negative.
struct Triplet {
    ItemId anchor = 0;
    ItemId positive = 0;
    ItemId negative = 0;

    friend bool operator==(const Triplet&, const Triplet&) = default;
    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

using ItemPair = std::pair<ItemId, ItemId>;

/// max(0, eps + D(a, p) - D(a, n)) on full rows. Gradient is zero at and below the kink.
/// Throws std::invalid_argument if the anchor repeats or an id is out of range.
double triplet_loss(const Embedding& emb, const Triplet& t, double epsilon, std::span<double> grad = {},
                    double weight = 1.0);

/// Feature-level loss for a pair: with r' = floor(D_full / m) held constant,
///   sum_j max(0, r' - D_j) + max(0, D_j - (r' + 1)).
double psi_loss(const Embedding& emb, ItemId i, ItemId j, std::span<double> grad = {}, double weight = 1.0);

struct ObjectiveValue {
    double value = 0.0;
    double triplet_term = 0.0;
    double psi_term = 0.0;  // unweighted sums
    double phi_term = 0.0;
    std::vector<double> gradient;  // n x l
};

/// sum triplet + lambda * sum psi + beta * sum phi, with the summed gradient.
/// Terms whose weight is zero are skipped entirely.
ObjectiveValue total_objective(const Embedding& emb, std::span<const Triplet> triplets,
                               std::span<const ItemPair> psi_pairs, std::span<const GroupAssignment> assignments,
                               const ObjectiveParams& params);

/// total_objective without allocating: adds the gradient into `grad` and returns
/// the value; per-term sums go to `terms` when given (its gradient is untouched).
double accumulate_objective(const Embedding& emb, std::span<const Triplet> triplets,
                            std::span<const ItemPair> psi_pairs, std::span<const GroupAssignment> assignments,
                            const ObjectiveParams& params, std::span<double> grad, ObjectiveValue* terms = nullptr);

}  // namespace bmih
