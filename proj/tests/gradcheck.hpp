#pragma once

// Straight-line reference versions of the training losses plus central
// finite differences. They work on raw row-major arrays and share no code with
// the library beyond the types used to hand cases over.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "bmih/embedding.hpp"
#include "bmih/losses.hpp"
#include "bmih/random.hpp"
#include "bmih/rebalance.hpp"

namespace gradcheck {

using Values = std::vector<double>;
using Range = std::pair<std::size_t, std::size_t>;
using Groups = std::vector<std::vector<std::vector<bmih::ItemId>>>;

inline double dist(const Values& v, std::size_t cols, std::size_t a, std::size_t b, Range r) {
    double s = 0.0;
    for (std::size_t t = r.first; t < r.second; ++t) {
        const double d = v[a * cols + t] - v[b * cols + t];
        s += d * d;
    }
    return s / 4.0;
}

inline std::vector<Range> ranges(const bmih::SubstringLayout& layout) {
    std::vector<Range> out;
    std::size_t begin = 0;
    const std::size_t m = layout.tables();
    const std::size_t l = layout.bits();
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t w = l / m + (j < l % m ? 1 : 0);
        out.emplace_back(begin, begin + w);
        begin += w;
    }
    return out;
}

inline double triplet_value(const Values& v, std::size_t cols, const bmih::Triplet& t, double eps) {
    const double x = eps + dist(v, cols, t.anchor, t.positive, {0, cols}) - dist(v, cols, t.anchor, t.negative, {0, cols});
    return x > 0.0 ? x : 0.0;
}

inline double psi_value(const Values& v, std::size_t cols, const std::vector<Range>& parts, std::size_t i, std::size_t j,
                        double fixed_target) {
    double s = 0.0;
    for (const Range& r : parts) {
        const double d = dist(v, cols, i, j, r);
        if (d < fixed_target) s += fixed_target - d;
        if (d > fixed_target + 1.0) s += d - fixed_target - 1.0;
    }
    return s;
}

inline double psi_target(const Values& v, std::size_t cols, std::size_t m, std::size_t i, std::size_t j) {
    return std::floor(dist(v, cols, i, j, {0, cols}) / static_cast<double>(m));
}

inline double phi_value(const Values& v, std::size_t cols, Range r, const Groups& groups) {
    double s = 0.0;
    for (std::size_t g1 = 0; g1 < groups.size(); ++g1) {
        for (std::size_t s1 = 0; s1 < groups[g1].size(); ++s1) {
            for (bmih::ItemId a : groups[g1][s1]) {
                for (std::size_t g2 = 0; g2 < groups.size(); ++g2) {
                    for (std::size_t s2 = 0; s2 < groups[g2].size(); ++s2) {
                        for (bmih::ItemId b : groups[g2][s2]) {
                            if (a >= b) continue;  // each unordered pair once
                            const double d = dist(v, cols, a, b, r);
                            if (g1 != g2) {
                                s += std::max(0.0, 2.0 - d);
                            } else if (s1 != s2) {
                                s += std::max(0.0, 1.0 - d);
                            } else {
                                s += d;
                            }
                        }
                    }
                }
            }
        }
    }
    return s;
}

// Smallest distance from any hinge kink of phi.
inline double phi_kink_gap(const Values& v, std::size_t cols, Range r, const Groups& groups) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t g1 = 0; g1 < groups.size(); ++g1) {
        for (std::size_t s1 = 0; s1 < groups[g1].size(); ++s1) {
            for (bmih::ItemId a : groups[g1][s1]) {
                for (std::size_t g2 = 0; g2 < groups.size(); ++g2) {
                    for (std::size_t s2 = 0; s2 < groups[g2].size(); ++s2) {
                        for (bmih::ItemId b : groups[g2][s2]) {
                            if (a >= b) continue;
                            const double d = dist(v, cols, a, b, r);
                            if (g1 != g2) gap = std::min(gap, std::abs(d - 2.0));
                            else if (s1 != s2) gap = std::min(gap, std::abs(d - 1.0));
                        }
                    }
                }
            }
        }
    }
    return gap;
}

// Distance from the floor discontinuity and from both psi hinges.
inline double psi_kink_gap(const Values& v, std::size_t cols, const std::vector<Range>& parts, std::size_t i,
                           std::size_t j) {
    const double ratio = dist(v, cols, i, j, {0, cols}) / static_cast<double>(parts.size());
    double gap = std::abs(ratio - std::round(ratio));
    const double target = std::floor(ratio);
    for (const Range& r : parts) {
        const double d = dist(v, cols, i, j, r);
        gap = std::min({gap, std::abs(d - target), std::abs(d - target - 1.0)});
    }
    return gap;
}

inline double triplet_kink_gap(const Values& v, std::size_t cols, const bmih::Triplet& t, double eps) {
    return std::abs(eps + dist(v, cols, t.anchor, t.positive, {0, cols}) - dist(v, cols, t.anchor, t.negative, {0, cols}));
}

inline Values central_difference(Values v, const std::function<double(const Values&)>& f, double h = 1e-5) {
    Values g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double keep = v[i];
        v[i] = keep + h;
        const double up = f(v);
        v[i] = keep - h;
        const double down = f(v);
        v[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// ||a - b|| / max(||a||, ||b||); zero when both vanish.
inline double relative_error(const Values& a, const Values& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double scale = std::sqrt(std::max(na, nb));
    return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

inline Values random_values(bmih::Rng& rng, std::size_t count) {
    Values v(count);
    for (double& x : v) x = 2.0 * bmih::uniform_unit(rng) - 1.0;
    return v;
}

// Random partition of `items` into groups and subgroups.
inline Groups random_groups(bmih::Rng& rng, std::vector<bmih::ItemId> items) {
    bmih::shuffle(std::span<bmih::ItemId>(items), rng);
    Groups groups;
    std::size_t pos = 0;
    while (pos < items.size()) {
        const std::size_t group_size = std::min<std::size_t>(items.size() - pos, 1 + bmih::uniform_index(rng, 4));
        std::vector<std::vector<bmih::ItemId>> group;
        std::size_t inner = 0;
        while (inner < group_size) {
            const std::size_t sub = std::min<std::size_t>(group_size - inner, 1 + bmih::uniform_index(rng, 2));
            group.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(pos + inner),
                               items.begin() + static_cast<std::ptrdiff_t>(pos + inner + sub));
            inner += sub;
        }
        groups.push_back(std::move(group));
        pos += group_size;
    }
    return groups;
}

struct CheckResult {
    bool skipped = false;  // too close to a kink
    double error = 0.0;
    double value_gap = 0.0;  // |library value - reference value|
};

inline CheckResult check_triplet(bmih::Rng& rng, double kink_tolerance = 1e-6) {
    const std::size_t rows = 3 + bmih::uniform_index(rng, 3);
    const std::size_t cols = 2 + bmih::uniform_index(rng, 15);
    const bmih::SubstringLayout layout(cols, 1);
    const Values v = random_values(rng, rows * cols);
    bmih::Triplet t{0, 1, 2};
    t.anchor = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows));
    do t.positive = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows)); while (t.positive == t.anchor);
    do t.negative = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows)); while (t.negative == t.anchor || t.negative == t.positive);
    // Margins near the typical distance scale keep both hinge sides in play.
    const double eps = 0.5 + bmih::uniform_unit(rng) * static_cast<double>(cols) / 4.0;
    CheckResult out;
    if (triplet_kink_gap(v, cols, t, eps) < kink_tolerance) {
        out.skipped = true;
        return out;
    }
    const bmih::Embedding emb(rows, layout, v);
    Values grad(v.size(), 0.0);
    const double value = bmih::triplet_loss(emb, t, eps, grad);
    const auto f = [&](const Values& x) { return triplet_value(x, cols, t, eps); };
    out.value_gap = std::abs(value - f(v));
    out.error = relative_error(grad, central_difference(v, f));
    return out;
}

inline CheckResult check_psi(bmih::Rng& rng, double kink_tolerance = 1e-6) {
    const std::size_t rows = 2 + bmih::uniform_index(rng, 3);
    const std::size_t cols = 2 + bmih::uniform_index(rng, 23);
    const std::size_t m = 1 + bmih::uniform_index(rng, std::min<std::size_t>(cols, 5));
    const bmih::SubstringLayout layout(cols, m);
    const auto parts = ranges(layout);
    const Values v = random_values(rng, rows * cols);
    const std::size_t i = bmih::uniform_index(rng, rows);
    std::size_t j = bmih::uniform_index(rng, rows);
    while (j == i) j = bmih::uniform_index(rng, rows);
    CheckResult out;
    if (psi_kink_gap(v, cols, parts, i, j) < kink_tolerance) {
        out.skipped = true;
        return out;
    }
    const bmih::Embedding emb(rows, layout, v);
    Values grad(v.size(), 0.0);
    const double value = bmih::psi_loss(emb, static_cast<bmih::ItemId>(i), static_cast<bmih::ItemId>(j), grad);
    // r' is held fixed at its value for the unperturbed point.
    const double target = psi_target(v, cols, m, i, j);
    const auto f = [&](const Values& x) { return psi_value(x, cols, parts, i, j, target); };
    out.value_gap = std::abs(value - f(v));
    out.error = relative_error(grad, central_difference(v, f));
    return out;
}

inline CheckResult check_phi(bmih::Rng& rng, double kink_tolerance = 1e-6) {
    const std::size_t rows = 3 + bmih::uniform_index(rng, 6);
    const std::size_t cols = 2 + bmih::uniform_index(rng, 15);
    const std::size_t m = 1 + bmih::uniform_index(rng, std::min<std::size_t>(cols, 4));
    const bmih::SubstringLayout layout(cols, m);
    const std::size_t table = bmih::uniform_index(rng, m);
    const Range r = ranges(layout)[table];
    // Small values keep substring distances near the 1 and 2 targets.
    Values v = random_values(rng, rows * cols);
    for (double& x : v) x *= 0.6;
    std::vector<bmih::ItemId> items;
    for (std::size_t i = 0; i < rows; ++i) {
        if (i == 0 || bmih::uniform_index(rng, 4) != 0) items.push_back(static_cast<bmih::ItemId>(i));
    }
    if (items.size() < 2) items = {0, 1};
    const Groups groups = random_groups(rng, items);
    CheckResult out;
    if (phi_kink_gap(v, cols, r, groups) < kink_tolerance) {
        out.skipped = true;
        return out;
    }
    const bmih::GroupAssignment ga(table, 0, groups);
    const bmih::Embedding emb(rows, layout, v);
    Values grad(v.size(), 0.0);
    const double value = bmih::phi_loss(ga, emb, grad);
    const auto f = [&](const Values& x) { return phi_value(x, cols, r, groups); };
    out.value_gap = std::abs(value - f(v));
    out.error = relative_error(grad, central_difference(v, f));
    return out;
}

inline CheckResult check_total(bmih::Rng& rng, double kink_tolerance = 1e-6) {
    const std::size_t rows = 4 + bmih::uniform_index(rng, 5);
    const std::size_t cols = 4 + bmih::uniform_index(rng, 13);
    const std::size_t m = 1 + bmih::uniform_index(rng, 4);
    const bmih::SubstringLayout layout(cols, m);
    const auto parts = ranges(layout);
    Values v = random_values(rng, rows * cols);
    for (double& x : v) x *= 0.8;

    bmih::ObjectiveParams params;
    params.epsilon = 0.5 + bmih::uniform_unit(rng) * static_cast<double>(cols) / 4.0;
    params.lambda = bmih::uniform_unit(rng);
    params.beta = bmih::uniform_unit(rng);

    std::vector<bmih::Triplet> triplets;
    std::vector<bmih::ItemPair> pairs;
    for (int t = 0; t < 3; ++t) {
        bmih::Triplet tr;
        tr.anchor = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows));
        do tr.positive = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows)); while (tr.positive == tr.anchor);
        do tr.negative = static_cast<bmih::ItemId>(bmih::uniform_index(rng, rows)); while (tr.negative == tr.anchor || tr.negative == tr.positive);
        triplets.push_back(tr);
        pairs.emplace_back(tr.anchor, tr.positive);
        pairs.emplace_back(tr.anchor, tr.negative);
    }
    std::vector<bmih::ItemId> items(rows);
    for (std::size_t i = 0; i < rows; ++i) items[i] = static_cast<bmih::ItemId>(i);
    const std::size_t table = bmih::uniform_index(rng, m);
    const Groups groups = random_groups(rng, items);

    double gap = phi_kink_gap(v, cols, parts[table], groups);
    for (const auto& t : triplets) gap = std::min(gap, triplet_kink_gap(v, cols, t, params.epsilon));
    for (const auto& [a, b] : pairs) gap = std::min(gap, psi_kink_gap(v, cols, parts, a, b));
    CheckResult out;
    if (gap < kink_tolerance) {
        out.skipped = true;
        return out;
    }

    std::vector<double> targets;
    for (const auto& [a, b] : pairs) targets.push_back(psi_target(v, cols, m, a, b));
    const auto f = [&](const Values& x) {
        double s = 0.0;
        for (const auto& t : triplets) s += triplet_value(x, cols, t, params.epsilon);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            s += params.lambda * psi_value(x, cols, parts, pairs[p].first, pairs[p].second, targets[p]);
        }
        return s + params.beta * phi_value(x, cols, parts[table], groups);
    };
    const std::vector<bmih::GroupAssignment> assignments{bmih::GroupAssignment(table, 0, groups)};
    const bmih::Embedding emb(rows, layout, v);
    const auto total = bmih::total_objective(emb, triplets, pairs, assignments, params);
    out.value_gap = std::abs(total.value - f(v));
    out.error = relative_error(total.gradient, central_difference(v, f));
    return out;
}

}  // namespace gradcheck
