#include <doctest.h>

#include "bmih/embedding.hpp"
#include "bmih/losses.hpp"
#include "gradcheck.hpp"

using namespace bmih;

namespace {

// +1 / -1 rows from '0'/'1' strings.
Embedding sign_rows(const std::vector<std::string>& rows, std::size_t tables) {
    const std::size_t cols = rows.front().size();
    std::vector<double> v;
    for (const auto& r : rows) {
        for (char c : r) v.push_back(c == '1' ? 1.0 : -1.0);
    }
    return Embedding(rows.size(), SubstringLayout(cols, tables), v);
}

}  // namespace

TEST_CASE("relaxed distance") {
    const auto emb = sign_rows({"10110100", "10110100", "01110101"}, 2);
    CHECK(relaxed_distance(emb.row(0), emb.row(1)) == 0.0);
    CHECK(relaxed_distance(emb.row(0), emb.row(2)) == 3.0);
    CHECK(relaxed_distance(emb.row(0), emb.row(2), emb.layout(), 0) == 2.0);
    CHECK(relaxed_distance(emb.row(0), emb.row(2), emb.layout(), 1) == 1.0);

    Rng rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = gradcheck::random_values(rng, 2 * 13);
        const Embedding e(2, SubstringLayout(13, 3), v);
        CHECK(relaxed_distance(e.row(0), e.row(1)) == doctest::Approx(gradcheck::dist(v, 13, 0, 1, {0, 13})));
        CHECK(relaxed_distance(e.row(0), e.row(1), 5, 9) == doctest::Approx(gradcheck::dist(v, 13, 0, 1, {5, 9})));
    }
}

TEST_CASE("triplet loss values") {
    // D+ = 0, D- = 8: inactive.
    auto emb = sign_rows({"00000000", "00000000", "11111111"}, 1);
    CHECK(triplet_loss(emb, {0, 1, 2}, 4.0) == 0.0);
    // D+ = 1, D- = 3: 4 + 1 - 3.
    emb = sign_rows({"00000000", "10000000", "11100000"}, 1);
    CHECK(triplet_loss(emb, {0, 1, 2}, 4.0) == 2.0);
    CHECK_THROWS_AS(triplet_loss(emb, {0, 0, 2}, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(triplet_loss(emb, {0, 1, 0}, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(triplet_loss(emb, {0, 1, 7}, 4.0), std::invalid_argument);
    std::vector<double> small(3);
    CHECK_THROWS_AS(triplet_loss(emb, {0, 1, 2}, 4.0, small), std::invalid_argument);
}

TEST_CASE("feature-level loss values") {
    // Substring distances (2, 1), full 3, m = 2: r' = 1 and both inside [1, 2].
    auto emb = sign_rows({"00000000", "11001000"}, 2);
    CHECK(psi_loss(emb, 0, 1) == 0.0);
    // Substring distances (3, 0): (3 - 2) + (1 - 0).
    emb = sign_rows({"00000000", "11100000"}, 2);
    CHECK(psi_loss(emb, 0, 1) == 2.0);
    CHECK_THROWS_AS(psi_loss(emb, 1, 1), std::invalid_argument);
}

TEST_CASE("total objective special cases") {
    Rng rng(73);
    const auto v = gradcheck::random_values(rng, 5 * 12);
    const Embedding emb(5, SubstringLayout(12, 3), v);
    const std::vector<Triplet> triplets{{0, 1, 2}, {3, 4, 0}};
    const std::vector<ItemPair> pairs{{0, 1}, {0, 2}};
    const std::vector<GroupAssignment> assignments{GroupAssignment(1, 0, {{{0, 1}}, {{2}, {3, 4}}})};

    ObjectiveParams none = ObjectiveParams::defaults_for(12);
    none.lambda = 0.0;
    none.beta = 0.0;
    const auto only_triplet = total_objective(emb, triplets, pairs, assignments, none);
    std::vector<double> grad(v.size(), 0.0);
    const double direct = triplet_loss(emb, triplets[0], none.epsilon, grad) + triplet_loss(emb, triplets[1], none.epsilon, grad);
    CHECK(only_triplet.value == doctest::Approx(direct));
    CHECK(only_triplet.gradient == grad);
    CHECK(only_triplet.psi_term == 0.0);
    CHECK(only_triplet.phi_term == 0.0);

    const Embedding flat(3, SubstringLayout(8, 2), std::vector<double>(24, 0.3));
    const std::vector<Triplet> one{{0, 1, 2}};
    const auto eps_only = total_objective(flat, one, {}, {}, ObjectiveParams::defaults_for(8));
    CHECK(eps_only.value == 4.0);

    ObjectiveParams bad = ObjectiveParams::defaults_for(8);
    bad.k_prime = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ObjectiveParams{};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gradients match central differences") {
    Rng rng(79);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        for (const auto& result : {gradcheck::check_triplet(rng), gradcheck::check_psi(rng), gradcheck::check_phi(rng),
                                   gradcheck::check_total(rng)}) {
            if (result.skipped) continue;
            ++checked;
            CHECK(result.error < 1e-4);
            CHECK(result.value_gap < 1e-9);
        }
    }
    CHECK(checked > 140);
}

TEST_CASE("hinge gradient is zero on the flat side") {
    auto emb = sign_rows({"00000000", "00000000", "11111111"}, 1);
    std::vector<double> grad(emb.values().size(), 0.0);
    triplet_loss(emb, {0, 1, 2}, 4.0, grad);
    CHECK(std::all_of(grad.begin(), grad.end(), [](double g) { return g == 0.0; }));
}
