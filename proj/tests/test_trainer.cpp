#include <doctest.h>

#include <map>

#include "bmih/metrics.hpp"
#include "bmih/trainer.hpp"
#include "support.hpp"

using namespace bmih;

namespace {

Labels two_classes(std::size_t n) {
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i % 2);
    return Labels::single(labels);
}

}  // namespace

TEST_CASE("variant names") {
    CHECK(parse_variant("DMIH") == Variant::DMIH);
    CHECK(parse_variant("deephash") == Variant::DeepHash);
    CHECK(parse_variant("feature") == Variant::FeatureOnly);
    CHECK(parse_variant("Instance") == Variant::InstanceOnly);
    CHECK_THROWS_AS(parse_variant("bogus"), std::invalid_argument);
    TrainConfig c;
    c.variant = Variant::FeatureOnly;
    const auto p = c.effective_params(32);
    CHECK(p.epsilon == 16.0);
    CHECK(p.lambda == 0.1);
    CHECK(p.beta == 0.0);
    c.variant = Variant::InstanceOnly;
    CHECK(c.effective_params(32).lambda == 0.0);
    CHECK(c.effective_params(32).beta == 0.1);
}

TEST_CASE("config validation") {
    TrainConfig c;
    c.batch_size = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.learning_rate = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.regroup_interval = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.params.k_prime = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("initial embedding") {
    const SubstringLayout layout(20, 2);
    const auto a = init_embedding(500, layout, 5);
    CHECK(a == init_embedding(500, layout, 5));
    CHECK_FALSE(a == init_embedding(500, layout, 6));
    double sum = 0.0;
    for (double v : a.values()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / static_cast<double>(a.values().size())) < 0.02);
}

TEST_CASE("triplet sampling: only valid triplets, uniformly") {
    const auto labels = Labels::single({0, 0, 1, 1});
    const std::vector<ItemId> batch{0, 1, 2, 3};
    Rng rng(91);
    std::map<Triplet, std::size_t> counts;
    const std::size_t draws = 25000;
    for (std::size_t d = 0; d < draws; ++d) {
        for (const auto& t : sample_triplets(labels, batch, rng)) ++counts[t];
    }
    // Every valid (a, p, n): p related to a, n unrelated.
    std::vector<Triplet> valid;
    for (ItemId a = 0; a < 4; ++a) {
        for (ItemId p = 0; p < 4; ++p) {
            for (ItemId n = 0; n < 4; ++n) {
                if (a != p && a != n && labels.related(a, p) && !labels.related(a, n)) valid.push_back({a, p, n});
            }
        }
    }
    REQUIRE(valid.size() == 8);
    CHECK(counts.size() == 8);
    // Each anchor draws one of its two triplets per call: Binomial(draws, 1/2).
    const double mean = draws / 2.0;
    const double sigma = std::sqrt(draws * 0.25);
    for (const auto& t : valid) CHECK(std::abs(static_cast<double>(counts[t]) - mean) < 3.0 * sigma);

    CHECK_THROWS_AS(sample_triplets(Labels::single({0, 1, 2, 3}), batch, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_triplets(Labels::single({5, 5, 5, 5}), batch, rng), std::invalid_argument);
    const std::vector<ItemId> outside{0, 9};
    CHECK_THROWS_AS(sample_triplets(labels, outside, rng), std::out_of_range);
}

TEST_CASE("binarize by sign with zero mapped to one") {
    const SubstringLayout layout(5, 1);
    CHECK(binarize(Embedding(1, layout, std::vector<double>(5, 0.7))).code(0).to_string() == "11111");
    CHECK(binarize(Embedding(1, layout, std::vector<double>(5, 0.0))).code(0).to_string() == "11111");
    CHECK(binarize(Embedding(1, layout, {-0.1, 0.2, -0.0, -1.0, 1.0})).code(0).to_string() == "01101");
    Rng rng(93);
    const auto emb = init_embedding(40, SubstringLayout(70, 3), 3);
    const auto codes = binarize(emb);
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t t = 0; t < 70; ++t) CHECK(codes.code(i).bit(t) == (emb.at(i, t) >= 0.0));
    }
}

TEST_CASE("zero epochs leaves the initial embedding") {
    TrainConfig c;
    c.epochs = 0;
    c.seed = 4;
    const SubstringLayout layout(16, 2);
    const auto r = train(two_classes(60), layout, c);
    CHECK(r.embedding == init_embedding(60, layout, 4));
    CHECK(r.report.loss_curve.empty());
    CHECK(r.codes.size() == 60);
}

TEST_CASE("zero learning rate changes nothing") {
    TrainConfig c;
    c.epochs = 3;
    c.learning_rate = 0.0;
    c.batch_size = 20;
    const SubstringLayout layout(16, 2);
    const auto r = train(two_classes(60), layout, c);
    CHECK(r.embedding == init_embedding(60, layout, c.seed));
    CHECK(r.report.loss_curve.size() == 3);
}

TEST_CASE("training is deterministic per seed") {
    TrainConfig c;
    c.epochs = 12;
    c.batch_size = 50;
    c.regroup_interval = 4;
    c.params.k_prime = 5;
    const SubstringLayout layout(16, 2);
    const auto labels = Labels::single([] {
        std::vector<std::uint32_t> v(200);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::uint32_t>(i % 4);
        return v;
    }());
    const auto a = train(labels, layout, c);
    const auto b = train(labels, layout, c);
    CHECK(a.embedding == b.embedding);
    CHECK(a.report.loss_curve == b.report.loss_curve);
    CHECK(a.report.regroups == 3);
    c.seed = 2;
    CHECK_FALSE(train(labels, layout, c).embedding == a.embedding);
}

TEST_CASE("triplet-only training separates two classes") {
    TrainConfig c;
    c.variant = Variant::DeepHash;
    c.epochs = 60;
    c.batch_size = 100;
    const auto r = train(two_classes(400), SubstringLayout(16, 2), c);
    CHECK(r.report.final_map >= 0.95);
    CHECK(r.report.loss_curve.back() < r.report.loss_curve.front());
    CHECK(leave_one_out_map(r.codes, two_classes(400)) == doctest::Approx(r.report.final_map));
}

TEST_CASE("balance terms raise code entropy on the same seed") {
    std::vector<std::uint32_t> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::uint32_t>(i % 5);
    const auto labels = Labels::single(v);
    const SubstringLayout layout(16, 2);
    TrainConfig c;
    c.epochs = 60;
    c.variant = Variant::DeepHash;
    const auto plain = train(labels, layout, c);
    c.variant = Variant::DMIH;
    const auto balanced = train(labels, layout, c);
    CHECK(balanced.report.final_entropy > plain.report.final_entropy);
    CHECK(balanced.report.regroups == 6);
}

TEST_CASE("multi-label training keeps codes unlabeled") {
    TrainConfig c;
    c.epochs = 2;
    c.batch_size = 10;
    const auto labels = Labels::multi({{0, 1}, {1}, {2}, {2, 3}, {0}, {3}, {1, 2}, {0, 3}, {4}, {4, 0}});
    const auto r = train(labels, SubstringLayout(8, 2), c);
    CHECK_FALSE(r.codes.labels().has_value());
}
