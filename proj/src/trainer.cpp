#include "bmih/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <numeric>

#include "bmih/metrics.hpp"
#include "bmih/multi_index.hpp"
#include "bmih/rebalance.hpp"

namespace bmih {

namespace {

// Distinct streams so that toggling one term never shifts another's draws.
constexpr std::uint64_t kInitStream = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kBatchStream = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kGroupStream = 0x8CB92BA72F3D8DD7ULL;

std::size_t sample_into(const Labels& labels, std::span<const ItemId> batch, Rng& rng, std::size_t per_anchor,
                        std::vector<Triplet>& out) {
    std::vector<ItemId> positives;
    std::vector<ItemId> negatives;
    std::size_t anchors = 0;
    for (ItemId anchor : batch) {
        positives.clear();
        negatives.clear();
        for (ItemId other : batch) {
            if (other == anchor) continue;
            (labels.related(anchor, other) ? positives : negatives).push_back(other);
        }
        if (positives.empty() || negatives.empty()) continue;
        ++anchors;
        for (std::size_t t = 0; t < per_anchor; ++t) {
            const ItemId p = positives[uniform_index(rng, positives.size())];
            const ItemId n = negatives[uniform_index(rng, negatives.size())];
            out.push_back({anchor, p, n});
        }
    }
    return anchors;
}

}  // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::DMIH: return "DMIH";
        case Variant::DeepHash: return "DeepHash";
        case Variant::FeatureOnly: return "FeatureOnly";
        case Variant::InstanceOnly: return "InstanceOnly";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "dmih" || lower == "both") return Variant::DMIH;
    if (lower == "deephash" || lower == "none") return Variant::DeepHash;
    if (lower == "feature" || lower == "featureonly") return Variant::FeatureOnly;
    if (lower == "instance" || lower == "instanceonly") return Variant::InstanceOnly;
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

ObjectiveParams TrainConfig::effective_params(std::size_t bits) const {
    ObjectiveParams p = params;
    if (p.epsilon <= 0.0) p.epsilon = static_cast<double>(bits) / 2.0;
    if (variant == Variant::DeepHash || variant == Variant::InstanceOnly) p.lambda = 0.0;
    if (variant == Variant::DeepHash || variant == Variant::FeatureOnly) p.beta = 0.0;
    return p;
}

void TrainConfig::validate() const {
    if (batch_size < 2) throw std::invalid_argument("train: batch_size must be >= 2");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("train: learning_rate must be finite and >= 0");
    }
    if (regroup_interval == 0) throw std::invalid_argument("train: regroup_interval must be >= 1");
    if (triplets_per_anchor == 0) throw std::invalid_argument("train: triplets_per_anchor must be >= 1");
    effective_params(1).validate();
}

Embedding init_embedding(std::size_t rows, const SubstringLayout& layout, std::uint64_t seed) {
    if (rows == 0) throw std::invalid_argument("init_embedding: need at least one row");
    Rng rng(seed ^ kInitStream);
    std::vector<double> values(rows * layout.bits());
    for (double& v : values) v = uniform_unit(rng) - 0.5;
    return Embedding(rows, layout, std::move(values));
}

std::vector<Triplet> sample_triplets(const Labels& labels, std::span<const ItemId> batch, Rng& rng,
                                     std::size_t per_anchor) {
    for (ItemId id : batch) {
        if (id >= labels.size()) throw std::out_of_range("sample_triplets: id without a label");
    }
    std::vector<Triplet> out;
    if (sample_into(labels, batch, rng, per_anchor, out) == 0) {
        throw std::invalid_argument("sample_triplets: no anchor has both a related and an unrelated batch member");
    }
    return out;
}

CodeDatabase binarize(const Embedding& emb) {
    const std::size_t l = emb.cols();
    const std::size_t stride = words_for_bits(l);
    std::vector<std::uint64_t> words(emb.rows() * stride, 0);
    for (std::size_t i = 0; i < emb.rows(); ++i) {
        const auto row = emb.row(i);
        for (std::size_t t = 0; t < l; ++t) {
            if (row[t] >= 0.0) words[i * stride + t / kWordBits] |= std::uint64_t{1} << (t % kWordBits);
        }
    }
    return CodeDatabase(l, std::move(words));
}

double leave_one_out_map(const CodeDatabase& codes, const Labels& labels, std::size_t max_queries) {
    if (codes.size() != labels.size()) throw std::invalid_argument("leave_one_out_map: one label per code");
    if (codes.size() < 2 || max_queries == 0) throw std::invalid_argument("leave_one_out_map: need two codes");
    const std::size_t step = std::max<std::size_t>(1, (codes.size() + max_queries - 1) / max_queries);
    std::vector<std::vector<ItemId>> rankings;
    std::vector<std::size_t> query_ids;
    for (std::size_t q = 0; q < codes.size(); q += step) {
        auto ranking = hamming_ranking(codes, codes.code(q));
        ranking.erase(std::find(ranking.begin(), ranking.end(), static_cast<ItemId>(q)));
        rankings.push_back(std::move(ranking));
        query_ids.push_back(q);
    }
    return mean_average_precision(rankings, [&](std::size_t qi, ItemId id) { return labels.related(query_ids[qi], id); });
}

TrainResult train(const Labels& labels, const SubstringLayout& layout, const TrainConfig& config) {
    config.validate();
    const std::size_t n = labels.size();
    if (n < 2) throw std::invalid_argument("train: need at least two labeled items");
    const auto start = std::chrono::steady_clock::now();
    const ObjectiveParams params = config.effective_params(layout.bits());
    const bool instance_level = params.beta > 0.0;

    TrainResult result{init_embedding(n, layout, config.seed), CodeDatabase(layout.bits()), {}};
    Embedding& emb = result.embedding;
    Rng batch_rng(config.seed ^ kBatchStream);
    Rng group_rng(config.seed ^ kGroupStream);

    std::vector<ItemId> order(n);
    std::iota(order.begin(), order.end(), ItemId{0});
    std::vector<double> grad(emb.values().size(), 0.0);
    std::vector<char> in_batch(n, 0);
    std::vector<GroupAssignment> assignments;
    std::vector<GroupAssignment> batch_assignments;
    std::vector<Triplet> triplets;
    std::vector<ItemPair> psi_pairs;
    const std::size_t cols = emb.cols();

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (instance_level && epoch % config.regroup_interval == 0) {
            const MultiIndex index = MultiIndex::build(binarize(emb), layout);
            const auto overfull = find_overfull_buckets(index, params.k_prime);
            assignments.clear();
            for (const auto& bucket : overfull) {
                assignments.push_back(group_bucket(bucket, index.codes(), params.k_prime, group_rng));
            }
            ++result.report.regroups;
            result.report.last_overfull_buckets = overfull.size();
        }

        shuffle(std::span<ItemId>(order), batch_rng);
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < n) {
            std::size_t len = std::min(config.batch_size, n - pos);
            // Fold a short tail into this batch rather than training on a sliver.
            if (n - pos - len > 0 && n - pos - len < config.batch_size / 2) len = n - pos;
            const std::span<const ItemId> batch(order.data() + pos, len);
            pos += len;

            triplets.clear();
            sample_into(labels, batch, batch_rng, config.triplets_per_anchor, triplets);
            psi_pairs.clear();
            if (params.lambda > 0.0) {
                for (const Triplet& t : triplets) {
                    psi_pairs.emplace_back(t.anchor, t.positive);
                    psi_pairs.emplace_back(t.anchor, t.negative);
                }
            }
            batch_assignments.clear();
            if (instance_level) {
                for (ItemId id : batch) in_batch[id] = 1;
                for (const auto& ga : assignments) {
                    auto sub = ga.restricted_to(in_batch);
                    if (sub.item_count() >= 2) batch_assignments.push_back(std::move(sub));
                }
                for (ItemId id : batch) in_batch[id] = 0;
            }

            const double value = accumulate_objective(emb, triplets, psi_pairs, batch_assignments, params, grad);
            if (!std::isfinite(value)) throw TrainingDiverged(epoch);
            epoch_loss += value;

            // Every gradient term touches batch rows only.
            for (ItemId id : batch) {
                auto row = emb.row(id);
                auto g = grad_row(grad, cols, id);
                for (std::size_t t = 0; t < cols; ++t) {
                    row[t] = std::clamp(row[t] - config.learning_rate * g[t], -1.0, 1.0);
                    g[t] = 0.0;
                }
            }
        }
        if (!std::isfinite(epoch_loss)) throw TrainingDiverged(epoch);
        result.report.loss_curve.push_back(epoch_loss);
    }

    result.codes = binarize(emb);
    if (!labels.is_multi()) {
        std::vector<std::uint32_t> flat(n);
        for (std::size_t i = 0; i < n; ++i) flat[i] = labels.of(i).front();
        result.codes.set_labels(std::move(flat));
    }
    result.report.final_entropy = code_balance(result.codes, layout).entropy;
    result.report.final_map = leave_one_out_map(result.codes, labels);
    result.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace bmih
