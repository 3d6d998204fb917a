#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bmih/codes.hpp"
#include "bmih/embedding.hpp"
#include "bmih/labels.hpp"
#include "bmih/losses.hpp"
#include "bmih/random.hpp"

namespace bmih {

/// Which balance terms are active: DMIH both, DeepHash none (triplet only),
/// FeatureOnly psi, InstanceOnly phi.
enum class Variant { DMIH, DeepHash, FeatureOnly, InstanceOnly };

const char* to_string(Variant v);
/// Accepts "dmih", "deephash", "feature", "instance" (case-insensitive). Throws std::invalid_argument.
Variant parse_variant(std::string_view name);

struct TrainConfig {
    ObjectiveParams params;  // epsilon <= 0 means l/2
    std::size_t epochs = 200;
    std::size_t batch_size = 250;
    double learning_rate = 0.05;
    std::size_t regroup_interval = 10;
    std::size_t triplets_per_anchor = 1;
    std::uint64_t seed = 1;
    Variant variant = Variant::DMIH;

    /// params with the variant's disabled terms zeroed and epsilon resolved for `bits`.
    ObjectiveParams effective_params(std::size_t bits) const;
    void validate() const;
};

struct TrainReport {
    std::vector<double> loss_curve;  // summed objective per epoch
    double final_entropy = 0.0;
    double final_map = 0.0;
    double seconds = 0.0;
    std::size_t regroups = 0;
    std::size_t last_overfull_buckets = 0;
};

struct TrainResult {
    Embedding embedding;
    CodeDatabase codes;
    TrainReport report;
};

class TrainingDiverged : public std::runtime_error {
public:
    explicit TrainingDiverged(std::size_t epoch)
        : std::runtime_error("training diverged (non-finite loss) in epoch " + std::to_string(epoch)), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

/// n rows of i.i.d. uniform [-0.5, 0.5) entries, deterministic per seed.
Embedding init_embedding(std::size_t rows, const SubstringLayout& layout, std::uint64_t seed);

/// For every anchor in the batch that has both a related and an unrelated batch
/// member, draws `per_anchor` triplets with positive and negative chosen uniformly.
/// Throws std::invalid_argument if no anchor qualifies (e.g. one class, or all labels distinct).
std::vector<Triplet> sample_triplets(const Labels& labels, std::span<const ItemId> batch, Rng& rng,
                                     std::size_t per_anchor = 1);

/// bit t = 1 iff value >= 0.
CodeDatabase binarize(const Embedding& emb);

/// Mean average precision of Hamming ranking, each sampled item querying all others.
double leave_one_out_map(const CodeDatabase& codes, const Labels& labels, std::size_t max_queries = 500);

/// Mini-batch projected gradient descent on the total objective over a free
/// per-item embedding. Every regroup_interval epochs (instance term active) the
/// embedding is binarized, indexed, and overfull buckets are regrouped.
/// Throws TrainingDiverged on a non-finite loss.
TrainResult train(const Labels& labels, const SubstringLayout& layout, const TrainConfig& config);

}  // namespace bmih
