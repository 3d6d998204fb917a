#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmih/codes.hpp"
#include "bmih/labels.hpp"
#include "bmih/multi_index.hpp"
#include "bmih/trainer.hpp"

namespace bmih {

/// An index answer disagreed with the linear-scan oracle.
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws VerificationError unless knn_search matches linear_knn for every query.
void verify_knn(const MultiIndex& index, const CodeDatabase& queries, std::size_t k);

struct SpeedRow {
    std::size_t k = 0;
    std::size_t m = 0;
    std::size_t queries = 0;
    double buckets_probed = 0.0;  // means per query
    double candidates_checked = 0.0;
    double unique_candidates = 0.0;
    double full_distance_evals = 0.0;
    double final_radius = 0.0;
    // Timing columns.
    double speedup = 0.0;
    double linear_seconds = 0.0;
    double index_seconds = 0.0;
};

/// One row per k: oracle verification first, then median-of-`repetitions` timings.
std::vector<SpeedRow> run_speed_table(const MultiIndex& index, const CodeDatabase& queries,
                                      const std::vector<std::size_t>& ks, std::size_t repetitions = 3);

void write_speed_csv(std::ostream& out, const std::vector<SpeedRow>& rows, bool include_timing = true);

/// Bit order chosen by hill climbing on mean table entropy: repeatedly apply the
/// best cross-table swap of two bit positions until none improves. Entry t is the
/// source bit placed at position t.
std::vector<std::uint32_t> greedy_bit_permutation(const CodeDatabase& db, const SubstringLayout& layout);

/// New bit t = old bit order[t]. Throws std::invalid_argument unless order is a permutation of 0..l-1.
CodeDatabase permute_bits(const CodeDatabase& db, const std::vector<std::uint32_t>& order);

/// Query / database split used by the experiments: `query_count` items picked by a
/// seeded shuffle become queries (returned ascending), the rest the database.
struct HoldoutSplit {
    std::vector<ItemId> queries;
    std::vector<ItemId> database;
};
HoldoutSplit holdout_split(std::size_t n, std::size_t query_count, std::uint64_t seed);

struct ComparisonRow {
    std::string method;
    std::string note;
    double entropy = 0.0;
    double map = 0.0;
    double knn_evals = 0.0;  // mean full-distance evaluations per 1-NN query
    // Timing columns.
    double speedup = 0.0;
    double linear_seconds = 0.0;
    double index_seconds = 0.0;
    double train_seconds = 0.0;
};

struct ExperimentOptions {
    std::size_t query_count = 200;
    std::size_t tables = 0;  // 0: suggested for the database size
    std::size_t repetitions = 3;
};

/// Trains DMIH and DeepHash with the same seed, derives the two-stage baseline by
/// rebalancing the DeepHash codes with greedy_bit_permutation (a stand-in for a
/// data-driven bit rearrangement), and reports entropy, MAP and verified 1-NN
/// speedup on a held-out query split. Rows: DMIH, DeepHash, TwoStage.
std::vector<ComparisonRow> run_two_stage(const Labels& labels, std::size_t bits, const TrainConfig& config,
                                         const ExperimentOptions& options = {});

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows, bool include_timing = true);

/// Flat key=value file; '#' starts a comment, blank lines ignored.
/// Throws std::runtime_error on a malformed line or unreadable file.
std::map<std::string, std::string> read_key_values(const std::string& path);

/// Applies recognised keys (epochs, batch_size, learning_rate, regroup_interval,
/// triplets_per_anchor, seed, variant, epsilon, lambda, beta, k_prime) onto
/// `config`; `options` takes queries, tables, reps. Unknown keys throw std::invalid_argument.
void apply_key_values(const std::map<std::string, std::string>& values, TrainConfig& config,
                      ExperimentOptions* options = nullptr);

}  // namespace bmih
