#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bmih/codes.hpp"
#include "bmih/labels.hpp"
#include "bmih/multi_index.hpp"

namespace bmih {

/// Load balance of the substring tables. Entropies are in bits.
struct BalanceReport {
    double entropy = 0.0;  // mean of per_table_entropy
    std::vector<double> per_table_entropy;
    std::size_t max_bucket = 0;  // largest bucket over all tables
    std::vector<std::size_t> occupied_buckets;
    double gini = 0.0;  // mean over tables of the Gini coefficient of occupied bucket sizes
};

/// Shannon entropy (base 2) of the occupancy distribution n(i)/N. Zero-size
/// buckets contribute nothing.
double occupancy_entropy(std::span<const std::size_t> bucket_sizes);

/// Gini coefficient of the given sizes, 0 for perfectly even loads.
double occupancy_gini(std::span<const std::size_t> bucket_sizes);

/// Balance of a built index. Throws std::invalid_argument if the index is empty.
BalanceReport bucket_entropy(const MultiIndex& index);

/// Same report computed straight from codes, without building tables.
BalanceReport code_balance(const CodeDatabase& db, const SubstringLayout& layout);

/// All database ids ordered by (Hamming distance to query, id).
std::vector<ItemId> hamming_ranking(const CodeDatabase& db, CodeView query);

/// relevant(query_index, item_id)
using Relevance = std::function<bool(std::size_t, ItemId)>;

/// Mean over queries of average precision over each ranked list. Queries with
/// no relevant item in their list are skipped with a warning on stderr; throws
/// std::invalid_argument when every query is skipped.
double mean_average_precision(std::span<const std::vector<ItemId>> rankings, const Relevance& relevant);
double mean_average_precision(std::span<const std::vector<ItemId>> rankings, const Labels& query_labels,
                              const Labels& db_labels);

/// Mean over queries of (relevant in top k) / k.
double precision_at_k(std::span<const std::vector<ItemId>> rankings, const Relevance& relevant, std::size_t k);
double precision_at_k(std::span<const std::vector<ItemId>> rankings, const Labels& query_labels,
                      const Labels& db_labels, std::size_t k);

}  // namespace bmih
