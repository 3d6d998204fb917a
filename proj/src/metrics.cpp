#include "bmih/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace bmih {

namespace {

BalanceReport summarize(const std::vector<std::vector<std::size_t>>& tables) {
    BalanceReport report;
    double gini_sum = 0.0;
    for (const auto& sizes : tables) {
        report.per_table_entropy.push_back(occupancy_entropy(sizes));
        report.occupied_buckets.push_back(sizes.size());
        if (!sizes.empty()) report.max_bucket = std::max(report.max_bucket, *std::max_element(sizes.begin(), sizes.end()));
        gini_sum += occupancy_gini(sizes);
    }
    report.entropy = std::accumulate(report.per_table_entropy.begin(), report.per_table_entropy.end(), 0.0) /
                     static_cast<double>(tables.size());
    report.gini = gini_sum / static_cast<double>(tables.size());
    return report;
}

}  // namespace

double occupancy_entropy(std::span<const std::size_t> bucket_sizes) {
    const double total = static_cast<double>(std::accumulate(bucket_sizes.begin(), bucket_sizes.end(), std::size_t{0}));
    if (total == 0.0) return 0.0;
    double h = 0.0;
    for (std::size_t c : bucket_sizes) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return std::max(h, 0.0);
}

double occupancy_gini(std::span<const std::size_t> bucket_sizes) {
    std::vector<std::size_t> sorted(bucket_sizes.begin(), bucket_sizes.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double total = static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::size_t{0}));
    if (sorted.empty() || total == 0.0) return 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * static_cast<double>(sorted[i]);
    }
    return weighted / (n * total);
}

BalanceReport bucket_entropy(const MultiIndex& index) {
    if (index.size() == 0) throw std::invalid_argument("bucket_entropy: index is empty");
    std::vector<std::vector<std::size_t>> tables(index.tables());
    for (std::size_t j = 0; j < index.tables(); ++j) {
        const SubstringTable& t = index.table(j);
        for (std::size_t b = 0; b < t.bucket_count(); ++b) tables[j].push_back(t.bucket_size_at(b));
    }
    return summarize(tables);
}

BalanceReport code_balance(const CodeDatabase& db, const SubstringLayout& layout) {
    if (db.empty()) throw std::invalid_argument("code_balance: no codes");
    if (db.bits() != layout.bits()) throw std::invalid_argument("code_balance: layout length mismatch");
    std::vector<std::vector<std::size_t>> tables(layout.tables());
    std::vector<SubcodeKey> keys(db.size());
    for (std::size_t j = 0; j < layout.tables(); ++j) {
        for (std::size_t i = 0; i < db.size(); ++i) keys[i] = extract_bits(db.code_words(i), layout.offset(j), layout.width(j));
        std::sort(keys.begin(), keys.end());
        std::size_t run = 1;
        for (std::size_t i = 1; i <= keys.size(); ++i) {
            if (i < keys.size() && keys[i] == keys[i - 1]) {
                ++run;
            } else {
                tables[j].push_back(run);
                run = 1;
            }
        }
    }
    return summarize(tables);
}

std::vector<ItemId> hamming_ranking(const CodeDatabase& db, CodeView query) {
    if (query.bits() != db.bits()) throw std::invalid_argument("hamming_ranking: query length mismatch");
    // Counting sort on distance keeps ids ascending within each distance.
    std::vector<std::uint32_t> dist(db.size());
    std::vector<std::size_t> start(db.bits() + 2, 0);
    for (std::size_t i = 0; i < db.size(); ++i) {
        dist[i] = hamming_words(db.code_words(i), query.words().data(), db.words_per_code());
        ++start[dist[i] + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<ItemId> order(db.size());
    for (std::size_t i = 0; i < db.size(); ++i) order[start[dist[i]]++] = static_cast<ItemId>(i);
    return order;
}

double mean_average_precision(std::span<const std::vector<ItemId>> rankings, const Relevance& relevant) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < rankings.size(); ++q) {
        std::size_t hits = 0;
        double precision_sum = 0.0;
        for (std::size_t pos = 0; pos < rankings[q].size(); ++pos) {
            if (relevant(q, rankings[q][pos])) {
                ++hits;
                precision_sum += static_cast<double>(hits) / static_cast<double>(pos + 1);
            }
        }
        if (hits == 0) {
            std::cerr << "warning: query " << q << " has no relevant items; excluded from MAP\n";
            continue;
        }
        sum += precision_sum / static_cast<double>(hits);
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("mean_average_precision: no query has a relevant item");
    return sum / static_cast<double>(counted);
}

double mean_average_precision(std::span<const std::vector<ItemId>> rankings, const Labels& query_labels,
                              const Labels& db_labels) {
    if (query_labels.size() != rankings.size()) throw std::invalid_argument("mean_average_precision: one label per query");
    return mean_average_precision(rankings, [&](std::size_t q, ItemId id) {
        return Labels::share_label(query_labels.of(q), db_labels.of(id));
    });
}

double precision_at_k(std::span<const std::vector<ItemId>> rankings, const Relevance& relevant, std::size_t k) {
    if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
    if (rankings.empty()) throw std::invalid_argument("precision_at_k: no queries");
    double sum = 0.0;
    for (std::size_t q = 0; q < rankings.size(); ++q) {
        std::size_t hits = 0;
        for (std::size_t pos = 0; pos < std::min(k, rankings[q].size()); ++pos) {
            if (relevant(q, rankings[q][pos])) ++hits;
        }
        sum += static_cast<double>(hits) / static_cast<double>(k);
    }
    return sum / static_cast<double>(rankings.size());
}

double precision_at_k(std::span<const std::vector<ItemId>> rankings, const Labels& query_labels,
                      const Labels& db_labels, std::size_t k) {
    if (query_labels.size() != rankings.size()) throw std::invalid_argument("precision_at_k: one label per query");
    return precision_at_k(
        rankings, [&](std::size_t q, ItemId id) { return Labels::share_label(query_labels.of(q), db_labels.of(id)); },
        k);
}

}  // namespace bmih
