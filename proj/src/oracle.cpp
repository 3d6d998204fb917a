#include "bmih/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bmih {

namespace {

constexpr double kMinSampleSeconds = 0.02;

using Entry = std::pair<std::uint32_t, ItemId>;

void check(const CodeDatabase& db, CodeView query) {
    if (db.empty()) throw std::invalid_argument("linear scan: empty database");
    if (query.bits() != db.bits()) throw std::invalid_argument("linear scan: query length mismatch");
}

Neighbors to_neighbors(std::vector<Entry>& entries, std::size_t scanned) {
    std::sort(entries.begin(), entries.end());
    Neighbors out;
    out.ids.reserve(entries.size());
    out.distances.reserve(entries.size());
    for (const auto& [d, id] : entries) {
        out.distances.push_back(d);
        out.ids.push_back(id);
    }
    out.stats.candidates_checked = scanned;
    out.stats.unique_candidates = scanned;
    out.stats.full_distance_evals = scanned;
    return out;
}

template <std::size_t Words>
void scan_fixed(const CodeDatabase& db, const std::uint64_t* q, std::size_t want, std::vector<Entry>& heap) {
    const std::uint64_t* base = db.raw_words().data();
    const std::size_t n = db.size();
    std::uint32_t worst = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t d = 0;
        for (std::size_t w = 0; w < Words; ++w) d += static_cast<std::uint32_t>(std::popcount(base[i * Words + w] ^ q[w]));
        // Ids arrive in ascending order, so an equal distance never displaces the heap top.
        if (d >= worst && heap.size() == want) continue;
        if (heap.size() < want) {
            heap.emplace_back(d, static_cast<ItemId>(i));
            std::push_heap(heap.begin(), heap.end());
        } else {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = {d, static_cast<ItemId>(i)};
            std::push_heap(heap.begin(), heap.end());
        }
        if (heap.size() == want) worst = heap.front().first;
    }
}

void scan_generic(const CodeDatabase& db, const std::uint64_t* q, std::size_t want, std::vector<Entry>& heap) {
    const std::size_t n = db.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Entry cand{hamming_words(db.code_words(i), q, db.words_per_code()), static_cast<ItemId>(i)};
        if (heap.size() < want) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

Neighbors linear_knn(const CodeDatabase& db, CodeView query, std::size_t k) {
    check(db, query);
    if (k == 0) throw std::invalid_argument("linear_knn: k must be >= 1");
    const std::size_t want = std::min(k, db.size());
    std::vector<Entry> heap;
    heap.reserve(want);
    const std::uint64_t* q = query.words().data();
    switch (db.words_per_code()) {
        case 1: scan_fixed<1>(db, q, want, heap); break;
        case 2: scan_fixed<2>(db, q, want, heap); break;
        case 4: scan_fixed<4>(db, q, want, heap); break;
        default: scan_generic(db, q, want, heap); break;
    }
    return to_neighbors(heap, db.size());
}

Neighbors linear_r_neighbors(const CodeDatabase& db, CodeView query, std::size_t radius) {
    check(db, query);
    if (radius > db.bits()) throw std::invalid_argument("linear_r_neighbors: radius exceeds code length");
    std::vector<Entry> hits;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const std::uint32_t d = hamming_words(db.code_words(i), query.words().data(), db.words_per_code());
        if (d <= radius) hits.emplace_back(d, static_cast<ItemId>(i));
    }
    return to_neighbors(hits, db.size());
}

SpeedupMeasurement speedup_factor(const MultiIndex& index, const CodeDatabase& queries, std::size_t k,
                                  std::size_t repetitions) {
    if (queries.empty()) throw std::invalid_argument("speedup_factor: need at least one query");
    if (repetitions < 3) throw std::invalid_argument("speedup_factor: need at least 3 repetitions");
    if (queries.bits() != index.codes().bits()) throw std::invalid_argument("speedup_factor: query length mismatch");

    Searcher searcher(index);
    std::vector<double> linear_times;
    std::vector<double> index_times;
    volatile std::uint64_t sink = 0;
    // Seconds per batch, looping short batches so each sample spans at least kMinSampleSeconds.
    const auto time_batch = [&](auto&& one_query) {
        const auto start = std::chrono::steady_clock::now();
        std::size_t passes = 0;
        double elapsed = 0.0;
        do {
            for (std::size_t q = 0; q < queries.size(); ++q) sink = sink + one_query(queries.code(q));
            ++passes;
            elapsed = seconds_since(start);
        } while (elapsed < kMinSampleSeconds);
        return elapsed / static_cast<double>(passes);
    };
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        linear_times.push_back(time_batch([&](CodeView q) { return linear_knn(index.codes(), q, k).ids.front(); }));
        index_times.push_back(time_batch([&](CodeView q) { return searcher.knn(q, k).ids.front(); }));
    }

    SpeedupMeasurement out;
    out.repetitions = repetitions;
    out.linear_seconds = median(linear_times);
    out.index_seconds = median(index_times);
    if (out.linear_seconds <= 0.0 || out.index_seconds <= 0.0) {
        throw std::runtime_error("speedup_factor: measured zero time, batch too small");
    }
    out.ratio = out.linear_seconds / out.index_seconds;
    return out;
}

}  // namespace bmih
