#include "bmih/multi_index.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <utility>

#include "bmih/ball.hpp"

namespace bmih {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SubstringTable::SubstringTable(std::span<const SubcodeKey> item_keys, std::size_t width) : width_(width) {
    std::vector<std::pair<SubcodeKey, ItemId>> order;
    order.reserve(item_keys.size());
    for (std::size_t i = 0; i < item_keys.size(); ++i) order.emplace_back(item_keys[i], static_cast<ItemId>(i));
    std::sort(order.begin(), order.end());

    ids_.reserve(order.size());
    offsets_.push_back(0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && order[i].first != order[i - 1].first) {
            offsets_.push_back(static_cast<std::uint32_t>(i));
        }
        if (i == 0 || order[i].first != order[i - 1].first) keys_.push_back(order[i].first);
        ids_.push_back(order[i].second);
    }
    offsets_.push_back(static_cast<std::uint32_t>(order.size()));
    if (order.empty()) offsets_.assign(1, 0);

    if (dense()) {
        slots_.assign(std::size_t{1} << width_, 0);
        for (std::size_t b = 0; b < keys_.size(); ++b) slots_[keys_[b]] = static_cast<std::uint32_t>(b + 1);
    } else {
        const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, keys_.size() * 2));
        slots_.assign(capacity, 0);
        slot_mask_ = capacity - 1;
        for (std::size_t b = 0; b < keys_.size(); ++b) {
            std::uint64_t s = mix(keys_[b]) & slot_mask_;
            while (slots_[s] != 0) s = (s + 1) & slot_mask_;
            slots_[s] = static_cast<std::uint32_t>(b + 1);
        }
    }
}

std::size_t SubstringTable::find(SubcodeKey key) const {
    if (dense()) {
        if (key >= slots_.size()) return kNone;
        const std::uint32_t s = slots_[key];
        return s == 0 ? kNone : s - 1;
    }
    if (slots_.empty()) return kNone;
    std::uint64_t s = mix(key) & slot_mask_;
    for (;;) {
        const std::uint32_t b = slots_[s];
        if (b == 0) return kNone;
        if (keys_[b - 1] == key) return b - 1;
        s = (s + 1) & slot_mask_;
    }
}

MultiIndex MultiIndex::build(std::shared_ptr<const CodeDatabase> db, const SubstringLayout& layout) {
    if (!db) throw std::invalid_argument("build: null database");
    if (layout.bits() != db->bits()) {
        throw std::invalid_argument("build: layout covers " + std::to_string(layout.bits()) +
                                    " bits but codes have " + std::to_string(db->bits()));
    }
    if (db->size() >= std::numeric_limits<ItemId>::max()) {
        throw std::invalid_argument("build: too many items for 32-bit ids");
    }
    for (auto w : layout.widths()) {
        if (w > kWordBits) throw std::invalid_argument("build: substring widths above 64 bits are not supported");
    }
    MultiIndex idx;
    idx.db_ = std::move(db);
    idx.layout_ = layout;
    const std::size_t n = idx.db_->size();
    std::vector<SubcodeKey> keys(n);
    idx.tables_.reserve(layout.tables());
    for (std::size_t j = 0; j < layout.tables(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            keys[i] = extract_bits(idx.db_->code_words(i), layout.offset(j), layout.width(j));
        }
        idx.tables_.emplace_back(keys, layout.width(j));
    }
    return idx;
}

MultiIndex MultiIndex::build(CodeDatabase db, const SubstringLayout& layout) {
    return build(std::make_shared<const CodeDatabase>(std::move(db)), layout);
}

Searcher::Searcher(const MultiIndex& index)
    : index_(&index), visited_(words_for_bits(std::max<std::size_t>(index.size(), 1)), 0) {}

void Searcher::check_query(CodeView query) const {
    if (query.bits() != index_->codes().bits()) {
        throw std::invalid_argument("query has " + std::to_string(query.bits()) + " bits, index expects " +
                                    std::to_string(index_->codes().bits()));
    }
}

void Searcher::reset() {
    for (ItemId id : touched_) visited_[id / kWordBits] = 0;
    touched_.clear();
}

template <typename Visit>
void Searcher::probe_shells(std::size_t table, SubcodeKey center, std::size_t lo, std::size_t hi,
                            SearchStats& stats, Visit&& visit) {
    const SubstringTable& t = index_->table(table);
    hi = std::min(hi, t.width());
    if (lo > hi) return;
    std::uint64_t enumerated = 0;
    for (std::size_t s = lo; s <= hi && enumerated <= t.bucket_count(); ++s) enumerated += binomial(t.width(), s);

    if (enumerated <= t.bucket_count()) {
        for (std::size_t s = lo; s <= hi; ++s) {
            for_each_key_at_distance(center, t.width(), s, [&](SubcodeKey key) {
                ++stats.buckets_probed;
                for (ItemId id : t.bucket(key)) visit(id);
            });
        }
        return;
    }
    // The ball is larger than the table: walk occupied buckets instead.
    const auto keys = t.keys();
    stats.buckets_probed += keys.size();
    for (std::size_t b = 0; b < keys.size(); ++b) {
        const auto d = static_cast<std::size_t>(std::popcount(keys[b] ^ center));
        if (d < lo || d > hi) continue;
        for (ItemId id : t.bucket_at(b)) visit(id);
    }
}

Neighbors Searcher::r_neighbors(CodeView query, std::size_t radius) {
    check_query(query);
    const CodeDatabase& db = index_->codes();
    if (radius > db.bits()) {
        throw std::invalid_argument("r_neighbors: radius " + std::to_string(radius) + " exceeds code length");
    }
    const std::size_t m = index_->tables();
    const auto base = static_cast<std::int64_t>(radius / m);
    const std::size_t extra = radius % m;

    Neighbors out;
    std::vector<std::pair<std::uint32_t, ItemId>> hits;
    auto visit = [&](ItemId id) {
        ++out.stats.candidates_checked;
        std::uint64_t& word = visited_[id / kWordBits];
        const std::uint64_t bit = std::uint64_t{1} << (id % kWordBits);
        if (word & bit) return;
        word |= bit;
        touched_.push_back(id);
        ++out.stats.unique_candidates;
        ++out.stats.full_distance_evals;
        const std::uint32_t d = hamming_words(query.words().data(), db.code_words(id), db.words_per_code());
        if (d <= radius) hits.emplace_back(d, id);
    };
    for (std::size_t j = 0; j < m; ++j) {
        const std::int64_t table_radius = j <= extra ? base : base - 1;
        if (table_radius < 0) continue;
        probe_shells(j, index_->key(query, j), 0, static_cast<std::size_t>(table_radius), out.stats, visit);
    }
    reset();
    std::sort(hits.begin(), hits.end());
    out.ids.reserve(hits.size());
    out.distances.reserve(hits.size());
    for (const auto& [d, id] : hits) {
        out.distances.push_back(d);
        out.ids.push_back(id);
    }
    out.stats.final_radius = base;
    return out;
}

Neighbors Searcher::knn(CodeView query, std::size_t k) {
    check_query(query);
    const CodeDatabase& db = index_->codes();
    if (db.empty()) throw std::invalid_argument("knn: index is empty");
    if (k == 0) throw std::invalid_argument("knn: k must be >= 1");
    const std::size_t want = std::min(k, db.size());
    const std::size_t m = index_->tables();

    Neighbors out;
    // Max-heap on (distance, id): the front is the current k-th best.
    std::vector<std::pair<std::uint32_t, ItemId>> heap;
    heap.reserve(want + 1);
    auto visit = [&](ItemId id) {
        ++out.stats.candidates_checked;
        std::uint64_t& word = visited_[id / kWordBits];
        const std::uint64_t bit = std::uint64_t{1} << (id % kWordBits);
        if (word & bit) return;
        word |= bit;
        touched_.push_back(id);
        ++out.stats.unique_candidates;
        ++out.stats.full_distance_evals;
        const std::pair<std::uint32_t, ItemId> cand{
            hamming_words(query.words().data(), db.code_words(id), db.words_per_code()), id};
        if (heap.size() < want) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    };

    std::vector<SubcodeKey> qkeys(m);
    std::size_t max_width = 0;
    for (std::size_t j = 0; j < m; ++j) {
        qkeys[j] = index_->key(query, j);
        max_width = std::max(max_width, index_->layout().width(j));
    }

    std::size_t radius = 0;
    bool done = false;
    for (; radius <= max_width && !done; ++radius) {
        for (std::size_t j = 0; j < m; ++j) {
            probe_shells(j, qkeys[j], radius, radius, out.stats, visit);
            // Tables 0..j probed at `radius` and the rest at radius-1: every
            // code within radius*m + j is now a candidate.
            const std::size_t guaranteed = radius * m + j;
            if (heap.size() == want && heap.front().first <= guaranteed) {
                done = true;
                break;
            }
        }
    }
    out.stats.final_radius = static_cast<std::int64_t>(done ? radius - 1 : max_width);
    reset();

    std::sort_heap(heap.begin(), heap.end());
    out.ids.reserve(heap.size());
    out.distances.reserve(heap.size());
    for (const auto& [d, id] : heap) {
        out.distances.push_back(d);
        out.ids.push_back(id);
    }
    return out;
}

Neighbors r_neighbor_search(const MultiIndex& index, CodeView query, std::size_t radius) {
    return Searcher(index).r_neighbors(query, radius);
}

Neighbors knn_search(const MultiIndex& index, CodeView query, std::size_t k) {
    return Searcher(index).knn(query, k);
}

std::vector<ItemId> raw_candidates(const MultiIndex& index, CodeView query, std::size_t table,
                                   std::int64_t radius) {
    if (table >= index.tables()) throw std::out_of_range("raw_candidates: table index out of range");
    if (query.bits() != index.codes().bits()) throw std::invalid_argument("raw_candidates: query length mismatch");
    std::vector<ItemId> ids;
    if (radius < 0) return ids;
    const SubstringTable& t = index.table(table);
    const SubcodeKey center = index.key(query, table);
    for (std::size_t b = 0; b < t.bucket_count(); ++b) {
        if (static_cast<std::int64_t>(std::popcount(t.keys()[b] ^ center)) <= radius) {
            const auto bucket = t.bucket_at(b);
            ids.insert(ids.end(), bucket.begin(), bucket.end());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace bmih
