#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bmih/codes.hpp"

namespace bmih {

/// One substring hash table: occupied subcode keys mapped to sorted id buckets.
/// Widths up to kDenseWidthLimit use a direct 2^width slot array; wider keys
/// go through an open-addressing hash.
class SubstringTable {
public:
    static constexpr std::size_t kDenseWidthLimit = 16;

    SubstringTable() = default;
    SubstringTable(std::span<const SubcodeKey> item_keys, std::size_t width);

    std::size_t width() const { return width_; }
    bool dense() const { return width_ <= kDenseWidthLimit; }
    std::size_t bucket_count() const { return keys_.size(); }

    /// Items whose substring equals `key`; empty when the bucket is unoccupied.
    std::span<const ItemId> bucket(SubcodeKey key) const {
        const std::size_t b = find(key);
        return b == kNone ? std::span<const ItemId>{} : bucket_at(b);
    }

    /// Occupied buckets in ascending key order.
    std::span<const SubcodeKey> keys() const { return keys_; }
    std::span<const ItemId> bucket_at(std::size_t b) const {
        return {ids_.data() + offsets_[b], offsets_[b + 1] - offsets_[b]};
    }
    std::size_t bucket_size_at(std::size_t b) const { return offsets_[b + 1] - offsets_[b]; }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t find(SubcodeKey key) const;

    std::size_t width_ = 0;
    std::vector<SubcodeKey> keys_;
    std::vector<std::uint32_t> offsets_;
    std::vector<ItemId> ids_;
    // Bucket index + 1 per slot, 0 = empty. Dense: indexed by key. Sparse: hashed, linear probing.
    std::vector<std::uint32_t> slots_;
    std::uint64_t slot_mask_ = 0;
};

/// m substring tables over a shared, immutable code database.
class MultiIndex {
public:
    /// Throws std::invalid_argument if layout.bits() != db.bits(), a width exceeds 64,
    /// or n does not fit an ItemId.
    static MultiIndex build(std::shared_ptr<const CodeDatabase> db, const SubstringLayout& layout);
    static MultiIndex build(CodeDatabase db, const SubstringLayout& layout);

    const CodeDatabase& codes() const { return *db_; }
    std::shared_ptr<const CodeDatabase> shared_codes() const { return db_; }
    const SubstringLayout& layout() const { return layout_; }
    std::size_t size() const { return db_->size(); }
    std::size_t tables() const { return layout_.tables(); }
    const SubstringTable& table(std::size_t j) const { return tables_.at(j); }

    SubcodeKey key(CodeView c, std::size_t j) const {
        return extract_bits(c.words().data(), layout_.offset(j), layout_.width(j));
    }

private:
    std::shared_ptr<const CodeDatabase> db_;
    SubstringLayout layout_;
    std::vector<SubstringTable> tables_;
};

struct SearchStats {
    std::uint64_t buckets_probed = 0;      // key lookups, or buckets inspected by a table scan
    std::uint64_t candidates_checked = 0;  // bucket entries seen, duplicates included
    std::uint64_t unique_candidates = 0;
    std::uint64_t full_distance_evals = 0;
    std::int64_t final_radius = 0;  // substring radius r' reached
};

struct Neighbors {
    std::vector<ItemId> ids;
    std::vector<std::uint32_t> distances;
    SearchStats stats;

    std::size_t size() const { return ids.size(); }
};

/// Exact search over a MultiIndex. Owns per-query scratch, so one Searcher per
/// thread; the index itself can be shared.
class Searcher {
public:
    explicit Searcher(const MultiIndex& index);

    /// {i : D(q, codes[i]) <= r}, sorted by (distance, id).
    /// Table radii: with r = m*r' + a, the first a+1 tables at r', the rest at r'-1.
    Neighbors r_neighbors(CodeView query, std::size_t radius);

    /// k nearest by (distance, id) via progressive substring radius.
    Neighbors knn(CodeView query, std::size_t k);

private:
    void check_query(CodeView query) const;
    void reset();
    template <typename Visit>
    void probe_shells(std::size_t table, SubcodeKey center, std::size_t lo, std::size_t hi,
                      SearchStats& stats, Visit&& visit);

    const MultiIndex* index_;
    std::vector<std::uint64_t> visited_;
    std::vector<ItemId> touched_;
};

Neighbors r_neighbor_search(const MultiIndex& index, CodeView query, std::size_t radius);
Neighbors knn_search(const MultiIndex& index, CodeView query, std::size_t k);

/// N_j^radius(q): ids in table j buckets within `radius` of the query substring,
/// unverified, sorted ascending. A negative radius yields the empty set.
std::vector<ItemId> raw_candidates(const MultiIndex& index, CodeView query, std::size_t table,
                                   std::int64_t radius);

}  // namespace bmih
