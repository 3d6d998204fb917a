#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "bmih/codes.hpp"
#include "bmih/embedding.hpp"
#include "bmih/multi_index.hpp"
#include "bmih/random.hpp"

namespace bmih {

enum class PairRelation { SameSubgroup, SameGroupDifferentSubgroup, DifferentGroups };

const char* to_string(PairRelation r);

struct OverfullBucket {
    std::size_t table = 0;
    SubcodeKey key = 0;
    std::vector<ItemId> items;  // ascending
};

/// Every bucket, in any table, holding more than k_prime items. Ordered by
/// (table, key). Throws std::invalid_argument if k_prime == 0.
std::vector<OverfullBucket> find_overfull_buckets(const MultiIndex& index, std::size_t k_prime);

/// Partition of one overfull bucket: groups of identical full codes, each split
/// into subgroups of at most k' items.
class GroupAssignment {
public:
    using Subgroup = std::vector<ItemId>;
    using Group = std::vector<Subgroup>;

    GroupAssignment() = default;
    /// Throws std::invalid_argument if an item appears twice or a subgroup is empty.
    GroupAssignment(std::size_t table, SubcodeKey bucket_key, std::vector<Group> groups);

    std::size_t table() const { return table_; }
    SubcodeKey bucket_key() const { return bucket_key_; }
    const std::vector<Group>& groups() const { return groups_; }
    std::size_t item_count() const { return where_.size(); }
    bool contains(ItemId id) const { return where_.count(id) != 0; }
    /// All items, group by group, subgroup by subgroup.
    std::vector<ItemId> items() const;

    /// Throws std::invalid_argument if a == b or either id is not in the bucket.
    PairRelation relation(ItemId a, ItemId b) const;

    /// Same partition limited to items with keep[id] != 0; empty subgroups and groups are dropped.
    GroupAssignment restricted_to(std::span<const char> keep) const;

private:
    struct Slot {
        std::uint32_t group;
        std::uint32_t subgroup;
    };

    std::size_t table_ = 0;
    SubcodeKey bucket_key_ = 0;
    std::vector<Group> groups_;
    std::unordered_map<ItemId, Slot> where_;
};

/// Splits an overfull bucket. Items with identical full codes form a group
/// (groups ordered by smallest member id). A group of n_g > k' items is
/// shuffled and cut into ceil(n_g / k') subgroups whose sizes differ by at most
/// one; smaller groups stay whole. Throws std::invalid_argument when the bucket
/// holds k' items or fewer.
GroupAssignment group_bucket(const OverfullBucket& bucket, const CodeDatabase& codes, std::size_t k_prime, Rng& rng);

PairRelation pair_relation(const GroupAssignment& assignment, ItemId a, ItemId b);

/// Instance-level balance loss over all unordered pairs in the bucket, using the
/// relaxed distance on the bucket's substring:
///   same subgroup: D;  same group: max(0, 1 - D);  different groups: max(0, 2 - D).
/// Adds weight * gradient into `grad` (n x l) when it is non-empty.
double phi_loss(const GroupAssignment& assignment, const Embedding& emb, std::span<double> grad = {},
                double weight = 1.0);

}  // namespace bmih
