#include "bmih/rebalance.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace bmih {

const char* to_string(PairRelation r) {
    switch (r) {
        case PairRelation::SameSubgroup: return "same-subgroup";
        case PairRelation::SameGroupDifferentSubgroup: return "same-group";
        case PairRelation::DifferentGroups: return "different-groups";
    }
    return "?";
}

std::vector<OverfullBucket> find_overfull_buckets(const MultiIndex& index, std::size_t k_prime) {
    if (k_prime == 0) throw std::invalid_argument("find_overfull_buckets: k' must be >= 1");
    std::vector<OverfullBucket> out;
    for (std::size_t j = 0; j < index.tables(); ++j) {
        const SubstringTable& t = index.table(j);
        for (std::size_t b = 0; b < t.bucket_count(); ++b) {
            if (t.bucket_size_at(b) <= k_prime) continue;
            const auto ids = t.bucket_at(b);
            out.push_back({j, t.keys()[b], std::vector<ItemId>(ids.begin(), ids.end())});
        }
    }
    return out;
}

GroupAssignment::GroupAssignment(std::size_t table, SubcodeKey bucket_key, std::vector<Group> groups)
    : table_(table), bucket_key_(bucket_key), groups_(std::move(groups)) {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        for (std::size_t s = 0; s < groups_[g].size(); ++s) {
            if (groups_[g][s].empty()) throw std::invalid_argument("group assignment: empty subgroup");
            for (ItemId id : groups_[g][s]) {
                const bool fresh = where_.emplace(id, Slot{static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(s)}).second;
                if (!fresh) throw std::invalid_argument("group assignment: item " + std::to_string(id) + " appears twice");
            }
        }
    }
}

std::vector<ItemId> GroupAssignment::items() const {
    std::vector<ItemId> out;
    out.reserve(where_.size());
    for (const auto& group : groups_) {
        for (const auto& sub : group) out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

PairRelation GroupAssignment::relation(ItemId a, ItemId b) const {
    if (a == b) throw std::invalid_argument("pair_relation: ids must differ");
    const auto ia = where_.find(a);
    const auto ib = where_.find(b);
    if (ia == where_.end() || ib == where_.end()) {
        throw std::invalid_argument("pair_relation: id " + std::to_string(ia == where_.end() ? a : b) +
                                    " is not in the bucket");
    }
    if (ia->second.group != ib->second.group) return PairRelation::DifferentGroups;
    return ia->second.subgroup == ib->second.subgroup ? PairRelation::SameSubgroup
                                                      : PairRelation::SameGroupDifferentSubgroup;
}

GroupAssignment GroupAssignment::restricted_to(std::span<const char> keep) const {
    std::vector<Group> groups;
    for (const auto& group : groups_) {
        Group kept_group;
        for (const auto& sub : group) {
            Subgroup kept;
            for (ItemId id : sub) {
                if (id < keep.size() && keep[id]) kept.push_back(id);
            }
            if (!kept.empty()) kept_group.push_back(std::move(kept));
        }
        if (!kept_group.empty()) groups.push_back(std::move(kept_group));
    }
    return GroupAssignment(table_, bucket_key_, std::move(groups));
}

GroupAssignment group_bucket(const OverfullBucket& bucket, const CodeDatabase& codes, std::size_t k_prime, Rng& rng) {
    if (k_prime == 0) throw std::invalid_argument("group_bucket: k' must be >= 1");
    if (bucket.items.size() <= k_prime) {
        throw std::invalid_argument("group_bucket: bucket with " + std::to_string(bucket.items.size()) +
                                    " items is not overfull for k' = " + std::to_string(k_prime));
    }
    std::vector<ItemId> items = bucket.items;
    std::sort(items.begin(), items.end());

    // Step 1: identical full codes form a group.
    std::map<std::vector<std::uint64_t>, std::size_t> group_of;
    std::vector<std::vector<ItemId>> members;
    for (ItemId id : items) {
        if (id >= codes.size()) throw std::out_of_range("group_bucket: item id out of range");
        const auto words = codes.code(id).words();
        auto [it, fresh] = group_of.emplace(std::vector<std::uint64_t>(words.begin(), words.end()), members.size());
        if (fresh) members.emplace_back();
        members[it->second].push_back(id);
    }

    // Step 2: oversized groups are shuffled and cut into near-equal subgroups.
    std::vector<GroupAssignment::Group> groups;
    groups.reserve(members.size());
    for (auto& group : members) {
        if (group.size() <= k_prime) {
            groups.push_back({group});
            continue;
        }
        shuffle(std::span<ItemId>(group), rng);
        const std::size_t parts = (group.size() + k_prime - 1) / k_prime;
        const std::size_t base = group.size() / parts;
        const std::size_t wider = group.size() % parts;
        GroupAssignment::Group split;
        std::size_t pos = 0;
        for (std::size_t s = 0; s < parts; ++s) {
            const std::size_t len = base + (s < wider ? 1 : 0);
            split.emplace_back(group.begin() + static_cast<std::ptrdiff_t>(pos),
                               group.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
        groups.push_back(std::move(split));
    }
    return GroupAssignment(bucket.table, bucket.key, std::move(groups));
}

PairRelation pair_relation(const GroupAssignment& assignment, ItemId a, ItemId b) {
    return assignment.relation(a, b);
}

double phi_loss(const GroupAssignment& assignment, const Embedding& emb, std::span<double> grad, double weight) {
    const SubstringLayout& layout = emb.layout();
    if (assignment.table() >= layout.tables()) throw std::invalid_argument("phi_loss: table index out of range");
    if (!grad.empty() && grad.size() != emb.values().size()) throw std::invalid_argument("phi_loss: gradient size mismatch");
    const std::size_t begin = layout.offset(assignment.table());
    const std::size_t end = begin + layout.width(assignment.table());
    const std::size_t cols = emb.cols();

    // Flatten to (id, group, subgroup) so the pair loop avoids hash lookups.
    struct Member {
        ItemId id;
        std::uint32_t group;
        std::uint32_t subgroup;
    };
    std::vector<Member> members;
    members.reserve(assignment.item_count());
    const auto& groups = assignment.groups();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t s = 0; s < groups[g].size(); ++s) {
            for (ItemId id : groups[g][s]) {
                if (id >= emb.rows()) throw std::invalid_argument("phi_loss: item id outside the embedding");
                members.push_back({id, static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(s)});
            }
        }
    }

    double value = 0.0;
    for (std::size_t x = 0; x < members.size(); ++x) {
        const auto ra = emb.row(members[x].id);
        for (std::size_t y = x + 1; y < members.size(); ++y) {
            const auto rb = emb.row(members[y].id);
            const double d = relaxed_distance(ra, rb, begin, end);
            double slope = 0.0;  // d(term)/dD
            if (members[x].group != members[y].group) {
                if (2.0 - d > 0.0) {
                    value += 2.0 - d;
                    slope = -1.0;
                }
            } else if (members[x].subgroup != members[y].subgroup) {
                if (1.0 - d > 0.0) {
                    value += 1.0 - d;
                    slope = -1.0;
                }
            } else {
                value += d;
                slope = 1.0;
            }
            if (slope != 0.0 && !grad.empty()) {
                add_relaxed_distance_gradient(ra, rb, begin, end, weight * slope, grad_row(grad, cols, members[x].id),
                                              grad_row(grad, cols, members[y].id));
            }
        }
    }
    return value;
}

}  // namespace bmih
