#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bmih {

/// Per-item class labels. Single-label items are related when their labels are
/// equal; multi-label items when they share at least one label.
class Labels {
public:
    Labels() = default;
    static Labels single(std::vector<std::uint32_t> labels);
    static Labels multi(std::vector<std::vector<std::uint32_t>> label_sets);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    bool is_multi() const { return multi_; }
    std::span<const std::uint32_t> of(std::size_t i) const {
        return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    bool related(std::size_t a, std::size_t b) const { return share_label(of(a), of(b)); }

    /// Subset in the given order.
    Labels select(std::span<const std::uint32_t> ids) const;

    static bool share_label(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

private:
    bool multi_ = false;
    std::vector<std::uint32_t> values_;  // each item's labels sorted ascending
    std::vector<std::size_t> offsets_;
};

}  // namespace bmih
