#include "bmih/labels.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmih {

Labels Labels::single(std::vector<std::uint32_t> labels) {
    Labels out;
    out.offsets_.resize(labels.size() + 1);
    for (std::size_t i = 0; i <= labels.size(); ++i) out.offsets_[i] = i;
    out.values_ = std::move(labels);
    return out;
}

Labels Labels::multi(std::vector<std::vector<std::uint32_t>> label_sets) {
    Labels out;
    out.multi_ = true;
    out.offsets_.push_back(0);
    for (auto& set : label_sets) {
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        out.values_.insert(out.values_.end(), set.begin(), set.end());
        out.offsets_.push_back(out.values_.size());
    }
    return out;
}

Labels Labels::select(std::span<const std::uint32_t> ids) const {
    Labels out;
    out.multi_ = multi_;
    out.offsets_.push_back(0);
    for (auto id : ids) {
        if (id >= size()) throw std::out_of_range("labels: id out of range");
        const auto l = of(id);
        out.values_.insert(out.values_.end(), l.begin(), l.end());
        out.offsets_.push_back(out.values_.size());
    }
    return out;
}

bool Labels::share_label(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

}  // namespace bmih
