#include "bmih/embedding.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmih {

Embedding::Embedding(std::size_t rows, SubstringLayout layout)
    : rows_(rows), layout_(std::move(layout)), values_(rows * layout_.bits(), 0.0) {}

Embedding::Embedding(std::size_t rows, SubstringLayout layout, std::vector<double> values)
    : rows_(rows), layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != rows_ * layout_.bits()) {
        throw std::invalid_argument("embedding: expected " + std::to_string(rows_ * layout_.bits()) +
                                    " values, got " + std::to_string(values_.size()));
    }
}

void Embedding::project() {
    for (double& v : values_) v = std::clamp(v, -1.0, 1.0);
}

double relaxed_distance(std::span<const double> a, std::span<const double> b, std::size_t begin, std::size_t end) {
    if (a.size() != b.size() || end > a.size() || begin > end) {
        throw std::invalid_argument("relaxed_distance: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
        const double d = a[t] - b[t];
        sum += d * d;
    }
    return 0.25 * sum;
}

double relaxed_distance(std::span<const double> a, std::span<const double> b) {
    return relaxed_distance(a, b, 0, a.size());
}

double relaxed_distance(std::span<const double> a, std::span<const double> b, const SubstringLayout& layout,
                        std::size_t table) {
    if (a.size() != layout.bits()) throw std::invalid_argument("relaxed_distance: row does not match layout");
    return relaxed_distance(a, b, layout.offset(table), layout.offset(table) + layout.width(table));
}

void add_relaxed_distance_gradient(std::span<const double> a, std::span<const double> b, std::size_t begin,
                                   std::size_t end, double weight, std::span<double> grad_a,
                                   std::span<double> grad_b) {
    // dD/da_t = (a_t - b_t) / 2
    for (std::size_t t = begin; t < end; ++t) {
        const double g = 0.5 * weight * (a[t] - b[t]);
        grad_a[t] += g;
        grad_b[t] -= g;
    }
}

}  // namespace bmih
