#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bmih/codes.hpp"

namespace bmih {

/// n x l real matrix, row-major; the continuous stand-in for codes during training.
class Embedding {
public:
    Embedding() = default;
    Embedding(std::size_t rows, SubstringLayout layout);
    /// Throws std::invalid_argument if values.size() != rows * layout.bits().
    Embedding(std::size_t rows, SubstringLayout layout, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return layout_.bits(); }
    const SubstringLayout& layout() const { return layout_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
    double at(std::size_t i, std::size_t t) const { return values_[i * cols() + t]; }
    double& at(std::size_t i, std::size_t t) { return values_[i * cols() + t]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Clamps every entry into [-1, 1].
    void project();

    friend bool operator==(const Embedding& a, const Embedding& b) {
        return a.rows_ == b.rows_ && a.layout_ == b.layout_ && a.values_ == b.values_;
    }

private:
    std::size_t rows_ = 0;
    SubstringLayout layout_;
    std::vector<double> values_;
};

// Relaxed distance: D = 1/4 * sum (a_t - b_t)^2 over the selected coordinates,
// which equals the Hamming distance on {-1, +1} vectors.

double relaxed_distance(std::span<const double> a, std::span<const double> b);
double relaxed_distance(std::span<const double> a, std::span<const double> b, const SubstringLayout& layout,
                        std::size_t table);
double relaxed_distance(std::span<const double> a, std::span<const double> b, std::size_t begin, std::size_t end);

/// Adds weight * dD/da to grad_a and weight * dD/db to grad_b over [begin, end).
void add_relaxed_distance_gradient(std::span<const double> a, std::span<const double> b, std::size_t begin,
                                   std::size_t end, double weight, std::span<double> grad_a,
                                   std::span<double> grad_b);

/// Row view into an n x l gradient buffer.
inline std::span<double> grad_row(std::span<double> grad, std::size_t cols, std::size_t i) {
    return grad.subspan(i * cols, cols);
}

}  // namespace bmih
