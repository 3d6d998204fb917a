#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "bmih/codes.hpp"

namespace bmih {

enum class SyntheticMode { Uniform, Clustered, LabeledClustered };

const char* to_string(SyntheticMode mode);
SyntheticMode parse_synthetic_mode(std::string_view name);

struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t bits = 0;
    std::size_t classes = 0;  // LabeledClustered: one center per class
    SyntheticMode mode = SyntheticMode::Uniform;
    std::size_t centers = 0;  // Clustered
    double flip_prob = 0.0;

    std::size_t center_count() const { return mode == SyntheticMode::LabeledClustered ? classes : centers; }
    /// Throws std::invalid_argument for n == 0, l == 0, flip_prob outside [0, 0.5],
    /// or a clustered mode with zero centers or more centers than items.
    void validate() const;
};

/// Uniform: i.i.d. fair bits. Clustered: each item copies a uniformly chosen random
/// center and flips every bit independently with flip_prob. LabeledClustered also
/// records the center id as the label. Deterministic per seed.
CodeDatabase generate(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace bmih
