#include "bmih/synthetic.hpp"

#include <stdexcept>
#include <vector>

#include "bmih/random.hpp"

namespace bmih {

const char* to_string(SyntheticMode mode) {
    switch (mode) {
        case SyntheticMode::Uniform: return "uniform";
        case SyntheticMode::Clustered: return "clustered";
        case SyntheticMode::LabeledClustered: return "labeled_clustered";
    }
    return "?";
}

SyntheticMode parse_synthetic_mode(std::string_view name) {
    if (name == "uniform") return SyntheticMode::Uniform;
    if (name == "clustered") return SyntheticMode::Clustered;
    if (name == "labeled_clustered" || name == "labeled-clustered") return SyntheticMode::LabeledClustered;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
    if (n == 0) throw std::invalid_argument("synthetic: n must be >= 1");
    if (bits == 0) throw std::invalid_argument("synthetic: l must be >= 1");
    if (!(flip_prob >= 0.0 && flip_prob <= 0.5)) throw std::invalid_argument("synthetic: flip_prob must be in [0, 0.5]");
    if (mode != SyntheticMode::Uniform) {
        if (center_count() == 0) throw std::invalid_argument("synthetic: clustered modes need at least one center");
        if (center_count() > n) throw std::invalid_argument("synthetic: more centers than items");
    }
}

namespace {

void random_code(Rng& rng, std::size_t bits, std::uint64_t* words) {
    const std::size_t stride = words_for_bits(bits);
    for (std::size_t w = 0; w < stride; ++w) words[w] = rng();
    if (bits % kWordBits != 0) words[stride - 1] &= (std::uint64_t{1} << (bits % kWordBits)) - 1;
}

}  // namespace

CodeDatabase generate(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const std::size_t stride = words_for_bits(spec.bits);
    std::vector<std::uint64_t> words(spec.n * stride);

    if (spec.mode == SyntheticMode::Uniform) {
        for (std::size_t i = 0; i < spec.n; ++i) random_code(rng, spec.bits, words.data() + i * stride);
        return CodeDatabase(spec.bits, std::move(words));
    }

    const std::size_t centers = spec.center_count();
    std::vector<std::uint64_t> center_words(centers * stride);
    for (std::size_t c = 0; c < centers; ++c) random_code(rng, spec.bits, center_words.data() + c * stride);

    std::vector<std::uint32_t> labels(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const auto c = static_cast<std::uint32_t>(uniform_index(rng, centers));
        labels[i] = c;
        std::uint64_t* code = words.data() + i * stride;
        for (std::size_t w = 0; w < stride; ++w) code[w] = center_words[c * stride + w];
        if (spec.flip_prob > 0.0) {
            for (std::size_t t = 0; t < spec.bits; ++t) {
                if (uniform_unit(rng) < spec.flip_prob) code[t / kWordBits] ^= std::uint64_t{1} << (t % kWordBits);
            }
        }
    }
    CodeDatabase db(spec.bits, std::move(words));
    if (spec.mode == SyntheticMode::LabeledClustered) db.set_labels(std::move(labels));
    return db;
}

}  // namespace bmih
