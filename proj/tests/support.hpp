#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bmih/codes.hpp"
#include "bmih/random.hpp"

namespace testing {

// Codes as '0'/'1' strings so the reference computations share nothing with the packed layout.
inline std::string random_bits(bmih::Rng& rng, std::size_t bits) {
    std::string s(bits, '0');
    for (char& c : s) c = (rng() & 1U) ? '1' : '0';
    return s;
}

inline std::size_t string_distance(const std::string& a, const std::string& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

inline bmih::CodeDatabase from_strings(const std::vector<std::string>& codes, std::size_t bits) {
    bmih::CodeDatabase db(bits);
    for (const auto& s : codes) db.push_back(bmih::BinaryCode::from_string(s));
    return db;
}

inline std::vector<std::string> random_strings(bmih::Rng& rng, std::size_t n, std::size_t bits) {
    std::vector<std::string> out(n);
    for (auto& s : out) s = random_bits(rng, bits);
    return out;
}

// Substring boundaries computed directly: the first (l mod m) pieces get one extra bit.
inline std::vector<std::pair<std::size_t, std::size_t>> pieces(std::size_t bits, std::size_t m) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t w = bits / m + (j < bits % m ? 1 : 0);
        out.emplace_back(begin, begin + w);
        begin += w;
    }
    return out;
}

// (distance, id) pairs of the k nearest, by sorting everything.
inline std::vector<std::pair<std::size_t, std::uint32_t>> sorted_by_distance(const std::vector<std::string>& db,
                                                                             const std::string& q) {
    std::vector<std::pair<std::size_t, std::uint32_t>> all;
    for (std::size_t i = 0; i < db.size(); ++i) all.emplace_back(string_distance(db[i], q), static_cast<std::uint32_t>(i));
    std::sort(all.begin(), all.end());
    return all;
}

inline double entropy_of_counts(const std::map<std::string, std::size_t>& counts, std::size_t total) {
    double h = 0.0;
    for (const auto& [key, c] : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace testing
