#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bmih {

using ItemId = std::uint32_t;
using SubcodeKey = std::uint64_t;

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for_bits(std::size_t bits) {
    return (bits + kWordBits - 1) / kWordBits;
}

/// Popcount of a XOR b over `words` 64-bit words. No length checks.
inline std::uint32_t hamming_words(const std::uint64_t* a, const std::uint64_t* b,
                                   std::size_t words) {
    std::uint32_t d = 0;
    for (std::size_t w = 0; w < words; ++w) {
        d += static_cast<std::uint32_t>(std::popcount(a[w] ^ b[w]));
    }
    return d;
}

/// Non-owning view of a packed code. Bit i lives in bit (i % 64) of word i / 64.
class CodeView {
public:
    CodeView() = default;
    CodeView(std::span<const std::uint64_t> words, std::size_t bits)
        : words_(words), bits_(bits) {}

    std::size_t bits() const { return bits_; }
    std::span<const std::uint64_t> words() const { return words_; }
    bool bit(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }

    /// '0'/'1' characters, bit 0 first.
    std::string to_string() const;

    friend bool operator==(CodeView a, CodeView b);

private:
    std::span<const std::uint64_t> words_;
    std::size_t bits_ = 0;
};

/// Owning l-bit code. Pad bits past l in the last word are always zero.
class BinaryCode {
public:
    BinaryCode() = default;
    explicit BinaryCode(std::size_t bits);
    BinaryCode(std::vector<std::uint64_t> words, std::size_t bits);
    explicit BinaryCode(CodeView view);

    /// Parses a '0'/'1' string; character 0 becomes bit 0.
    static BinaryCode from_string(std::string_view text);

    std::size_t bits() const { return bits_; }
    std::span<const std::uint64_t> words() const { return words_; }
    bool bit(std::size_t i) const { return view().bit(i); }
    void set(std::size_t i, bool value);
    void flip(std::size_t i);

    CodeView view() const { return CodeView(words_, bits_); }
    operator CodeView() const { return view(); }  // NOLINT(google-explicit-constructor)
    std::string to_string() const { return view().to_string(); }

    friend bool operator==(const BinaryCode& a, const BinaryCode& b) {
        return a.view() == b.view();
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t bits_ = 0;
};

/// Number of differing bits. Throws std::invalid_argument on a length mismatch.
std::uint32_t hamming_distance(CodeView a, CodeView b);

/// Split of an l-bit code into m contiguous substrings, in bit order.
/// When m does not divide l, the first (l mod m) substrings are one bit wider.
class SubstringLayout {
public:
    SubstringLayout() = default;
    SubstringLayout(std::size_t bits, std::size_t tables);

    /// Explicit widths, e.g. from a snapshot header. Every width must be >= 1.
    static SubstringLayout from_widths(std::vector<std::uint32_t> widths);

    std::size_t bits() const { return bits_; }
    std::size_t tables() const { return widths_.size(); }
    std::size_t width(std::size_t j) const { return widths_.at(j); }
    std::size_t offset(std::size_t j) const { return offsets_.at(j); }
    std::span<const std::uint32_t> widths() const { return widths_; }

    friend bool operator==(const SubstringLayout& a, const SubstringLayout& b) {
        return a.widths_ == b.widths_;
    }

private:
    std::size_t bits_ = 0;
    std::vector<std::uint32_t> widths_;
    std::vector<std::size_t> offsets_;
};

/// Extracts `width` bits starting at bit `offset` as an integer (first bit -> LSB).
/// Requires width <= 64; no bounds checks.
inline SubcodeKey extract_bits(const std::uint64_t* words, std::size_t offset, std::size_t width) {
    const std::size_t w = offset / kWordBits;
    const std::size_t s = offset % kWordBits;
    std::uint64_t v = words[w] >> s;
    if (s != 0 && s + width > kWordBits) {
        v |= words[w + 1] << (kWordBits - s);
    }
    return width == kWordBits ? v : (v & ((std::uint64_t{1} << width) - 1));
}

/// Key of substring j of c. Throws std::out_of_range for a bad j and
/// std::invalid_argument when c does not match the layout or width(j) > 64.
SubcodeKey substring(CodeView c, std::size_t j, const SubstringLayout& layout);

/// Formats a subcode key of `width` bits as '0'/'1' characters, first bit first.
std::string subcode_to_string(SubcodeKey key, std::size_t width);

/// max(1, floor(l / log2 n)) clamped to l. Requires n >= 2 and l >= 1.
std::size_t suggested_table_count(std::size_t bits, std::size_t items);

/// n codes of l bits stored contiguously, plus optional per-item class labels.
class CodeDatabase {
public:
    CodeDatabase() = default;
    explicit CodeDatabase(std::size_t bits);
    CodeDatabase(std::size_t bits, std::vector<std::uint64_t> words);

    std::size_t size() const { return bits_ == 0 ? 0 : words_.size() / stride_; }
    bool empty() const { return words_.empty(); }
    std::size_t bits() const { return bits_; }
    std::size_t words_per_code() const { return stride_; }

    CodeView code(std::size_t i) const {
        return CodeView(std::span<const std::uint64_t>(words_.data() + i * stride_, stride_), bits_);
    }
    const std::uint64_t* code_words(std::size_t i) const { return words_.data() + i * stride_; }
    std::span<const std::uint64_t> raw_words() const { return words_; }

    void push_back(CodeView c);
    void reserve(std::size_t n) { words_.reserve(n * stride_); }

    const std::optional<std::vector<std::uint32_t>>& labels() const { return labels_; }
    /// Throws std::invalid_argument unless labels.size() == size().
    void set_labels(std::vector<std::uint32_t> labels);
    void clear_labels() { labels_.reset(); }

    /// Items [first, first + count) as a new database, labels included.
    CodeDatabase slice(std::size_t first, std::size_t count) const;
    /// Items in the given order, labels included.
    CodeDatabase select(std::span<const ItemId> ids) const;

    friend bool operator==(const CodeDatabase& a, const CodeDatabase& b) {
        return a.bits_ == b.bits_ && a.words_ == b.words_ && a.labels_ == b.labels_;
    }

private:
    std::size_t bits_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> words_;
    std::optional<std::vector<std::uint32_t>> labels_;
};

}  // namespace bmih
