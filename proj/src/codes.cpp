#include "bmih/codes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmih {

namespace {

void clear_pad_bits(std::vector<std::uint64_t>& words, std::size_t bits) {
    const std::size_t tail = bits % kWordBits;
    if (tail != 0 && !words.empty()) {
        words.back() &= (std::uint64_t{1} << tail) - 1;
    }
}

}  // namespace

std::string CodeView::to_string() const {
    std::string out(bits_, '0');
    for (std::size_t i = 0; i < bits_; ++i) {
        if (bit(i)) out[i] = '1';
    }
    return out;
}

bool operator==(CodeView a, CodeView b) {
    return a.bits_ == b.bits_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(),
                                            b.words_.end());
}

BinaryCode::BinaryCode(std::size_t bits) : words_(words_for_bits(bits), 0), bits_(bits) {
    if (bits == 0) throw std::invalid_argument("code length must be >= 1");
}

BinaryCode::BinaryCode(std::vector<std::uint64_t> words, std::size_t bits)
    : words_(std::move(words)), bits_(bits) {
    if (bits == 0) throw std::invalid_argument("code length must be >= 1");
    if (words_.size() != words_for_bits(bits)) {
        throw std::invalid_argument("word count does not match code length");
    }
    clear_pad_bits(words_, bits_);
}

BinaryCode::BinaryCode(CodeView view)
    : BinaryCode(std::vector<std::uint64_t>(view.words().begin(), view.words().end()),
                 view.bits()) {}

BinaryCode BinaryCode::from_string(std::string_view text) {
    BinaryCode c(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            c.set(i, true);
        } else if (text[i] != '0') {
            throw std::invalid_argument("code string may only contain '0' and '1'");
        }
    }
    return c;
}

void BinaryCode::set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    if (value) {
        words_.at(i / kWordBits) |= mask;
    } else {
        words_.at(i / kWordBits) &= ~mask;
    }
}

void BinaryCode::flip(std::size_t i) { words_.at(i / kWordBits) ^= std::uint64_t{1} << (i % kWordBits); }

std::uint32_t hamming_distance(CodeView a, CodeView b) {
    if (a.bits() != b.bits()) {
        throw std::invalid_argument("hamming_distance: code lengths differ (" +
                                    std::to_string(a.bits()) + " vs " + std::to_string(b.bits()) + ")");
    }
    return hamming_words(a.words().data(), b.words().data(), a.words().size());
}

SubstringLayout::SubstringLayout(std::size_t bits, std::size_t tables) : bits_(bits) {
    if (bits == 0) throw std::invalid_argument("layout: code length must be >= 1");
    if (tables == 0 || tables > bits) {
        throw std::invalid_argument("layout: table count must be in [1, l]");
    }
    const std::size_t base = bits / tables;
    const std::size_t wider = bits % tables;
    widths_.reserve(tables);
    offsets_.reserve(tables);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < tables; ++j) {
        const auto w = static_cast<std::uint32_t>(base + (j < wider ? 1 : 0));
        widths_.push_back(w);
        offsets_.push_back(offset);
        offset += w;
    }
}

SubstringLayout SubstringLayout::from_widths(std::vector<std::uint32_t> widths) {
    if (widths.empty()) throw std::invalid_argument("layout: need at least one table");
    SubstringLayout layout;
    std::size_t offset = 0;
    for (auto w : widths) {
        if (w == 0) throw std::invalid_argument("layout: substring widths must be >= 1");
        layout.offsets_.push_back(offset);
        offset += w;
    }
    layout.bits_ = offset;
    layout.widths_ = std::move(widths);
    return layout;
}

SubcodeKey substring(CodeView c, std::size_t j, const SubstringLayout& layout) {
    if (j >= layout.tables()) {
        throw std::out_of_range("substring: table index " + std::to_string(j) + " out of range");
    }
    if (c.bits() != layout.bits()) {
        throw std::invalid_argument("substring: code length does not match layout");
    }
    if (layout.width(j) > kWordBits) {
        throw std::invalid_argument("substring: widths above 64 bits cannot be used as keys");
    }
    return extract_bits(c.words().data(), layout.offset(j), layout.width(j));
}

std::string subcode_to_string(SubcodeKey key, std::size_t width) {
    std::string out(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((key >> i) & 1U) out[i] = '1';
    }
    return out;
}

std::size_t suggested_table_count(std::size_t bits, std::size_t items) {
    if (bits == 0 || items < 2) {
        throw std::invalid_argument("suggested_table_count: need l >= 1 and n >= 2");
    }
    const double m = std::floor(static_cast<double>(bits) / std::log2(static_cast<double>(items)));
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(m, 1.0)), 1, bits);
}

CodeDatabase::CodeDatabase(std::size_t bits) : bits_(bits), stride_(words_for_bits(bits)) {
    if (bits == 0) throw std::invalid_argument("database: code length must be >= 1");
}

CodeDatabase::CodeDatabase(std::size_t bits, std::vector<std::uint64_t> words) : CodeDatabase(bits) {
    if (words.size() % stride_ != 0) {
        throw std::invalid_argument("database: word count is not a multiple of the code stride");
    }
    words_ = std::move(words);
    const std::size_t tail = bits_ % kWordBits;
    if (tail != 0) {
        const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
        for (std::size_t i = stride_ - 1; i < words_.size(); i += stride_) words_[i] &= mask;
    }
}

void CodeDatabase::push_back(CodeView c) {
    if (c.bits() != bits_) throw std::invalid_argument("database: code length mismatch");
    if (labels_) throw std::logic_error("database: append codes before attaching labels");
    words_.insert(words_.end(), c.words().begin(), c.words().end());
}

void CodeDatabase::set_labels(std::vector<std::uint32_t> labels) {
    if (labels.size() != size()) {
        throw std::invalid_argument("database: expected " + std::to_string(size()) + " labels, got " +
                                    std::to_string(labels.size()));
    }
    labels_ = std::move(labels);
}

CodeDatabase CodeDatabase::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::out_of_range("database slice out of range");
    CodeDatabase out(bits_, std::vector<std::uint64_t>(words_.begin() + static_cast<std::ptrdiff_t>(first * stride_),
                                                       words_.begin() + static_cast<std::ptrdiff_t>((first + count) * stride_)));
    if (labels_) {
        out.labels_ = std::vector<std::uint32_t>(labels_->begin() + static_cast<std::ptrdiff_t>(first),
                                                 labels_->begin() + static_cast<std::ptrdiff_t>(first + count));
    }
    return out;
}

CodeDatabase CodeDatabase::select(std::span<const ItemId> ids) const {
    CodeDatabase out(bits_);
    out.reserve(ids.size());
    std::vector<std::uint32_t> labels;
    for (ItemId id : ids) {
        if (id >= size()) throw std::out_of_range("database select: id out of range");
        out.words_.insert(out.words_.end(), code(id).words().begin(), code(id).words().end());
        if (labels_) labels.push_back((*labels_)[id]);
    }
    if (labels_) out.labels_ = std::move(labels);
    return out;
}

}  // namespace bmih
