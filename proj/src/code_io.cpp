#include "bmih/code_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace bmih {

namespace {

constexpr std::array<char, 4> kCodeMagic{'B', 'M', 'I', 'H'};
constexpr std::array<char, 4> kSnapshotMagic{'B', 'M', 'I', 'X'};

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFU);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename T>
bool get_le(std::istream& in, T& value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) return false;
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    value = static_cast<T>(v);
    return true;
}

template <typename T>
void require(std::istream& in, T& value, const char* field) {
    if (!get_le(in, value)) {
        throw CodeFileError(CodeFileError::Kind::Truncated,
                            std::string("code file truncated while reading ") + field);
    }
}

void check_magic(std::istream& in, const std::array<char, 4>& magic) {
    std::array<char, 4> got{};
    if (!in.read(got.data(), got.size()) || got != magic) {
        throw CodeFileError(CodeFileError::Kind::BadMagic,
                            "bad magic: expected \"" + std::string(magic.data(), magic.size()) + "\"");
    }
}

void check_version(std::istream& in) {
    std::uint32_t version = 0;
    require(in, version, "version");
    if (version != kCodeFileVersion) {
        throw CodeFileError(CodeFileError::Kind::UnsupportedVersion,
                            "unsupported file version " + std::to_string(version));
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodeFileError(CodeFileError::Kind::Io, "cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodeFileError(CodeFileError::Kind::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

void write_codes(std::ostream& out, const CodeDatabase& db) {
    out.write(kCodeMagic.data(), kCodeMagic.size());
    put_le<std::uint32_t>(out, kCodeFileVersion);
    put_le<std::uint64_t>(out, db.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(db.bits()));
    put_le<std::uint8_t>(out, db.labels() ? 1 : 0);
    for (std::uint64_t w : db.raw_words()) put_le(out, w);
    if (db.labels()) {
        for (std::uint32_t label : *db.labels()) put_le(out, label);
    }
}

void write_codes(const std::filesystem::path& path, const CodeDatabase& db) {
    auto out = open_out(path);
    write_codes(out, db);
    if (!out.flush()) throw CodeFileError(CodeFileError::Kind::Io, "write failed: " + path.string());
}

CodeDatabase read_codes(std::istream& in, std::optional<std::size_t> expected_bits,
                        std::optional<std::size_t> expected_items) {
    check_magic(in, kCodeMagic);
    check_version(in);
    std::uint64_t n = 0;
    std::uint32_t l = 0;
    std::uint8_t has_labels = 0;
    require(in, n, "item count");
    require(in, l, "code length");
    require(in, has_labels, "label flag");
    if (l == 0) throw CodeFileError(CodeFileError::Kind::LengthMismatch, "code length 0 in header");
    if (expected_bits && *expected_bits != l) {
        throw CodeFileError(CodeFileError::Kind::LengthMismatch,
                            "expected " + std::to_string(*expected_bits) + "-bit codes, file has " +
                                std::to_string(l));
    }
    if (expected_items && *expected_items != n) {
        throw CodeFileError(CodeFileError::Kind::CountMismatch,
                            "expected " + std::to_string(*expected_items) + " codes, file has " +
                                std::to_string(n));
    }
    if (has_labels > 1) throw CodeFileError(CodeFileError::Kind::BadMagic, "corrupt label flag");

    const std::size_t stride = words_for_bits(l);
    std::vector<std::uint64_t> words;
    // Grow as data arrives so a corrupt n cannot trigger a huge allocation.
    for (std::uint64_t i = 0; i < n * stride; ++i) {
        std::uint64_t w = 0;
        if (!get_le(in, w)) {
            throw CodeFileError(CodeFileError::Kind::Truncated,
                                "code payload truncated: header says " + std::to_string(n) +
                                    " codes, found " + std::to_string(i / stride));
        }
        words.push_back(w);
    }
    CodeDatabase db(l, std::move(words));
    if (has_labels) {
        std::vector<std::uint32_t> labels;
        for (std::uint64_t i = 0; i < n; ++i) {
            std::uint32_t label = 0;
            if (!get_le(in, label)) {
                throw CodeFileError(CodeFileError::Kind::Truncated, "label payload truncated");
            }
            labels.push_back(label);
        }
        db.set_labels(std::move(labels));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw CodeFileError(CodeFileError::Kind::CountMismatch,
                            "trailing bytes after " + std::to_string(n) + " records");
    }
    return db;
}

CodeDatabase read_codes(const std::filesystem::path& path, std::optional<std::size_t> expected_bits,
                        std::optional<std::size_t> expected_items) {
    auto in = open_in(path);
    return read_codes(in, expected_bits, expected_items);
}

void write_index_snapshot(const std::filesystem::path& path, const CodeDatabase& db,
                          const SubstringLayout& layout) {
    if (layout.bits() != db.bits()) {
        throw std::invalid_argument("snapshot: layout length does not match codes");
    }
    auto out = open_out(path);
    out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
    put_le<std::uint32_t>(out, kCodeFileVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layout.tables()));
    for (auto w : layout.widths()) put_le<std::uint32_t>(out, w);
    write_codes(out, db);
    if (!out.flush()) throw CodeFileError(CodeFileError::Kind::Io, "write failed: " + path.string());
}

IndexSnapshot read_index_snapshot(const std::filesystem::path& path) {
    auto in = open_in(path);
    check_magic(in, kSnapshotMagic);
    check_version(in);
    std::uint32_t m = 0;
    require(in, m, "table count");
    if (m == 0 || m > 4096) throw CodeFileError(CodeFileError::Kind::LengthMismatch, "bad table count");
    std::vector<std::uint32_t> widths(m);
    for (auto& w : widths) require(in, w, "substring width");
    IndexSnapshot snap;
    try {
        snap.layout = SubstringLayout::from_widths(std::move(widths));
    } catch (const std::invalid_argument& e) {
        throw CodeFileError(CodeFileError::Kind::LengthMismatch, e.what());
    }
    snap.codes = read_codes(in, snap.layout.bits());
    return snap;
}

}  // namespace bmih
