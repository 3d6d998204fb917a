#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "bmih/codes.hpp"

namespace bmih {

// Code file, all integers little-endian:
//   "BMIH" | u32 version = 1 | u64 n | u32 l | u8 has_labels
//   n records of ceil(l/64) u64 words | (has_labels) n u32 labels
//
// Index snapshot:
//   "BMIX" | u32 version = 1 | u32 m | m u32 widths | embedded code file
// Buckets are rebuilt on load.

inline constexpr std::uint32_t kCodeFileVersion = 1;

class CodeFileError : public std::runtime_error {
public:
    enum class Kind { Io, BadMagic, UnsupportedVersion, Truncated, LengthMismatch, CountMismatch };

    CodeFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

void write_codes(std::ostream& out, const CodeDatabase& db);
void write_codes(const std::filesystem::path& path, const CodeDatabase& db);

/// Throws CodeFileError. `expected_bits` / `expected_items`, when given, must match the header.
CodeDatabase read_codes(std::istream& in, std::optional<std::size_t> expected_bits = std::nullopt,
                        std::optional<std::size_t> expected_items = std::nullopt);
CodeDatabase read_codes(const std::filesystem::path& path,
                        std::optional<std::size_t> expected_bits = std::nullopt,
                        std::optional<std::size_t> expected_items = std::nullopt);

struct IndexSnapshot {
    CodeDatabase codes;
    SubstringLayout layout;
};

void write_index_snapshot(const std::filesystem::path& path, const CodeDatabase& db,
                          const SubstringLayout& layout);
IndexSnapshot read_index_snapshot(const std::filesystem::path& path);

}  // namespace bmih
