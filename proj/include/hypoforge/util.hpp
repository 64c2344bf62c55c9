#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypoforge {

namespace fs = std::filesystem;

/// Base class for all pipeline errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- string helpers ----

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapse whitespace runs to single spaces and trim the ends.
std::string normalize_ws(std::string_view s);

/// Case-folded, whitespace-normalized form used for loose text matching.
std::string fold_key(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);
std::vector<std::string> split_lines(std::string_view s);

/// Split on a delimiter and trim each piece, dropping empties.
std::vector<std::string> split_trimmed(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

size_t word_count(std::string_view s);

/// Greedy word wrap; words longer than `width` stay on their own line.
std::vector<std::string> wrap_text(std::string_view s, size_t width);

// ---- hashing ----

/// Hex-encoded SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

// ---- filesystem ----

std::string read_file(const fs::path& p);
std::optional<std::string> try_read_file(const fs::path& p);

/// Write via a temp file in the same directory, then rename into place.
void atomic_write_file(const fs::path& p, std::string_view content);

// ---- CSV (RFC 4180) ----

std::string csv_quote(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// ---- logging ----

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void set_log_quiet(bool quiet);

}  // namespace hypoforge
