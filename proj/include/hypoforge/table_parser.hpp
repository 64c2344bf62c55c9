#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hypoforge {

/// Provenance label carried by mechanism cells: stated in the paper vs
/// supplied by the model from its own knowledge.
enum class MechanismSource { FromText, FromKnowledgeBase };

std::string to_string(MechanismSource s);
std::optional<MechanismSource> mechanism_source_from_string(const std::string& s);

/// One parsed cell. If the raw cell ended in "(From text)" or
/// "(From knowledge base)", the suffix is stripped and recorded here.
struct TableCell {
    std::string text;
    std::optional<MechanismSource> source;

    bool operator==(const TableCell&) const = default;
};

using TableRow = std::vector<TableCell>;

struct TableError {
    enum class Kind { RowArity, EmptyTable };
    Kind kind = Kind::EmptyTable;
    int row = 0;          // 1-based index among candidate rows (RowArity only)
    std::string line;     // offending raw line (RowArity only)
    std::string message;  // human-readable description, fed back on reprompt
};

struct TableParseResult {
    std::vector<TableRow> rows;
    std::optional<TableError> error;

    bool ok() const { return !error.has_value(); }
};

/// Parse a pipe-delimited table into rows of exactly `expected_columns`
/// trimmed cells. Tolerates code fences, leading/trailing pipes, blank
/// lines and non-table prose; a header row is dropped when followed by a
/// `|---|---|` separator line. Never throws on malformed input.
TableParseResult parse_chart_table(const std::string& raw, int expected_columns);

/// Inverse of parse_chart_table for well-formed rows: one `| a | b |`
/// line per row, source suffixes re-attached.
std::string serialize_table(const std::vector<TableRow>& rows);

std::string serialize_cell(const TableCell& cell);

}  // namespace hypoforge
