#include "hypoforge/table_parser.hpp"

#include "hypoforge/util.hpp"

#include <algorithm>

namespace hypoforge {

std::string to_string(MechanismSource s) {
    return s == MechanismSource::FromText ? "From text" : "From knowledge base";
}

std::optional<MechanismSource> mechanism_source_from_string(const std::string& s) {
    std::string k = fold_key(s);
    if (k == "from text") return MechanismSource::FromText;
    if (k == "from knowledge base") return MechanismSource::FromKnowledgeBase;
    return std::nullopt;
}

namespace {

// "m1 (From text)" -> {"m1", FromText}; unlabeled cells pass through.
TableCell make_cell(const std::string& raw) {
    TableCell cell;
    std::string t = trim(raw);
    if (t.size() >= 2 && t.back() == ')') {
        size_t open = t.rfind('(');
        if (open != std::string::npos) {
            std::string inner = t.substr(open + 1, t.size() - open - 2);
            if (auto src = mechanism_source_from_string(inner)) {
                cell.source = src;
                t = trim(t.substr(0, open));
            }
        }
    }
    cell.text = std::move(t);
    return cell;
}

bool is_fence(const std::string& line) {
    std::string t = trim(line);
    return t.rfind("```", 0) == 0;
}

// |---|:---:| style rows between header and data.
bool is_separator_row(const std::vector<std::string>& cells) {
    bool any_dash = false;
    for (const auto& c : cells) {
        std::string t = trim(c);
        if (t.empty()) continue;
        for (char ch : t) {
            if (ch != '-' && ch != ':' && ch != '=') return false;
        }
        if (t.find('-') != std::string::npos || t.find('=') != std::string::npos) any_dash = true;
    }
    return any_dash;
}

std::vector<std::string> split_row(const std::string& line) {
    std::string t = trim(line);
    if (!t.empty() && t.front() == '|') t.erase(t.begin());
    if (!t.empty() && t.back() == '|') t.pop_back();
    return split(t, '|');
}

}  // namespace

TableParseResult parse_chart_table(const std::string& raw, int expected_columns) {
    TableParseResult result;
    if (expected_columns <= 0) {
        result.error = TableError{TableError::Kind::EmptyTable, 0, "",
                                  "expected_columns must be positive"};
        return result;
    }

    struct Candidate {
        std::vector<std::string> cells;
        std::string line;
        bool separator = false;
    };
    std::vector<Candidate> candidates;
    for (const auto& line : split_lines(raw)) {
        if (trim(line).empty()) continue;
        if (is_fence(line)) continue;
        if (line.find('|') == std::string::npos) continue;  // surrounding prose
        Candidate c;
        c.cells = split_row(line);
        c.line = line;
        c.separator = is_separator_row(c.cells);
        candidates.push_back(std::move(c));
    }

    // Drop separator rows and the header row immediately above each one.
    std::vector<bool> drop(candidates.size(), false);
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].separator) {
            drop[i] = true;
            if (i > 0) drop[i - 1] = true;
        }
    }

    int row_number = 0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (drop[i]) continue;
        ++row_number;
        const auto& cand = candidates[i];
        if (static_cast<int>(cand.cells.size()) != expected_columns) {
            result.rows.clear();
            result.error = TableError{
                TableError::Kind::RowArity, row_number, cand.line,
                "row " + std::to_string(row_number) + " has " +
                    std::to_string(cand.cells.size()) + " cells, expected " +
                    std::to_string(expected_columns) + ": " + trim(cand.line)};
            return result;
        }
        TableRow row;
        row.reserve(cand.cells.size());
        for (const auto& cell : cand.cells) row.push_back(make_cell(cell));
        result.rows.push_back(std::move(row));
    }

    if (result.rows.empty()) {
        result.error =
            TableError{TableError::Kind::EmptyTable, 0, "", "no table rows parsed"};
    }
    return result;
}

std::string serialize_cell(const TableCell& cell) {
    std::string out = cell.text;
    if (cell.source) {
        out += " (";
        out += to_string(*cell.source);
        out += ")";
    }
    return out;
}

std::string serialize_table(const std::vector<TableRow>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += "|";
        for (const auto& cell : row) {
            out += " ";
            out += serialize_cell(cell);
            out += " |";
        }
        out += "\n";
    }
    return out;
}

}  // namespace hypoforge
