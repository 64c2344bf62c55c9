#pragma once

#include "hypoforge/table_parser.hpp"
#include "hypoforge/util.hpp"

#include <string>
#include <vector>

namespace hypoforge {

struct Mechanism {
    std::string text;
    MechanismSource source = MechanismSource::FromText;

    bool operator==(const Mechanism&) const = default;
};

/// One linearized P-M-S-M-P row; the structure is the join key.
struct ChartRow {
    std::string processing;  // method + key parameters, or "N/A"
    Mechanism mech_ps;       // processing -> structure
    std::string structure;
    Mechanism mech_sp;       // structure -> property
    std::string property;    // target property + qualifier, or "N/A"
    int row_index = 0;

    bool operator==(const ChartRow&) const = default;
};

struct SystemChart {
    int paper_id = 0;
    std::vector<ChartRow> rows;
    long chart_token_estimate = 0;
};

/// (property, structure->property mechanism, structure) triples, one per
/// extracted structure.
struct SubTable1 {
    struct Entry {
        std::string property;
        Mechanism mech_sp;
        std::string structure;
    };
    std::vector<Entry> entries;
};

/// (structure, processing->structure mechanism, processing) triples;
/// structures are a subset of SubTable1's (extraction is structure-anchored).
struct SubTable2 {
    struct Entry {
        std::string structure;
        Mechanism mech_ps;
        std::string processing;
    };
    std::vector<Entry> entries;
};

/// Connect the sub-tables into one row per SubTable1 structure, matching
/// structures exactly after trimming and case-folding. Unmatched
/// structures get processing "N/A" (warning, not error); several
/// processings for one structure are kept in one cell, semicolon-joined,
/// and separated again at visualization time.
SystemChart join_subtables(const SubTable1& st1, const SubTable2& st2, int paper_id);

/// Non-mutating lint: duplicate structures, empty mechanism texts,
/// all-N/A rows, majority knowledge-base charts.
std::vector<std::string> validate_chart(const SystemChart& chart);

/// Pipe-table form of the chart (the serialization the token estimate and
/// the prompts use).
std::string chart_to_table(const SystemChart& chart);

std::vector<TableRow> chart_to_rows(const SystemChart& chart);

/// Rebuild typed rows from 5-column table cells (inverse of chart_to_rows).
SystemChart chart_from_rows(const std::vector<TableRow>& rows, int paper_id);

std::string chart_to_json(const SystemChart& chart);
SystemChart chart_from_json(const std::string& text);

/// RFC-4180 CSV of several charts, ordered by paper id, with the columns
/// Processing | Mechanism(P->S) | Source | Structure | Mechanism(S->P) | Source | Property.
std::string charts_to_csv(const std::vector<SystemChart>& charts);

}  // namespace hypoforge
