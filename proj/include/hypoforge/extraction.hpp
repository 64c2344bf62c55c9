#pragma once

#include "hypoforge/chart.hpp"
#include "hypoforge/corpus.hpp"
#include "hypoforge/gateway.hpp"
#include "hypoforge/llm.hpp"

namespace hypoforge {

/// A reply stayed unparseable after the single format-repair reprompt.
class ReplyFormatError : public Error {
public:
    ReplyFormatError(const std::string& msg, std::string digest)
        : Error(msg), digest_(std::move(digest)) {}
    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

/// Send a prompt and parse the reply as a pipe table with `columns`
/// columns. On parse failure the prompt is re-sent once with the parser's
/// error appended; a second failure raises ReplyFormatError with the
/// transcript digest.
std::vector<TableRow> ask_table(Gateway& gateway, Backend& backend,
                                const StageProfile& profile, const std::string& prompt,
                                int columns);

/// Cell -> Mechanism, defaulting to FromText with a warning when the cell
/// carries no source suffix.
Mechanism mechanism_from_cell(const TableCell& cell, const std::string& context);

// Prompt builders (exposed for tests and fixture authoring).
std::string properties_prompt(const PaperRecord& paper);
std::string structures_prompt(const PaperRecord& paper, const std::vector<std::string>& properties);
std::string subtable1_prompt(const PaperRecord& paper, const std::vector<std::string>& properties,
                             const std::vector<std::string>& structures);
std::string subtable2_prompt(const PaperRecord& paper, const std::vector<std::string>& structures);

/// Three chained turns: target properties, structures relevant to them,
/// then the property | mechanism | structure table.
SubTable1 extract_subtable1(const PaperRecord& paper, const StageProfile& profile,
                            Gateway& gateway, Backend& backend);

/// structure | mechanism | processing table over the predetermined
/// structures; structures the reply omits get processing "N/A" with a
/// knowledge-base note.
SubTable2 extract_subtable2(const PaperRecord& paper, const std::vector<std::string>& structures,
                            const StageProfile& profile, Gateway& gateway, Backend& backend);

/// Full per-paper extraction: sub-table 1, sub-table 2, join.
SystemChart extract_chart(const PaperRecord& paper, const StageProfile& profile,
                          Gateway& gateway, Backend& backend);

}  // namespace hypoforge
