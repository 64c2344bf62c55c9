#include "hypoforge/extraction.hpp"

#include <set>

namespace hypoforge {

std::vector<TableRow> ask_table(Gateway& gateway, Backend& backend,
                                const StageProfile& profile, const std::string& prompt,
                                int columns) {
    LlmRequest request = profile.make_request(prompt);
    LlmResponse response = gateway.complete(request, backend);
    TableParseResult parsed = parse_chart_table(response.text, columns);
    if (parsed.ok()) return parsed.rows;

    // one reprompt, appending the parser's error text
    std::string repair = prompt +
                         "\n\nYour previous reply could not be parsed: " +
                         parsed.error->message +
                         "\nReply again, following the required pipe-delimited table format "
                         "exactly, with " +
                         std::to_string(columns) + " columns per row and no extra columns.";
    LlmRequest retry = profile.make_request(repair);
    LlmResponse second = gateway.complete(retry, backend);
    TableParseResult reparsed = parse_chart_table(second.text, columns);
    if (reparsed.ok()) return reparsed.rows;

    throw ReplyFormatError("reply unparseable after reprompt: " + reparsed.error->message,
                           request_digest(retry));
}

Mechanism mechanism_from_cell(const TableCell& cell, const std::string& context) {
    if (cell.source) return Mechanism{cell.text, *cell.source};
    log_warn(context + ": mechanism cell without source label, defaulting to From text: \"" +
             cell.text + "\"");
    return Mechanism{cell.text, MechanismSource::FromText};
}

namespace {

std::string paper_header(const PaperRecord& paper) {
    return "Paper [" + std::to_string(paper.paper_id) + "] \"" + paper.title + "\" (" +
           paper.venue + ", " + std::to_string(paper.year) + "):\n\n" + paper.body_text;
}

std::string bullet_list(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += "- " + s + "\n";
    return out;
}

constexpr const char* kSourceInstruction =
    "Mark each mechanism with \"(From text)\" if the paper states it, or "
    "\"(From knowledge base)\" if you supplied it from general knowledge.";

}  // namespace

std::string properties_prompt(const PaperRecord& paper) {
    return paper_header(paper) +
           "\n\nList the target properties this paper aims to achieve or improve, each with "
           "its qualifier (e.g. the service condition). Reply with a pipe-delimited table, "
           "one property per row, exactly one column:\n| <property> |\nNo header row.";
}

std::string structures_prompt(const PaperRecord& paper,
                              const std::vector<std::string>& properties) {
    return paper_header(paper) +
           "\n\nThe target properties of this paper are:\n" + bullet_list(properties) +
           "\nList the structures or microstructures relevant to these target properties. "
           "Reply with a pipe-delimited table, one structure per row, exactly one column:\n"
           "| <structure> |\nNo header row.";
}

std::string subtable1_prompt(const PaperRecord& paper,
                             const std::vector<std::string>& properties,
                             const std::vector<std::string>& structures) {
    return paper_header(paper) +
           "\n\nTarget properties:\n" + bullet_list(properties) +
           "\nStructures:\n" + bullet_list(structures) +
           "\nFor each structure, give the mechanism connecting it to the target property it "
           "affects. Reply with a pipe-delimited table, one row per structure, exactly three "
           "columns:\n| <property> | <mechanism> (From text) | <structure> |\n" +
           kSourceInstruction;
}

std::string subtable2_prompt(const PaperRecord& paper,
                             const std::vector<std::string>& structures) {
    return paper_header(paper) +
           "\n\nStructures:\n" + bullet_list(structures) +
           "\nFor each structure, give the processing method (with its key parameters) used "
           "in this paper to achieve it, and the mechanism connecting the processing to the "
           "structure. Reply with a pipe-delimited table, one row per processing, exactly "
           "three columns:\n| <structure> | <mechanism> (From text) | <processing> |\n" +
           kSourceInstruction +
           "\nIf the paper gives no processing for a structure, write \"N/A\" for the "
           "processing and supply the mechanism from your knowledge base.";
}

SubTable1 extract_subtable1(const PaperRecord& paper, const StageProfile& profile,
                            Gateway& gateway, Backend& backend) {
    std::string where = "paper " + std::to_string(paper.paper_id);

    auto property_rows = ask_table(gateway, backend, profile, properties_prompt(paper), 1);
    std::vector<std::string> properties;
    for (const auto& row : property_rows) properties.push_back(row[0].text);

    auto structure_rows =
        ask_table(gateway, backend, profile, structures_prompt(paper, properties), 1);
    std::vector<std::string> structures;
    for (const auto& row : structure_rows) structures.push_back(row[0].text);

    auto mech_rows = ask_table(gateway, backend, profile,
                               subtable1_prompt(paper, properties, structures), 3);
    SubTable1 st1;
    for (const auto& row : mech_rows) {
        SubTable1::Entry e;
        e.property = row[0].text;
        e.mech_sp = mechanism_from_cell(row[1], where + " sub-table 1");
        e.structure = row[2].text;
        st1.entries.push_back(std::move(e));
    }
    return st1;
}

SubTable2 extract_subtable2(const PaperRecord& paper, const std::vector<std::string>& structures,
                            const StageProfile& profile, Gateway& gateway, Backend& backend) {
    if (structures.empty()) throw Error("extract_subtable2 needs a non-empty structure list");
    std::string where = "paper " + std::to_string(paper.paper_id);

    std::set<std::string> wanted;
    for (const auto& s : structures) wanted.insert(fold_key(s));

    auto rows = ask_table(gateway, backend, profile, subtable2_prompt(paper, structures), 3);
    SubTable2 st2;
    std::set<std::string> covered;
    for (const auto& row : rows) {
        SubTable2::Entry e;
        e.structure = row[0].text;
        e.mech_ps = mechanism_from_cell(row[1], where + " sub-table 2");
        e.processing = row[2].text;
        std::string key = fold_key(e.structure);
        if (!wanted.count(key)) {
            log_warn(where + ": sub-table 2 reply names unknown structure \"" + e.structure +
                     "\"; dropped");
            continue;
        }
        covered.insert(key);
        st2.entries.push_back(std::move(e));
    }
    for (const auto& s : structures) {
        if (!covered.count(fold_key(s))) {
            st2.entries.push_back(
                {s,
                 Mechanism{"no processing stated for this structure",
                           MechanismSource::FromKnowledgeBase},
                 "N/A"});
        }
    }
    return st2;
}

SystemChart extract_chart(const PaperRecord& paper, const StageProfile& profile,
                          Gateway& gateway, Backend& backend) {
    SubTable1 st1 = extract_subtable1(paper, profile, gateway, backend);
    std::vector<std::string> structures;
    for (const auto& e : st1.entries) structures.push_back(e.structure);
    SubTable2 st2 = extract_subtable2(paper, structures, profile, gateway, backend);
    return join_subtables(st1, st2, paper.paper_id);
}

}  // namespace hypoforge
