#include "hypoforge/chart.hpp"

#include "hypoforge/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

namespace {

bool is_na(const std::string& s) { return fold_key(s) == "n/a"; }

}  // namespace

SystemChart join_subtables(const SubTable1& st1, const SubTable2& st2, int paper_id) {
    // structure key -> semicolon-joined processings and their mechanisms
    std::map<std::string, std::vector<const SubTable2::Entry*>> by_structure;
    for (const auto& e : st2.entries) by_structure[fold_key(e.structure)].push_back(&e);

    std::set<std::string> matched;
    SystemChart chart;
    chart.paper_id = paper_id;
    int index = 0;
    for (const auto& e1 : st1.entries) {
        ChartRow row;
        row.row_index = index++;
        row.property = e1.property;
        row.mech_sp = e1.mech_sp;
        row.structure = e1.structure;

        auto it = by_structure.find(fold_key(e1.structure));
        if (it == by_structure.end()) {
            row.processing = "N/A";
            row.mech_ps = Mechanism{"no processing stated for this structure",
                                    MechanismSource::FromKnowledgeBase};
            log_warn("paper " + std::to_string(paper_id) + ": structure \"" + e1.structure +
                     "\" has no processing entry; filled N/A");
        } else {
            matched.insert(it->first);
            std::vector<std::string> procs, mechs;
            MechanismSource src = MechanismSource::FromText;
            bool any_kb = false;
            for (const auto* e2 : it->second) {
                procs.push_back(e2->processing);
                mechs.push_back(e2->mech_ps.text);
                if (e2->mech_ps.source == MechanismSource::FromKnowledgeBase) any_kb = true;
            }
            row.processing = join(procs, "; ");
            row.mech_ps = Mechanism{join(mechs, "; "),
                                    any_kb ? MechanismSource::FromKnowledgeBase : src};
        }
        chart.rows.push_back(std::move(row));
    }

    for (const auto& e2 : st2.entries) {
        if (!matched.count(fold_key(e2.structure)))
            log_warn("paper " + std::to_string(paper_id) + ": sub-table 2 structure \"" +
                     e2.structure + "\" has no sub-table 1 match; dropped");
    }

    chart.chart_token_estimate = token_estimate(chart_to_table(chart));
    return chart;
}

std::vector<std::string> validate_chart(const SystemChart& chart) {
    std::vector<std::string> warnings;
    std::map<std::string, int> structure_counts;
    int kb_mechs = 0, total_mechs = 0;
    for (const auto& row : chart.rows) {
        ++structure_counts[fold_key(row.structure)];
        for (const Mechanism* m : {&row.mech_ps, &row.mech_sp}) {
            ++total_mechs;
            if (m->source == MechanismSource::FromKnowledgeBase) ++kb_mechs;
            if (trim(m->text).empty())
                warnings.push_back("row " + std::to_string(row.row_index) +
                                   ": empty mechanism text");
        }
        if (trim(row.structure).empty())
            warnings.push_back("row " + std::to_string(row.row_index) + ": empty structure");
        if (is_na(row.processing) && is_na(row.property))
            warnings.push_back("row " + std::to_string(row.row_index) +
                               ": both processing and property are N/A");
    }
    for (const auto& [key, n] : structure_counts) {
        if (n > 1)
            warnings.push_back("duplicate structure \"" + key + "\" appears " +
                               std::to_string(n) + " times");
    }
    if (total_mechs > 0 && kb_mechs * 2 > total_mechs)
        warnings.push_back("majority of mechanisms are From knowledge base (" +
                           std::to_string(kb_mechs) + "/" + std::to_string(total_mechs) + ")");
    return warnings;
}

std::vector<TableRow> chart_to_rows(const SystemChart& chart) {
    std::vector<TableRow> rows;
    rows.reserve(chart.rows.size());
    for (const auto& r : chart.rows) {
        TableRow row;
        row.push_back({r.processing, std::nullopt});
        row.push_back({r.mech_ps.text, r.mech_ps.source});
        row.push_back({r.structure, std::nullopt});
        row.push_back({r.mech_sp.text, r.mech_sp.source});
        row.push_back({r.property, std::nullopt});
        rows.push_back(std::move(row));
    }
    return rows;
}

SystemChart chart_from_rows(const std::vector<TableRow>& rows, int paper_id) {
    SystemChart chart;
    chart.paper_id = paper_id;
    int index = 0;
    for (const auto& cells : rows) {
        if (cells.size() != 5)
            throw Error("chart row needs 5 cells, got " + std::to_string(cells.size()));
        ChartRow row;
        row.row_index = index++;
        row.processing = cells[0].text;
        row.mech_ps = Mechanism{cells[1].text,
                                cells[1].source.value_or(MechanismSource::FromText)};
        row.structure = cells[2].text;
        row.mech_sp = Mechanism{cells[3].text,
                                cells[3].source.value_or(MechanismSource::FromText)};
        row.property = cells[4].text;
        chart.rows.push_back(std::move(row));
    }
    chart.chart_token_estimate = token_estimate(chart_to_table(chart));
    return chart;
}

std::string chart_to_table(const SystemChart& chart) {
    return serialize_table(chart_to_rows(chart));
}

namespace {

ordered_json mechanism_to_json(const Mechanism& m) {
    return {{"text", m.text}, {"source", to_string(m.source)}};
}

Mechanism mechanism_from_json(const ordered_json& j) {
    Mechanism m;
    m.text = j.at("text").get<std::string>();
    m.source = mechanism_source_from_string(j.value("source", "From text"))
                   .value_or(MechanismSource::FromText);
    return m;
}

}  // namespace

std::string chart_to_json(const SystemChart& chart) {
    ordered_json j;
    j["paper_id"] = chart.paper_id;
    j["chart_token_estimate"] = chart.chart_token_estimate;
    j["rows"] = ordered_json::array();
    for (const auto& r : chart.rows) {
        j["rows"].push_back({{"row_index", r.row_index},
                             {"processing", r.processing},
                             {"mech_ps", mechanism_to_json(r.mech_ps)},
                             {"structure", r.structure},
                             {"mech_sp", mechanism_to_json(r.mech_sp)},
                             {"property", r.property}});
    }
    return j.dump(2) + "\n";
}

SystemChart chart_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    SystemChart chart;
    chart.paper_id = j.at("paper_id").get<int>();
    chart.chart_token_estimate = j.value("chart_token_estimate", 0L);
    for (const auto& rj : j.at("rows")) {
        ChartRow r;
        r.row_index = rj.at("row_index").get<int>();
        r.processing = rj.at("processing").get<std::string>();
        r.mech_ps = mechanism_from_json(rj.at("mech_ps"));
        r.structure = rj.at("structure").get<std::string>();
        r.mech_sp = mechanism_from_json(rj.at("mech_sp"));
        r.property = rj.at("property").get<std::string>();
        chart.rows.push_back(std::move(r));
    }
    return chart;
}

std::string charts_to_csv(const std::vector<SystemChart>& charts) {
    std::vector<const SystemChart*> ordered;
    ordered.reserve(charts.size());
    for (const auto& c : charts) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const SystemChart* a, const SystemChart* b) { return a->paper_id < b->paper_id; });

    std::string out = csv_row({"Processing", "Mechanism(P→S)", "Source", "Structure",
                               "Mechanism(S→P)", "Source", "Property"});
    for (const SystemChart* chart : ordered) {
        for (const auto& r : chart->rows) {
            out += csv_row({r.processing, r.mech_ps.text, to_string(r.mech_ps.source),
                            r.structure, r.mech_sp.text, to_string(r.mech_sp.source),
                            r.property});
        }
    }
    return out;
}

}  // namespace hypoforge
