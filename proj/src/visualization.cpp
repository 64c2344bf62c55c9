#include "hypoforge/visualization.hpp"

#include "hypoforge/corpus.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace hypoforge {

namespace {

bool is_na(const std::string& s) { return fold_key(s) == "n/a"; }

bool has_list(const std::string& s) {
    return !is_na(s) && s.find(';') != std::string::npos;
}

std::string pad3(size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03zu", i);
    return buf;
}

}  // namespace

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Processing: return "Processing";
        case NodeKind::Mechanism: return "Mechanism";
        case NodeKind::Structure: return "Structure";
        case NodeKind::Property: return "Property";
    }
    return "unknown";
}

SystemChart split_combined_rows(const SystemChart& chart) {
    SystemChart out;
    out.paper_id = chart.paper_id;
    int index = 0;
    for (const auto& row : chart.rows) {
        std::vector<std::string> procs =
            has_list(row.processing) ? split_trimmed(row.processing, ';')
                                     : std::vector<std::string>{row.processing};
        std::vector<std::string> props = has_list(row.property)
                                             ? split_trimmed(row.property, ';')
                                             : std::vector<std::string>{row.property};
        // a cell of bare delimiters must not erase the row
        if (procs.empty()) procs = {row.processing};
        if (props.empty()) props = {row.property};
        for (const auto& proc : procs) {
            for (const auto& prop : props) {
                ChartRow r = row;
                r.processing = proc;
                r.property = prop;
                r.row_index = index++;
                out.rows.push_back(std::move(r));
            }
        }
    }
    out.chart_token_estimate = token_estimate(chart_to_table(out));
    return out;
}

namespace {

std::string indexed_chart_table(const SystemChart& chart) {
    std::string out;
    for (const auto& r : chart.rows) {
        out += "| " + std::to_string(r.row_index) + " | " + r.processing + " | " +
               r.structure + " | " + r.property + " |\n";
    }
    return out;
}

}  // namespace

std::string tag_prompt(const SystemChart& chart) {
    return "The following system chart rows are given as | row | processing | structure | "
           "property |:\n\n" +
           indexed_chart_table(chart) +
           "\nFor each row, tag the structure with a category and rewrite the structure cell "
           "with detailed parameters simplified while retaining environmental conditions "
           "(temperatures, atmospheres, pressures). Reply with a pipe-delimited table, one "
           "row per input row in the same order, exactly two columns:\n"
           "| <structure tag> | <simplified structure> |";
}

NormalizedChart tag_and_simplify(const SystemChart& chart, const StageProfile& profile,
                                 Gateway& gateway, Backend& backend) {
    NormalizedChart out;
    out.paper_id = chart.paper_id;

    auto untagged = [&] {
        NormalizedChart fallback;
        fallback.paper_id = chart.paper_id;
        for (const auto& r : chart.rows) fallback.rows.push_back({r, "", {}});
        return fallback;
    };
    if (chart.rows.empty()) return out;

    std::string prompt = tag_prompt(chart);
    std::string attempt_prompt = prompt;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        LlmResponse response = gateway.complete(profile.make_request(attempt_prompt), backend);
        TableParseResult parsed = parse_chart_table(response.text, 2);
        std::string problem;
        if (!parsed.ok()) {
            problem = parsed.error->message;
        } else if (parsed.rows.size() != chart.rows.size()) {
            problem = "reply has " + std::to_string(parsed.rows.size()) + " rows, expected " +
                      std::to_string(chart.rows.size());
        } else {
            for (size_t i = 0; i < chart.rows.size(); ++i) {
                NormalizedRow nr;
                nr.row = chart.rows[i];
                nr.structure_tag = parsed.rows[i][0].text;
                nr.row.structure = parsed.rows[i][1].text;
                out.rows.push_back(std::move(nr));
            }
            return out;
        }
        if (attempt == 1) {
            attempt_prompt = prompt + "\n\nYour previous reply could not be used: " + problem +
                             ".\nReply again with exactly one two-column row per input row.";
        } else {
            log_warn("paper " + std::to_string(chart.paper_id) +
                     ": tagging reply unusable after reprompt (" + problem +
                     "); falling back to untagged rows");
        }
    }
    return untagged();
}

namespace {

std::string normalized_table(const NormalizedChart& chart) {
    std::string out;
    for (const auto& nr : chart.rows) {
        out += "| " + std::to_string(nr.row.row_index) + " | " + nr.row.processing + " | " +
               nr.row.structure + " | " + nr.row.property + " |\n";
    }
    return out;
}

const std::string& column_value(const ChartRow& row, const std::string& column) {
    return column == "structure" ? row.structure : row.property;
}

}  // namespace

std::string fill_na_prompt(const NormalizedChart& chart, size_t row, const std::string& column) {
    return "In the system chart below (| row | processing | structure | property |), row " +
           std::to_string(chart.rows[row].row.row_index) + " has \"N/A\" in the " + column +
           " column.\n\n" + normalized_table(chart) +
           "\nCompare the row with the other rows of the chart. If another row supplies the "
           "missing " +
           column +
           " value for the same processing/structure context, propose that value verbatim; "
           "otherwise keep N/A. Reply exactly in this format:\nReplacement: <value copied "
           "from another row, or N/A>";
}

NormalizedChart fill_na(const NormalizedChart& chart, const StageProfile& profile,
                        Gateway& gateway, Backend& backend) {
    NormalizedChart out = chart;
    if (out.rows.size() < 2) return out;  // no siblings, nothing to compare against

    for (size_t i = 0; i < out.rows.size(); ++i) {
        for (const std::string column : {"structure", "property"}) {
            if (!is_na(column_value(out.rows[i].row, column))) continue;

            LlmResponse response =
                gateway.complete(profile.make_request(fill_na_prompt(out, i, column)), backend);
            std::optional<std::string> proposal;
            for (const auto& line : split_lines(response.text)) {
                std::string t = trim(line);
                if (to_lower(t).rfind("replacement:", 0) == 0) {
                    proposal = trim(t.substr(std::string("replacement:").size()));
                    break;
                }
            }
            if (!proposal) {
                log_warn("paper " + std::to_string(chart.paper_id) + " row " +
                         std::to_string(out.rows[i].row.row_index) +
                         ": fill reply has no Replacement line; N/A kept");
                continue;
            }
            if (is_na(*proposal)) continue;

            // Fills must transfer text from a sibling, never invent it.
            int donor = -1;
            for (size_t j = 0; j < out.rows.size(); ++j) {
                if (j == i) continue;
                if (fold_key(column_value(out.rows[j].row, column)) == fold_key(*proposal)) {
                    donor = out.rows[j].row.row_index;
                    break;
                }
            }
            if (donor < 0) {
                log_warn("paper " + std::to_string(chart.paper_id) + " row " +
                         std::to_string(out.rows[i].row.row_index) + ": proposed " + column +
                         " fill \"" + *proposal + "\" appears in no sibling row; rejected");
                continue;
            }
            if (column == "structure") out.rows[i].row.structure = *proposal;
            else out.rows[i].row.property = *proposal;
            out.rows[i].fills.emplace_back(column, donor);
        }
    }
    return out;
}

namespace {

struct GraphBuilder {
    ChartGraph graph;
    std::map<std::string, std::string> structure_ids;  // exact label -> node id
    std::map<std::string, std::string> property_ids;

    std::string add_node(std::string id, NodeKind kind, const std::string& label,
                         NodeOrigin origin) {
        graph.nodes.push_back({id, kind, label, origin});
        return id;
    }

    std::string structure_node(const std::string& label, NodeOrigin origin) {
        auto it = structure_ids.find(label);
        if (it != structure_ids.end()) return it->second;
        std::string id = "S" + pad3(structure_ids.size());
        structure_ids[label] = id;
        return add_node(id, NodeKind::Structure, label, origin);
    }

    std::string property_node(const std::string& label, NodeOrigin origin) {
        auto it = property_ids.find(label);
        if (it != property_ids.end()) return it->second;
        std::string id = "T" + pad3(property_ids.size());
        property_ids[label] = id;
        return add_node(id, NodeKind::Property, label, origin);
    }

    void flow(const std::string& from, const std::string& to) {
        graph.edges.push_back({from, to, EdgeKind::Flow});
    }
};

// One P -> M -> S -> M -> T path with per-row node ids; structure and
// property nodes may be shared (chart mode) or private (hypothesis mode).
std::string add_row_path(GraphBuilder& b, const ChartRow& row, const std::string& prefix,
                         size_t index, NodeOrigin origin, bool merge_shared) {
    std::string p = b.add_node(prefix + "P" + pad3(index), NodeKind::Processing, row.processing,
                               origin);
    std::string m1 =
        b.add_node(prefix + "M" + pad3(index) + "a", NodeKind::Mechanism, row.mech_ps.text,
                   origin);
    std::string s = merge_shared
                        ? b.structure_node(row.structure, origin)
                        : b.add_node(prefix + "S" + pad3(index), NodeKind::Structure,
                                     row.structure, origin);
    std::string m2 =
        b.add_node(prefix + "M" + pad3(index) + "b", NodeKind::Mechanism, row.mech_sp.text,
                   origin);
    std::string t = merge_shared
                        ? b.property_node(row.property, origin)
                        : b.add_node(prefix + "T" + pad3(index), NodeKind::Property,
                                     row.property, origin);
    b.flow(p, m1);
    b.flow(m1, s);
    b.flow(s, m2);
    b.flow(m2, t);
    return m2;  // structure->property mechanism node id
}

}  // namespace

ChartGraph build_graph(const NormalizedChart& chart) {
    GraphBuilder b;
    for (size_t i = 0; i < chart.rows.size(); ++i)
        add_row_path(b, chart.rows[i].row, "", i, NodeOrigin::SetA, /*merge_shared=*/true);
    return std::move(b.graph);
}

namespace {

// Pick the mechanism node of one row that the hypothesis text quotes;
// the structure->property mechanism wins when both are present.
std::string anchor_mechanism(const ChartRow& row, const std::string& folded_text,
                             const std::string& mech_ps_id, const std::string& mech_sp_id,
                             const RowRef& ref) {
    std::string sp = fold_key(row.mech_sp.text);
    std::string ps = fold_key(row.mech_ps.text);
    if (!sp.empty() && folded_text.find(sp) != std::string::npos) return mech_sp_id;
    if (!ps.empty() && folded_text.find(ps) != std::string::npos) return mech_ps_id;
    throw Error("hypothesis cites neither mechanism of paper " + std::to_string(ref.paper_id) +
                " row " + std::to_string(ref.row_index) + "; searched for \"" +
                row.mech_sp.text + "\" and \"" + row.mech_ps.text + "\"");
}

}  // namespace

ChartGraph build_graph(const Hypothesis& hypothesis, const ChartRow& row_a,
                       const ChartRow& row_b) {
    GraphBuilder b;
    add_row_path(b, row_a, "A_", 0, NodeOrigin::SetA, /*merge_shared=*/false);
    add_row_path(b, row_b, "B_", 0, NodeOrigin::SetB, /*merge_shared=*/false);

    std::string folded = fold_key(hypothesis.text);
    std::string mech_a =
        anchor_mechanism(row_a, folded, "A_M000a", "A_M000b", hypothesis.pair.a);
    std::string mech_b =
        anchor_mechanism(row_b, folded, "B_M000a", "B_M000b", hypothesis.pair.b);
    b.graph.edges.push_back({mech_a, mech_b, EdgeKind::Interdependency});
    return std::move(b.graph);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string dot_label(const std::string& label) {
    auto lines = wrap_text(label, 24);
    std::vector<std::string> escaped;
    for (const auto& l : lines) escaped.push_back(dot_escape(l));
    return join(escaped, "\\n");
}

const char* shape_for(NodeKind kind) {
    switch (kind) {
        case NodeKind::Processing: return "box";
        case NodeKind::Mechanism: return "ellipse";
        case NodeKind::Structure: return "hexagon";
        case NodeKind::Property: return "diamond";
    }
    return "box";
}

}  // namespace

std::string emit_dot(const ChartGraph& graph) {
    if (graph.nodes.empty() && graph.edges.empty()) return "digraph chart { }\n";

    std::vector<GraphNode> nodes = graph.nodes;
    std::sort(nodes.begin(), nodes.end(),
              [](const GraphNode& a, const GraphNode& b) { return a.node_id < b.node_id; });
    std::vector<GraphEdge> edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
    });

    bool two_sets = std::any_of(nodes.begin(), nodes.end(), [](const GraphNode& n) {
        return n.origin == NodeOrigin::SetB;
    });

    std::ostringstream out;
    out << "digraph chart {\n  rankdir=LR;\n";
    for (const auto& n : nodes) {
        out << "  \"" << n.node_id << "\" [label=\"" << dot_label(n.label) << "\", shape="
            << shape_for(n.kind);
        if (two_sets) {
            // blue = first (domain-specific) set, red = second (general) set
            out << ", color=" << (n.origin == NodeOrigin::SetA ? "blue" : "red");
        }
        out << "];\n";
    }
    for (const auto& e : edges) {
        out << "  \"" << e.from << "\" -> \"" << e.to << "\"";
        if (e.kind == EdgeKind::Interdependency)
            out << " [style=dashed, color=green, dir=both]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace hypoforge
