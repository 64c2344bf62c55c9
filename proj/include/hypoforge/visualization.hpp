#pragma once

#include "hypoforge/chart.hpp"
#include "hypoforge/gateway.hpp"
#include "hypoforge/generation.hpp"

#include <optional>

namespace hypoforge {

enum class NodeKind { Processing, Mechanism, Structure, Property };
enum class NodeOrigin { SetA, SetB, Generated };
enum class EdgeKind { Flow, Interdependency };

std::string to_string(NodeKind k);

struct GraphNode {
    std::string node_id;
    NodeKind kind = NodeKind::Processing;
    std::string label;
    NodeOrigin origin = NodeOrigin::SetA;
};

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::Flow;
};

/// Typed chart graph. Flow edges run Processing -> Mechanism ->
/// Structure -> Mechanism -> Property only; Interdependency edges connect
/// two Mechanism nodes and are the only Generated content.
struct ChartGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
};

/// A chart row plus its free-form structure tag and the provenance of any
/// N/A fill applied to it.
struct NormalizedRow {
    ChartRow row;
    std::string structure_tag;
    // column name ("structure"/"property") -> donor row index
    std::vector<std::pair<std::string, int>> fills;
};

struct NormalizedChart {
    int paper_id = 0;
    std::vector<NormalizedRow> rows;
};

/// Duplicate rows whose processing or property cell holds a
/// semicolon-joined list, one row per element (mechanisms copied).
/// Deterministic, no backend call, idempotent.
SystemChart split_combined_rows(const SystemChart& chart);

std::string tag_prompt(const SystemChart& chart);

/// Backend pass that tags each structure and simplifies parameter detail
/// while retaining environmental conditions. The reply must keep one row
/// per input row; after one reprompt a mismatch falls back to untagged
/// rows with a warning.
NormalizedChart tag_and_simplify(const SystemChart& chart, const StageProfile& profile,
                                 Gateway& gateway, Backend& backend);

std::string fill_na_prompt(const NormalizedChart& chart, size_t row, const std::string& column);

/// Replace N/A structure/property cells by values proposed from sibling
/// rows. A proposed fill that appears in no sibling's same column is
/// rejected and the N/A kept.
NormalizedChart fill_na(const NormalizedChart& chart, const StageProfile& profile,
                        Gateway& gateway, Backend& backend);

/// Chart mode: one Flow path per row, shared Structure/Property nodes
/// merged by exact label.
ChartGraph build_graph(const NormalizedChart& chart);

/// Hypothesis mode: both source rows' paths colored by set origin plus
/// one Generated Interdependency edge between the two mechanism nodes the
/// hypothesis quotes. A row whose mechanisms are absent from the
/// hypothesis text raises an error listing the mismatch.
ChartGraph build_graph(const Hypothesis& hypothesis, const ChartRow& row_a,
                       const ChartRow& row_b);

/// Deterministic DOT emission: box/ellipse/hexagon/diamond by node kind,
/// dashed green Interdependency edges, nodes sorted by id, labels wrapped
/// at 24 characters.
std::string emit_dot(const ChartGraph& graph);

}  // namespace hypoforge
