#pragma once

#include <optional>
#include <string>
#include <vector>

#include "envmap/map.hpp"

namespace envmap {

enum class NodeFamily { environment, context, taken_action, potential_action };
enum class EdgeKind { containment, sequential, alternative };
enum class GraphFormat { dot, graph_json };

std::string to_string(NodeFamily f);
std::string to_string(EdgeKind k);
GraphFormat graph_format_from_string(const std::string& s);  // "dot" | "graph-json"

struct GraphNode {
    std::string node_id;
    NodeFamily family = NodeFamily::environment;
    std::string label;
    bool has_knowledge = false;
};

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::containment;
};

struct GraphDoc {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
};

// One environment node, one node per kept context and action. Family follows
// instance kinds (taken_action when any instance is_taken). Sequential edges
// join actions adjacent in a workflow's step order within one context;
// alternative edges join parameterized same-verb siblings of a context.
// Truncation keeps the first `max_contexts` contexts and
// `max_actions_per_context` actions, in canonical id order.
GraphDoc build_graph(const EnvironmentMap& m, std::optional<std::size_t> max_contexts = {},
                     std::optional<std::size_t> max_actions_per_context = {});

// Renders the graph as DOT (appendix color scheme as node/edge attributes) or
// as the GraphDoc record serialized to JSON.
std::string export_graph(const EnvironmentMap& m, GraphFormat format,
                         std::optional<std::size_t> max_contexts = {},
                         std::optional<std::size_t> max_actions_per_context = {});

}  // namespace envmap
