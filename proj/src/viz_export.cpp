#include "envmap/viz_export.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "envmap/errors.hpp"
#include "json.hpp"

namespace envmap {

namespace {

std::string first_token(const std::string& s) {
    auto end = s.find(' ');
    return end == std::string::npos ? s : s.substr(0, end);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

const char* fill_color(NodeFamily f) {
    switch (f) {
        case NodeFamily::environment: return "red";
        case NodeFamily::context: return "blue";
        case NodeFamily::taken_action: return "orange";
        default: return "green";
    }
}

}  // namespace

std::string to_string(NodeFamily f) {
    switch (f) {
        case NodeFamily::environment: return "environment";
        case NodeFamily::context: return "context";
        case NodeFamily::taken_action: return "taken_action";
        default: return "potential_action";
    }
}

std::string to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::containment: return "containment";
        case EdgeKind::sequential: return "sequential";
        default: return "alternative";
    }
}

GraphFormat graph_format_from_string(const std::string& s) {
    if (s == "dot") return GraphFormat::dot;
    if (s == "graph-json") return GraphFormat::graph_json;
    throw std::invalid_argument("unknown graph format: " + s);
}

GraphDoc build_graph(const EnvironmentMap& m, std::optional<std::size_t> max_contexts,
                     std::optional<std::size_t> max_actions_per_context) {
    auto violations = validate_map(m);
    if (!violations.empty()) {
        std::vector<std::string> msgs;
        for (const auto& v : violations) msgs.push_back(v.code + ": " + v.detail);
        throw InvalidMap(msgs);
    }

    GraphDoc g;
    std::set<std::string> knowledge_refs;
    for (const auto& d : m.tacit_knowledge.definitions) {
        for (const auto& r : d.related_context_ids) knowledge_refs.insert(r);
        for (const auto& r : d.related_action_ids) knowledge_refs.insert(r);
    }
    for (const auto& p : m.tacit_knowledge.procedures) knowledge_refs.insert(p.context_id);

    g.nodes.push_back({m.id, NodeFamily::environment, m.name, false});

    // Kept actions, plus lookups used for edge derivation below.
    std::map<std::string, std::string> context_of_action;
    std::map<std::string, std::string> action_of_instance;
    std::size_t kept_contexts = 0;
    for (const auto& c : m.contexts) {
        if (max_contexts && kept_contexts >= *max_contexts) break;
        ++kept_contexts;
        g.nodes.push_back({c.context_id, NodeFamily::context, c.pattern,
                           knowledge_refs.count(c.context_id) > 0});
        g.edges.push_back({m.id, c.context_id, EdgeKind::containment});

        std::size_t kept_actions = 0;
        for (const auto& a : c.actions) {
            if (max_actions_per_context && kept_actions >= *max_actions_per_context) break;
            ++kept_actions;
            bool any_taken = std::any_of(a.instances.begin(), a.instances.end(),
                                         [](const ActionInstance& i) { return i.is_taken; });
            g.nodes.push_back({a.action_id,
                               any_taken ? NodeFamily::taken_action
                                         : NodeFamily::potential_action,
                               a.action, knowledge_refs.count(a.action_id) > 0});
            g.edges.push_back({c.context_id, a.action_id, EdgeKind::containment});
            context_of_action[a.action_id] = c.context_id;
            for (const auto& i : a.instances) action_of_instance[i.instance_id] = a.action_id;
        }
    }

    // Sequential: actions of consecutive workflow steps inside one context.
    std::set<std::pair<std::string, std::string>> seq;
    for (const auto& w : m.workflows) {
        std::string task = sanitize_id(w.task_id);
        for (std::size_t i = 0; i + 1 < w.steps.size(); ++i) {
            auto step_action = [&](const Step& s) -> std::string {
                auto it = action_of_instance.find("instance." + task + "_" +
                                                  std::to_string(s.step_number) + "_0");
                return it == action_of_instance.end() ? "" : it->second;
            };
            std::string a = step_action(w.steps[i]);
            std::string b = step_action(w.steps[i + 1]);
            if (a.empty() || b.empty() || a == b) continue;
            if (context_of_action[a] != context_of_action[b]) continue;
            seq.insert({a, b});
        }
    }
    for (const auto& [a, b] : seq) g.edges.push_back({a, b, EdgeKind::sequential});

    // Alternative: parameterized same-verb siblings within a context.
    std::set<std::pair<std::string, std::string>> alt;
    for (const auto& c : m.contexts) {
        std::map<std::string, std::vector<std::string>> by_verb;
        for (const auto& a : c.actions)
            if (a.is_parameterized && context_of_action.count(a.action_id))
                by_verb[first_token(a.action)].push_back(a.action_id);
        for (const auto& [verb, ids] : by_verb)
            for (std::size_t i = 0; i + 1 < ids.size(); ++i)
                for (std::size_t j = i + 1; j < ids.size(); ++j)
                    alt.insert({ids[i], ids[j]});
    }
    for (const auto& [a, b] : alt)
        if (!seq.count({a, b}) && !seq.count({b, a}))
            g.edges.push_back({a, b, EdgeKind::alternative});
    return g;
}

std::string export_graph(const EnvironmentMap& m, GraphFormat format,
                         std::optional<std::size_t> max_contexts,
                         std::optional<std::size_t> max_actions_per_context) {
    GraphDoc g = build_graph(m, max_contexts, max_actions_per_context);
    if (format == GraphFormat::graph_json) {
        nlohmann::ordered_json doc;
        doc["nodes"] = nlohmann::ordered_json::array();
        for (const auto& n : g.nodes)
            doc["nodes"].push_back({{"node_id", n.node_id},
                                    {"family", to_string(n.family)},
                                    {"label", n.label},
                                    {"has_knowledge", n.has_knowledge}});
        doc["edges"] = nlohmann::ordered_json::array();
        for (const auto& e : g.edges)
            doc["edges"].push_back(
                {{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "digraph envmap {\n";
    for (const auto& n : g.nodes) {
        out << "  \"" << dot_escape(n.node_id) << "\" [label=\"" << dot_escape(n.label)
            << "\", style=filled, fillcolor=" << fill_color(n.family);
        if (n.has_knowledge) out << ", color=purple, penwidth=3";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        out << "  \"" << dot_escape(e.from) << "\" -> \"" << dot_escape(e.to) << "\"";
        if (e.kind == EdgeKind::sequential)
            out << " [color=blue]";
        else if (e.kind == EdgeKind::alternative)
            out << " [color=purple, dir=none]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace envmap
