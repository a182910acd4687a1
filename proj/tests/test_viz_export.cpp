#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "envmap/map.hpp"
#include "envmap/viz_export.hpp"
#include "json.hpp"

using namespace envmap;

static const std::string kFixtures = ENVMAP_FIXTURE_DIR;

namespace {

EnvironmentMap fixture_map() { return deserialize_map(kFixtures + "/golden_map"); }

// Minimal structural check for DOT: a digraph wrapper whose body lines are
// node statements, edge statements, or the closing brace.
bool dot_parses(const std::string& text) {
    static const std::regex node_re(
        R"(\s*"(\\.|[^"\\])*"\s*\[[^\]]*\];)");
    static const std::regex edge_re(
        R"(\s*"(\\.|[^"\\])*"\s*->\s*"(\\.|[^"\\])*"\s*(\[[^\]]*\])?;)");
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "digraph envmap {") return false;
    bool closed = false;
    while (std::getline(in, line)) {
        if (line == "}") {
            closed = true;
            continue;
        }
        if (closed) return false;  // nothing after the closing brace
        if (!std::regex_match(line, node_re) && !std::regex_match(line, edge_re))
            return false;
    }
    return closed;
}

}  // namespace

TEST_CASE("fixture graph has 1 + contexts + actions nodes and no dangling edges") {
    EnvironmentMap m = fixture_map();
    GraphDoc g = build_graph(m);

    std::size_t actions = 0;
    for (const auto& c : m.contexts) actions += c.actions.size();
    CHECK(g.nodes.size() == 1 + m.contexts.size() + actions);
    CHECK(g.nodes.size() == 20);  // manifest: 1 + 5 + 14

    std::set<std::string> ids;
    std::size_t env_nodes = 0;
    for (const auto& n : g.nodes) {
        REQUIRE(ids.insert(n.node_id).second);
        if (n.family == NodeFamily::environment) ++env_nodes;
    }
    CHECK(env_nodes == 1);
    for (const auto& e : g.edges) {
        CHECK(ids.count(e.from) == 1);
        CHECK(ids.count(e.to) == 1);
    }
}

TEST_CASE("action families agree with instance kinds") {
    EnvironmentMap m = fixture_map();
    GraphDoc g = build_graph(m);
    for (const auto& c : m.contexts) {
        for (const auto& a : c.actions) {
            bool any_taken = false;
            for (const auto& i : a.instances) any_taken = any_taken || i.is_taken;
            bool found = false;
            for (const auto& n : g.nodes) {
                if (n.node_id != a.action_id) continue;
                found = true;
                CHECK(n.family == (any_taken ? NodeFamily::taken_action
                                             : NodeFamily::potential_action));
            }
            CHECK(found);
        }
    }
}

TEST_CASE("containment structure is complete") {
    GraphDoc g = build_graph(fixture_map());
    std::map<std::string, int> containment_in;  // node -> containment in-degree
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::containment) containment_in[e.to]++;
    for (const auto& n : g.nodes) {
        if (n.family == NodeFamily::environment) continue;
        CHECK(containment_in[n.node_id] == 1);
    }
}

TEST_CASE("knowledge references mark nodes") {
    GraphDoc g = build_graph(fixture_map());
    bool main_glows = false, users_glows = false;
    for (const auto& n : g.nodes) {
        if (n.node_id == "context.gitlab_main") main_glows = n.has_knowledge;
        if (n.node_id == "context.gitlab_users_id") users_glows = n.has_knowledge;
    }
    CHECK(main_glows);       // procedure.auto_gitlab_main points here
    CHECK_FALSE(users_glows);
}

TEST_CASE("DOT output parses and carries the color scheme") {
    std::string dot = export_graph(fixture_map(), GraphFormat::dot);
    CHECK(dot_parses(dot));
    CHECK(dot.find("fillcolor=red") != std::string::npos);
    CHECK(dot.find("fillcolor=blue") != std::string::npos);
    CHECK(dot.find("fillcolor=orange") != std::string::npos);
    CHECK(dot.find("fillcolor=green") != std::string::npos);
    CHECK(dot.find("color=purple") != std::string::npos);
    // Deterministic output.
    CHECK(dot == export_graph(fixture_map(), GraphFormat::dot));
}

TEST_CASE("graph-json output matches the GraphDoc") {
    EnvironmentMap m = fixture_map();
    auto doc = nlohmann::json::parse(export_graph(m, GraphFormat::graph_json));
    GraphDoc g = build_graph(m);
    CHECK(doc["nodes"].size() == g.nodes.size());
    CHECK(doc["edges"].size() == g.edges.size());
    CHECK(doc["nodes"][0]["family"] == "environment");
}

TEST_CASE("an empty map exports a single environment node") {
    EnvironmentMap m;
    m.id = "env-map-empty";
    m.name = "Empty Environment Map";
    m.description = "none";
    m.base_url = "http://x.test";
    GraphDoc g = build_graph(m);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
    CHECK(dot_parses(export_graph(m, GraphFormat::dot)));
}

TEST_CASE("truncation keeps the leading contexts and actions") {
    EnvironmentMap m = fixture_map();
    GraphDoc g = build_graph(m, 2, 1);
    CHECK(g.nodes.size() == 1 + 2 + 2);
    std::set<std::string> ids;
    for (const auto& n : g.nodes) ids.insert(n.node_id);
    for (const auto& e : g.edges) {
        CHECK(ids.count(e.from) == 1);
        CHECK(ids.count(e.to) == 1);
    }
}
