// Python bindings for the main operations. Structured results cross the
// boundary as JSON text; the Python package turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "envmap/annotate.hpp"
#include "envmap/map.hpp"
#include "envmap/nav_metrics.hpp"
#include "envmap/normalize.hpp"
#include "envmap/pipeline.hpp"
#include "envmap/query.hpp"
#include "envmap/trace.hpp"
#include "envmap/tree_filter.hpp"
#include "envmap/viz_export.hpp"
#include "json.hpp"

namespace py = pybind11;
using namespace envmap;

namespace {

std::vector<NormalizationRule> rules_from(const std::string& rules_file) {
    if (rules_file.empty()) return default_rules();
    return load_rules(rules_file);
}

nlohmann::ordered_json action_json(const ParameterizedAction& a) {
    return {{"action_id", a.action_id},
            {"action", a.action},
            {"is_parameterized", a.is_parameterized},
            {"parameter_name", a.parameter_name},
            {"possible_values", a.possible_values},
            {"instance_count", a.instances.size()}};
}

std::string py_normalize_url(const std::string& url, const std::string& rules_file) {
    return normalize_url(url, rules_from(rules_file));
}

std::string py_filter_tree(const std::string& tree) {
    return filter_accessibility_tree(tree);
}

std::string py_build_map(const std::vector<std::string>& trace_texts,
                         const std::string& out_dir, const std::string& env_name,
                         const std::string& base_url, const std::string& created_at,
                         const std::string& rules_file) {
    std::vector<Trajectory> trajectories;
    for (const auto& text : trace_texts) trajectories.push_back(parse_trajectory(text));
    BuildOptions opts;
    opts.environment = env_name;
    opts.base_url = base_url;
    opts.created_at = created_at;
    opts.rules = rules_from(rules_file);
    auto ann = make_annotator_from_env();
    EnvironmentMap m = build_map(trajectories, opts, *ann);
    serialize_map(m, out_dir);
    return nlohmann::ordered_json{{"map_id", m.id},
                                  {"num_steps", m.statistics.num_steps},
                                  {"pages_identified", m.statistics.pages_identified},
                                  {"actions_extracted", m.statistics.actions_extracted},
                                  {"recordings_processed",
                                   m.statistics.recordings_processed}}
        .dump();
}

std::string py_merge_maps(const std::string& dir_a, const std::string& dir_b,
                          const std::string& out_dir, const std::string& rules_file) {
    auto ann = make_annotator_from_env();
    EnvironmentMap merged =
        merge_maps(deserialize_map(dir_a), deserialize_map(dir_b), *ann,
                   rules_from(rules_file));
    serialize_map(merged, out_dir);
    return merged.id;
}

std::string py_resolve_context(const std::string& map_dir, const std::string& url,
                               const std::string& rules_file) {
    EnvironmentMap m = deserialize_map(map_dir);
    const Context* c = resolve_context(m, url, rules_from(rules_file));
    if (!c) return "null";
    return nlohmann::ordered_json{{"context_id", c->context_id},
                                  {"name", c->name},
                                  {"description", c->description},
                                  {"pattern", c->pattern},
                                  {"action_count", c->action_count},
                                  {"contributing_recordings", c->contributing_recordings}}
        .dump();
}

std::string py_list_actions(const std::string& map_dir, const std::string& context_id,
                            const std::string& filter) {
    EnvironmentMap m = deserialize_map(map_dir);
    auto actions = list_actions(m, context_id, action_filter_from_string(filter));
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& a : actions) out.push_back(action_json(a));
    return out.dump();
}

std::string py_find_workflows(const std::string& map_dir,
                              const std::vector<std::string>& keywords) {
    EnvironmentMap m = deserialize_map(map_dir);
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Workflow* w : find_workflows(m, keywords))
        out.push_back({{"workflow_id", w->workflow_id},
                       {"task_id", w->task_id},
                       {"step_count", w->steps.size()}});
    return out.dump();
}

std::string py_lookup_term(const std::string& map_dir, const std::string& term) {
    EnvironmentMap m = deserialize_map(map_dir);
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Definition* d : lookup_term(m, term))
        out.push_back({{"id", d->id},
                       {"term", d->term},
                       {"meaning", d->meaning},
                       {"related_context_ids", d->related_context_ids},
                       {"related_action_ids", d->related_action_ids}});
    return out.dump();
}

std::string py_compute_metrics(const std::string& har_text, const std::string& rules_file) {
    auto metrics = compute_metrics(parse_har(har_text), rules_from(rules_file));
    return nlohmann::ordered_json{{"page_visits", metrics.page_visits},
                                  {"backtracking_rate", metrics.backtracking_rate},
                                  {"total_requests", metrics.total_requests}}
        .dump();
}

std::string py_export_graph(const std::string& map_dir, const std::string& format) {
    return export_graph(deserialize_map(map_dir), graph_format_from_string(format));
}

std::string py_map_statistics(const std::string& map_dir) {
    EnvironmentMap m = deserialize_map(map_dir);
    return nlohmann::ordered_json{{"map_id", m.id},
                                  {"num_steps", m.statistics.num_steps},
                                  {"pages_identified", m.statistics.pages_identified},
                                  {"actions_extracted", m.statistics.actions_extracted},
                                  {"recordings_processed",
                                   m.statistics.recordings_processed}}
        .dump();
}

}  // namespace

PYBIND11_MODULE(_envmap, mod) {
    mod.doc() = "environment map toolkit (native core)";
    mod.def("normalize_url", &py_normalize_url, py::arg("url"), py::arg("rules_file") = "");
    mod.def("filter_accessibility_tree", &py_filter_tree, py::arg("tree"));
    mod.def("build_map", &py_build_map, py::arg("trace_texts"), py::arg("out_dir"),
            py::arg("env_name"), py::arg("base_url"), py::arg("created_at") = "",
            py::arg("rules_file") = "");
    mod.def("merge_maps", &py_merge_maps, py::arg("map_dir_a"), py::arg("map_dir_b"),
            py::arg("out_dir"), py::arg("rules_file") = "");
    mod.def("resolve_context", &py_resolve_context, py::arg("map_dir"), py::arg("url"),
            py::arg("rules_file") = "");
    mod.def("list_actions", &py_list_actions, py::arg("map_dir"), py::arg("context_id"),
            py::arg("filter") = "all");
    mod.def("find_workflows", &py_find_workflows, py::arg("map_dir"), py::arg("keywords"));
    mod.def("lookup_term", &py_lookup_term, py::arg("map_dir"), py::arg("term"));
    mod.def("compute_metrics", &py_compute_metrics, py::arg("har_text"),
            py::arg("rules_file") = "");
    mod.def("export_graph", &py_export_graph, py::arg("map_dir"), py::arg("format") = "dot");
    mod.def("map_statistics", &py_map_statistics, py::arg("map_dir"));
}
