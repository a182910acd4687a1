#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "envmap/annotate.hpp"
#include "envmap/errors.hpp"
#include "envmap/map.hpp"
#include "envmap/nav_metrics.hpp"
#include "envmap/normalize.hpp"
#include "envmap/pipeline.hpp"
#include "envmap/query.hpp"
#include "envmap/trace.hpp"
#include "envmap/tree_filter.hpp"
#include "envmap/viz_export.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitEmptyInput = 2;
constexpr int kExitUnknownId = 3;

std::vector<envmap::NormalizationRule> rules_from(const std::string& rules_file) {
    if (rules_file.empty()) return envmap::default_rules();
    return envmap::load_rules(rules_file);
}

std::unique_ptr<envmap::Annotator> annotator_from(const std::string& flag) {
    if (flag.empty()) return envmap::make_annotator_from_env();
    return envmap::make_annotator(flag);
}

void print_record(const ordered_json& record) { std::cout << record.dump() << "\n"; }

ordered_json statistics_record(const envmap::EnvironmentMap& m) {
    return {{"record", "statistics"},
            {"map_id", m.id},
            {"num_steps", m.statistics.num_steps},
            {"pages_identified", m.statistics.pages_identified},
            {"actions_extracted", m.statistics.actions_extracted},
            {"recordings_processed", m.statistics.recordings_processed}};
}

ordered_json action_record(const envmap::ParameterizedAction& a) {
    ordered_json r = {{"record", "action"},
                      {"action_id", a.action_id},
                      {"action", a.action},
                      {"is_parameterized", a.is_parameterized},
                      {"parameter_name", a.parameter_name},
                      {"possible_values", a.possible_values},
                      {"instance_count", a.instances.size()}};
    return r;
}

// Writes the map under a temp sibling directory, then renames into place so
// the output directory is complete or absent.
void write_map_atomically(const envmap::EnvironmentMap& m, const fs::path& out_dir) {
    fs::path parent = out_dir.has_parent_path() ? out_dir.parent_path() : fs::path(".");
    fs::create_directories(parent);
    fs::path tmp = parent / (".tmp-" + out_dir.filename().string() + "-" +
                             std::to_string(::getpid()));
    fs::remove_all(tmp);
    try {
        envmap::serialize_map(m, tmp);
        fs::remove_all(out_dir);
        fs::rename(tmp, out_dir);
    } catch (...) {
        fs::remove_all(tmp);
        throw;
    }
}

int cmd_build(const std::string& traces_dir, const std::string& out_dir,
              const std::string& env_name, const std::string& base_url,
              const std::string& rules_file, const std::string& annotator_flag) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(traces_dir))
        if (e.is_regular_file()) files.push_back(e.path());
    if (files.empty()) {
        std::cerr << "no trajectory files in " << traces_dir << "\n";
        return kExitEmptyInput;
    }
    std::sort(files.begin(), files.end());

    std::vector<envmap::Trajectory> trajectories;
    for (const auto& f : files) trajectories.push_back(envmap::parse_trajectory_file(f));

    envmap::BuildOptions opts;
    opts.environment = env_name;
    opts.base_url = base_url;
    opts.rules = rules_from(rules_file);
    auto ann = annotator_from(annotator_flag);
    envmap::EnvironmentMap m = envmap::build_map(trajectories, opts, *ann);
    write_map_atomically(m, out_dir);
    print_record(statistics_record(m));
    return kExitOk;
}

int cmd_merge(const std::vector<std::string>& map_dirs, const std::string& out_dir,
              const std::string& rules_file, const std::string& annotator_flag) {
    auto ann = annotator_from(annotator_flag);
    auto rules = rules_from(rules_file);
    envmap::EnvironmentMap merged = envmap::deserialize_map(map_dirs.front());
    for (std::size_t i = 1; i < map_dirs.size(); ++i)
        merged = envmap::merge_maps(merged, envmap::deserialize_map(map_dirs[i]), *ann, rules);
    write_map_atomically(merged, out_dir);
    print_record(statistics_record(merged));
    return kExitOk;
}

int cmd_query_context(const envmap::EnvironmentMap& m, const std::string& url,
                      const std::string& rules_file) {
    const envmap::Context* c = envmap::resolve_context(m, url, rules_from(rules_file));
    if (c)
        print_record({{"record", "context"},
                      {"context_id", c->context_id},
                      {"name", c->name},
                      {"description", c->description},
                      {"pattern", c->pattern},
                      {"action_count", c->action_count},
                      {"contributing_recordings", c->contributing_recordings}});
    return kExitOk;
}

int cmd_query_actions(const envmap::EnvironmentMap& m, const std::string& context_id,
                      const std::string& filter) {
    auto actions = envmap::list_actions(m, context_id,
                                        envmap::action_filter_from_string(filter));
    for (const auto& a : actions) print_record(action_record(a));
    return kExitOk;
}

int cmd_query_workflows(const envmap::EnvironmentMap& m,
                        const std::vector<std::string>& keywords) {
    for (const envmap::Workflow* w : envmap::find_workflows(m, keywords))
        print_record({{"record", "workflow"},
                      {"workflow_id", w->workflow_id},
                      {"task_id", w->task_id},
                      {"step_count", w->steps.size()}});
    return kExitOk;
}

int cmd_query_term(const envmap::EnvironmentMap& m, const std::string& term) {
    for (const envmap::Definition* d : envmap::lookup_term(m, term))
        print_record({{"record", "definition"},
                      {"id", d->id},
                      {"term", d->term},
                      {"meaning", d->meaning},
                      {"related_context_ids", d->related_context_ids},
                      {"related_action_ids", d->related_action_ids}});
    return kExitOk;
}

int cmd_export(const std::string& map_dir, const std::string& format,
               std::optional<std::size_t> max_contexts,
               std::optional<std::size_t> max_actions) {
    envmap::EnvironmentMap m = envmap::deserialize_map(map_dir);
    std::cout << envmap::export_graph(m, envmap::graph_format_from_string(format),
                                      max_contexts, max_actions);
    return kExitOk;
}

int cmd_metrics(const std::string& har_file, const std::string& rules_file) {
    std::ifstream in(har_file, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read " << har_file << "\n";
        return kExitInputError;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto entries = envmap::parse_har(buf.str());
    auto metrics = envmap::compute_metrics(entries, rules_from(rules_file));
    print_record({{"record", "metrics"},
                  {"page_visits", metrics.page_visits},
                  {"backtracking_rate", metrics.backtracking_rate},
                  {"total_requests", metrics.total_requests}});
    return kExitOk;
}

int cmd_filter_tree(const std::string& input_file) {
    std::stringstream buf;
    if (input_file.empty() || input_file == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(input_file, std::ios::binary);
        if (!in) {
            std::cerr << "cannot read " << input_file << "\n";
            return kExitInputError;
        }
        buf << in.rdbuf();
    }
    std::cout << envmap::filter_accessibility_tree(buf.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"environment map toolkit"};
    app.require_subcommand(1);

    std::string traces_dir, out_dir, env_name, base_url, rules_file, annotator_flag;
    std::string map_dir, url, context_id, filter = "all", term, format = "dot", har_file;
    std::string tree_file;
    std::vector<std::string> map_dirs, keywords;
    std::optional<std::size_t> max_contexts, max_actions;

    auto* build = app.add_subcommand("build", "build a map from trajectory files");
    build->add_option("--traces", traces_dir)->required();
    build->add_option("--out", out_dir)->required();
    build->add_option("--env-name", env_name)->required();
    build->add_option("--base-url", base_url)->required();
    build->add_option("--rules", rules_file);
    build->add_option("--annotator", annotator_flag)
        ->check(CLI::IsMember({"heuristic", "remote"}));

    auto* merge = app.add_subcommand("merge", "merge map directories");
    merge->add_option("maps", map_dirs)->required()->expected(2, -1);
    merge->add_option("--out", out_dir)->required();
    merge->add_option("--rules", rules_file);
    merge->add_option("--annotator", annotator_flag)
        ->check(CLI::IsMember({"heuristic", "remote"}));

    auto* query = app.add_subcommand("query", "query a map directory");
    query->require_subcommand(1);
    query->add_option("map", map_dir)->required();
    auto* q_context = query->add_subcommand("context", "resolve a URL to its context");
    q_context->add_option("--url", url)->required();
    q_context->add_option("--rules", rules_file);
    auto* q_actions = query->add_subcommand("actions", "list actions of a context");
    q_actions->add_option("--context", context_id)->required();
    q_actions->add_option("--filter", filter)
        ->check(CLI::IsMember({"taken", "potential", "all"}));
    auto* q_workflows = query->add_subcommand("workflows", "rank workflows by keywords");
    q_workflows->add_option("keywords", keywords);
    auto* q_term = query->add_subcommand("term", "look up a definition term");
    q_term->add_option("term", term)->required();

    auto* exp = app.add_subcommand("export", "export a map as a graph document");
    exp->add_option("map", map_dir)->required();
    exp->add_option("--format", format)->check(CLI::IsMember({"dot", "graph-json"}));
    exp->add_option("--max-contexts", max_contexts);
    exp->add_option("--max-actions-per-context", max_actions);

    auto* metrics = app.add_subcommand("metrics", "navigation metrics from a HAR file");
    metrics->add_option("har", har_file)->required();
    metrics->add_option("--rules", rules_file);

    auto* stats = app.add_subcommand("stats", "print map statistics");
    stats->add_option("map", map_dir)->required();

    auto* filter_tree =
        app.add_subcommand("filter-tree", "apply the accessibility-tree filter");
    filter_tree->add_option("input", tree_file);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed())
            return cmd_build(traces_dir, out_dir, env_name, base_url, rules_file,
                             annotator_flag);
        if (merge->parsed()) return cmd_merge(map_dirs, out_dir, rules_file, annotator_flag);
        if (query->parsed()) {
            envmap::EnvironmentMap m = envmap::deserialize_map(map_dir);
            if (q_context->parsed()) return cmd_query_context(m, url, rules_file);
            if (q_actions->parsed()) return cmd_query_actions(m, context_id, filter);
            if (q_workflows->parsed()) return cmd_query_workflows(m, keywords);
            return cmd_query_term(m, term);
        }
        if (exp->parsed()) return cmd_export(map_dir, format, max_contexts, max_actions);
        if (metrics->parsed()) return cmd_metrics(har_file, rules_file);
        if (stats->parsed()) {
            print_record(statistics_record(envmap::deserialize_map(map_dir)));
            return kExitOk;
        }
        return cmd_filter_tree(tree_file);
    } catch (const envmap::UnknownContext& e) {
        std::cerr << e.what() << "\n";
        return kExitUnknownId;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }
}
