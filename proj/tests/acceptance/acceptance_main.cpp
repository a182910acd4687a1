// Acceptance gate: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Each criterion is self-contained and carries its runtime
// budget from the specification of this artifact.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "envmap/annotate.hpp"
#include "envmap/map.hpp"
#include "envmap/nav_metrics.hpp"
#include "envmap/normalize.hpp"
#include "envmap/pipeline.hpp"
#include "envmap/trace.hpp"
#include "envmap/tree_filter.hpp"
#include "envmap/viz_export.hpp"
#include "json.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace envmap;

static const std::string kFixtures = ENVMAP_FIXTURE_DIR;
static const std::string kCli = ENVMAP_CLI_PATH;

namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("envmap_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

// Byte-level fingerprint of a serialized map directory.
std::string dir_fingerprint(const fs::path& dir) {
    std::map<fs::path, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir)] = slurp(e.path());
    std::string out;
    for (const auto& [rel, content] : files) out += rel.string() + "\n" + content + "\n";
    return out;
}

std::string map_bytes(const EnvironmentMap& m, const std::string& tag) {
    fs::path dir = scratch("fp_" + tag);
    serialize_map(m, dir);
    std::string fp = dir_fingerprint(dir);
    fs::remove_all(dir);
    return fp;
}

std::vector<Trajectory> fixture_trajectories() {
    return {
        parse_trajectory_file(kFixtures + "/traces/task_103.log"),
        parse_trajectory_file(kFixtures + "/traces/task_135.log"),
        parse_trajectory_file(kFixtures + "/traces/task_204.log"),
    };
}

BuildOptions fixture_options() {
    BuildOptions opts;
    opts.environment = "gitlab";
    opts.base_url = "http://gitlab.example.com";
    opts.created_at = "2023-11-14T22:13:20Z";
    return opts;
}

std::set<std::string> key_set(const nlohmann::json& j) {
    std::set<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    return keys;
}

// ---- criteria ----------------------------------------------------------------

// 1. Schema fidelity against Listing 1 / Listing 2 field names plus the
// frozen golden directory.
Check criterion_schema_fidelity() {
    Check c;
    HeuristicAnnotator ann;
    EnvironmentMap m = build_map(fixture_trajectories(), fixture_options(), ann);
    fs::path out = scratch("schema");
    serialize_map(m, out);

    auto top = nlohmann::json::parse(slurp(out / "map.json"));
    c.expect(key_set(top) == std::set<std::string>{"id", "name", "description", "base_url",
                                                   "page_contexts", "workflows",
                                                   "tacit_knowledge", "statistics",
                                                   "metadata"},
             "map.json field names differ from Listing 1");
    c.expect(!top["page_contexts"].empty(), "no contexts serialized");
    c.expect(key_set(top["page_contexts"][0]) ==
                 std::set<std::string>{"context_id", "name", "description", "pattern",
                                       "context_mesh_path", "action_count",
                                       "contributing_recordings"},
             "page_contexts entry field names differ from Listing 1");

    auto ctx = nlohmann::json::parse(slurp(out / "contexts/context.gitlab_search.json"));
    c.expect(key_set(ctx) == std::set<std::string>{"id", "pattern", "available_actions"},
             "context file field names differ from Listing 2");
    c.expect(key_set(ctx["available_actions"][0]) ==
                 std::set<std::string>{"action", "action_id", "type", "is_parameterized",
                                       "parameter_name", "possible_values", "instances"},
             "available_actions field names differ from Listing 2");

    c.expect(dir_fingerprint(out) == dir_fingerprint(kFixtures + "/golden_map"),
             "serialized fixture map differs from the golden directory");
    fs::remove_all(out);
    return c;
}

EnvironmentMap generated_map(std::mt19937& rng, std::size_t n_contexts) {
    EnvironmentMap m;
    m.id = "env-map-gen";
    m.name = "Gen Environment Map";
    m.description = "generated";
    m.base_url = "http://gen.test";
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t i = 0; i < n_contexts; ++i) {
        Context c;
        c.name = "gen_ctx_" + std::to_string(i);
        c.context_id = "context." + c.name;
        c.description = "generated context " + std::to_string(i);
        c.pattern = "/gen/" + std::to_string(i) + "/{id}";
        c.mesh_path = "contexts/" + c.context_id + ".json";

        ParameterizedAction a;
        a.action_id = "action." + c.name + "_click_link_text";
        a.parameter_name = "link_text";
        if (coin(rng)) {
            a.action = "Click {link_text}";
            a.is_parameterized = true;
            a.possible_values = {"Alpha", "Beta"};
            for (int k = 0; k < 2; ++k) {
                ActionInstance inst;
                inst.instance_id = "instance.gen_task_" + std::to_string(i) + "_" +
                                   std::to_string(k + 1) + "_0";
                inst.is_taken = true;
                inst.action_description = k ? "Click Beta" : "Click Alpha";
                inst.provenance = {"trajectory", "gen_task_" + std::to_string(i),
                                   k + 1, std::nullopt};
                a.instances.push_back(std::move(inst));
            }
        } else {
            a.action = "Press Enter";
            a.is_parameterized = false;
            ActionInstance inst;
            inst.instance_id = "instance.gen_task_" + std::to_string(i) + "_1_0";
            inst.is_taken = true;
            inst.action_description = "Press Enter";
            inst.provenance = {"trajectory", "gen_task_" + std::to_string(i), 1,
                               std::nullopt};
            a.instances.push_back(std::move(inst));
        }
        c.action_count = static_cast<std::int64_t>(a.instances.size());
        c.contributing_recordings = {"gen_task_" + std::to_string(i)};
        c.actions.push_back(std::move(a));
        m.contexts.push_back(std::move(c));
    }
    m.statistics = compute_statistics(m);
    m.metadata = {"2023-11-14T22:13:20Z", kPipelineVersion, "heuristic"};
    return m;
}

// 2. Round trip: deserialize∘serialize is deep-equal identity,
// serialize∘deserialize is byte-equal identity, maps of 0..50 contexts.
Check criterion_round_trip() {
    Check c;
    std::mt19937 rng(2024);
    std::vector<std::size_t> sizes = {0, 1, 2, 3, 5, 8, 13, 21, 34, 50};
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        EnvironmentMap m = generated_map(rng, sizes[i]);
        c.expect(validate_map(m).empty(), "generated map invalid");
        fs::path d1 = scratch("rt1_" + std::to_string(i));
        serialize_map(m, d1);
        EnvironmentMap back = deserialize_map(d1);
        c.expect(back == m, "deserialize(serialize(m)) != m");
        fs::path d2 = scratch("rt2_" + std::to_string(i));
        serialize_map(back, d2);
        c.expect(dir_fingerprint(d1) == dir_fingerprint(d2),
                 "serialize(deserialize(bytes)) != bytes");
        fs::remove_all(d1);
        fs::remove_all(d2);
        if (!c.ok) break;
    }
    return c;
}

// 3. Merge algebra as byte equality on randomized fixture-derived maps.
Check criterion_merge_algebra() {
    Check c;
    HeuristicAnnotator ann;
    std::mt19937 rng(31337);

    // Candidate trajectory pool: the fixtures plus synthetic ones.
    std::vector<Trajectory> pool = fixture_trajectories();
    for (int i = 0; i < 9; ++i)
        pool.push_back(testsupport::make_random_trajectory(rng, "task_pool_" +
                                                                    std::to_string(i)));
    auto subset_map = [&](int which) {
        std::vector<Trajectory> subset;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if ((which >> i) & 1) subset.push_back(pool[i]);
        return build_map(subset, fixture_options(), ann);
    };
    EnvironmentMap empty = build_map({}, fixture_options(), ann);
    std::string empty_bytes = map_bytes(empty, "empty");
    (void)empty_bytes;

    std::uniform_int_distribution<int> pick(0, (1 << pool.size()) - 1);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        EnvironmentMap a = subset_map(pick(rng));
        EnvironmentMap b = subset_map(pick(rng));
        EnvironmentMap d = subset_map(pick(rng));

        std::string a_bytes = map_bytes(a, "a");
        c.expect(map_bytes(merge_maps(a, empty, ann), "id") == a_bytes,
                 "identity law failed");
        c.expect(map_bytes(merge_maps(a, a, ann), "idem") == a_bytes,
                 "idempotence law failed");
        c.expect(map_bytes(merge_maps(a, b, ann), "ab") ==
                     map_bytes(merge_maps(b, a, ann), "ba"),
                 "commutativity law failed");
        c.expect(map_bytes(merge_maps(merge_maps(a, b, ann), d, ann), "abd") ==
                     map_bytes(merge_maps(a, merge_maps(b, d, ann), ann), "adb"),
                 "associativity law failed");
    }
    return c;
}

// 4. Split/rebuild equivalence on the bundled fixture.
Check criterion_split_rebuild() {
    Check c;
    HeuristicAnnotator ann;
    auto trajectories = fixture_trajectories();
    EnvironmentMap whole = build_map(trajectories, fixture_options(), ann);
    EnvironmentMap merged = build_map({trajectories[0]}, fixture_options(), ann);
    for (std::size_t i = 1; i < trajectories.size(); ++i)
        merged = merge_maps(merged, build_map({trajectories[i]}, fixture_options(), ann),
                            ann);
    c.expect(map_bytes(merged, "split") == map_bytes(whole, "whole"),
             "per-trajectory merge differs from single-shot build");
    return c;
}

// 5. Partition and provenance laws on synthetic trajectories.
Check criterion_partition_provenance() {
    Check c;
    HeuristicAnnotator ann;
    std::mt19937 rng(555);
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        Trajectory t =
            testsupport::make_random_trajectory(rng, "task_law_" + std::to_string(trial));
        Workflow w = build_steps(t, ann, "gitlab");
        auto raw = extract_actions(w, t, ann);
        auto generalized = generalize_actions(raw, ann, default_rules());
        std::size_t instances = 0;
        std::set<std::string> ids;
        for (const auto& g : generalized) {
            instances += g.action.instances.size();
            for (const auto& inst : g.action.instances) {
                c.expect(ids.insert(inst.instance_id).second, "duplicate instance id");
                if (inst.is_taken) {
                    c.expect(inst.provenance.step_number &&
                                 *inst.provenance.step_number >= 1 &&
                                 *inst.provenance.step_number <=
                                     static_cast<std::int64_t>(w.steps.size()),
                             "taken provenance does not resolve to a step");
                } else {
                    c.expect(inst.provenance.snapshot_id &&
                                 t.snapshots.count(*inst.provenance.snapshot_id) == 1,
                             "potential provenance does not resolve to a snapshot");
                }
            }
        }
        c.expect(instances == raw.size(), "instance total != raw action total");
    }
    return c;
}

// 6. Normalization: the Phase 4 example plus idempotence on random paths.
Check criterion_normalization() {
    Check c;
    c.expect(normalize_url("/users/123", default_rules()) == "/users/{id}",
             "/users/123 did not normalize to /users/{id}");
    std::mt19937 rng(7);
    static const std::vector<std::string> segs = {
        "users", "123", "0", "deadbeefcafe", "search", "a1b2",
        "123e4567-e89b-12d3-a456-426614174000", "issues", "42", "x9",
    };
    std::uniform_int_distribution<int> len(0, 7);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(segs.size()) - 1);
    for (int i = 0; i < 1000 && c.ok; ++i) {
        std::string path;
        int n = len(rng);
        for (int k = 0; k < n; ++k) path += "/" + segs[std::size_t(pick(rng))];
        if (path.empty()) path = "/";
        std::string once = normalize_url(path, default_rules());
        c.expect(normalize_url(once, default_rules()) == once,
                 "normalization not idempotent on " + path);
    }
    return c;
}

// 7. Accessibility filter caps on adversarial trees.
Check criterion_tree_filter() {
    Check c;
    std::string tree = "page \"Root\" [p]\n";
    for (int i = 0; i < 30; ++i)
        tree += "  row \"" + std::string(500, 'a' + char(i % 26)) + "\" [r" +
                std::to_string(i) + "]\n";
    while (tree.size() < 50000)
        tree += "generic \"" + std::string(500, 'q') + "\" [g" +
                std::to_string(tree.size()) + "]\n";

    std::string out = filter_accessibility_tree(tree);
    c.expect(out.size() <= 20000, "output exceeds the 20000-character cap");
    c.expect(out.find("[...](row elements continue)") != std::string::npos,
             "missing sibling continuation marker");
    c.expect(out.find("[r10]") == std::string::npos, "more than 10 siblings kept");
    c.expect(out.find(std::string(151, 'a')) == std::string::npos,
             "text longer than 150 characters survived");
    c.expect(out.find(std::string(150, 'a') + "[...]") != std::string::npos,
             "missing text truncation marker");
    c.expect(filter_accessibility_tree(out) == out, "filter is not idempotent");
    return c;
}

// 8. Backtracking metric vs an independent brute-force counter.
Check criterion_backtracking_oracle() {
    Check c;
    std::mt19937 rng(404);
    std::uniform_int_distribution<int> len(0, 20);
    std::uniform_int_distribution<int> pick(0, 4);
    static const std::vector<std::string> alphabet = {"/a", "/b", "/c", "/d", "/e"};
    for (int trial = 0; trial < 10000 && c.ok; ++trial) {
        std::vector<std::string> urls;
        int n = len(rng);
        for (int i = 0; i < n; ++i) urls.push_back(alphabet[std::size_t(pick(rng))]);

        std::vector<HarEntry> entries;
        for (std::size_t i = 0; i < urls.size(); ++i) {
            HarEntry e;
            e.started_at = "t" + std::to_string(1000 + i);
            e.url = urls[i];
            e.resource_kind = ResourceKind::document;
            entries.push_back(e);
        }
        // Brute force, straight from the frozen definition.
        std::vector<std::string> visits;
        for (const auto& u : urls)
            if (visits.empty() || visits.back() != u) visits.push_back(u);
        int backtracks = 0;
        for (std::size_t k = 1; k < visits.size(); ++k)
            for (std::size_t j = 0; j + 1 < k; ++j)
                if (visits[j] == visits[k]) {
                    ++backtracks;
                    break;
                }
        double expected =
            double(backtracks) /
            double(std::max<std::size_t>(1, visits.empty() ? 0 : visits.size() - 1));
        auto m = compute_metrics(entries, default_rules());
        c.expect(m.backtracking_rate == expected, "rate disagrees with brute force");
        c.expect(m.page_visits == visits, "visit sequence disagrees with brute force");
    }
    return c;
}

// 9. Template induction: the Phase 3 example, exactly.
Check criterion_template_induction() {
    Check c;
    TemplateRequest req;
    req.verb = "Click";
    req.element_role = "link";
    req.names = {"Click Settings", "Click Profile"};
    auto r = heuristic_induce_template(req);
    c.expect(r.parameterized, "not parameterized");
    c.expect(r.action_template == "Click {link_text}",
             "template is '" + r.action_template + "'");
    std::set<std::string> values(r.bindings.begin(), r.bindings.end());
    c.expect(values == std::set<std::string>{"Settings", "Profile"},
             "value set is not {Settings, Profile}");
    return c;
}

// 10. End-to-end determinism of cmd_build over 50 synthetic trajectories.
Check criterion_cli_determinism() {
    Check c;
    std::mt19937 rng(808);
    fs::path traces = scratch("det_traces");
    fs::create_directories(traces);
    for (int i = 0; i < 50; ++i) {
        Trajectory t = testsupport::make_random_trajectory(
            rng, "task_det_" + std::to_string(i));
        std::ofstream out(traces / ("task_det_" + std::to_string(i) + ".log"),
                          std::ios::binary);
        out << serialize_trajectory(t);
    }
    fs::path out_a = scratch("det_a");
    fs::path out_b = scratch("det_b");
    auto build = [&](const fs::path& out) {
        std::string cmd = "SOURCE_DATE_EPOCH=1700000000 " + kCli + " build --traces " +
                          traces.string() + " --out " + out.string() +
                          " --env-name gitlab --base-url http://gitlab.example.com" +
                          " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    c.expect(build(out_a) == 0, "first build failed");
    c.expect(build(out_b) == 0, "second build failed");
    if (c.ok)
        c.expect(dir_fingerprint(out_a) == dir_fingerprint(out_b),
                 "two builds over identical input differ");
    fs::remove_all(traces);
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    return c;
}

// 11. Graph export sanity on the fixture map.
Check criterion_graph_export() {
    Check c;
    EnvironmentMap m = deserialize_map(kFixtures + "/golden_map");
    GraphDoc g = build_graph(m);
    std::size_t actions = 0;
    for (const auto& ctx : m.contexts) actions += ctx.actions.size();
    c.expect(g.nodes.size() == 1 + m.contexts.size() + actions,
             "node count != 1 + contexts + actions");
    std::set<std::string> ids;
    for (const auto& n : g.nodes) ids.insert(n.node_id);
    for (const auto& e : g.edges)
        c.expect(ids.count(e.from) == 1 && ids.count(e.to) == 1, "dangling edge");
    for (const auto& ctx : m.contexts) {
        for (const auto& a : ctx.actions) {
            bool any_taken = false;
            for (const auto& i : a.instances) any_taken = any_taken || i.is_taken;
            for (const auto& n : g.nodes)
                if (n.node_id == a.action_id)
                    c.expect(n.family == (any_taken ? NodeFamily::taken_action
                                                    : NodeFamily::potential_action),
                             "family disagrees with instance kinds");
        }
    }
    // Standard grammar: digraph wrapper, quoted node/edge statements.
    std::string dot = export_graph(m, GraphFormat::dot);
    static const std::regex node_re(R"(\s*"(\\.|[^"\\])*"\s*\[[^\]]*\];)");
    static const std::regex edge_re(
        R"(\s*"(\\.|[^"\\])*"\s*->\s*"(\\.|[^"\\])*"\s*(\[[^\]]*\])?;)");
    std::istringstream in(dot);
    std::string line;
    bool grammar_ok = std::getline(in, line) && line == "digraph envmap {";
    bool closed = false;
    while (grammar_ok && std::getline(in, line)) {
        if (line == "}") {
            closed = true;
        } else if (closed || (!std::regex_match(line, node_re) &&
                              !std::regex_match(line, edge_re))) {
            grammar_ok = false;
        }
    }
    c.expect(grammar_ok && closed, "DOT output violates the graph grammar");
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        double budget_seconds;
        std::function<Check()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"1 schema fidelity", 1.0, criterion_schema_fidelity},
        {"2 serialization round trip", 5.0, criterion_round_trip},
        {"3 merge algebra", 30.0, criterion_merge_algebra},
        {"4 split/rebuild equivalence", 5.0, criterion_split_rebuild},
        {"5 partition and provenance laws", 10.0, criterion_partition_provenance},
        {"6 url normalization", 2.0, criterion_normalization},
        {"7 accessibility filter caps", 2.0, criterion_tree_filter},
        {"8 backtracking oracle", 10.0, criterion_backtracking_oracle},
        {"9 template induction", 1.0, criterion_template_induction},
        {"10 end-to-end determinism", 10.0, criterion_cli_determinism},
        {"11 graph export sanity", 1.0, criterion_graph_export},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criterion.fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (elapsed > criterion.budget_seconds) {
            c.ok = false;
            if (c.detail.empty())
                c.detail = "exceeded budget of " +
                           std::to_string(criterion.budget_seconds) + "s";
        }
        std::ostringstream line;
        line << (c.ok ? "PASS" : "FAIL") << " [" << criterion.name << "] ("
             << std::fixed << elapsed << "s)";
        if (!c.ok) line << " - " << c.detail;
        std::cout << line.str() << "\n";
        if (!c.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
