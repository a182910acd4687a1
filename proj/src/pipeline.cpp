#include "envmap/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <map>
#include <set>
#include <sstream>

#include "envmap/tree_filter.hpp"

namespace envmap {

namespace {

constexpr std::size_t kExcerptLimit = 2000;

std::string first_token(const std::string& s) {
    auto start = s.find_first_not_of(' ');
    if (start == std::string::npos) return "";
    auto end = s.find(' ', start);
    return s.substr(start, (end == std::string::npos ? s.size() : end) - start);
}

std::string fallback_role(ActionType type, const std::string& declared) {
    if (!declared.empty()) return declared;
    switch (type) {
        case ActionType::navigate:
        case ActionType::scroll: return "page";
        case ActionType::type: return "textbox";
        case ActionType::key: return "key";
        default: return "element";
    }
}

// Inverse of parameter_name_for_role, for decomposing stored actions.
std::string role_for_parameter(const std::string& param) {
    if (param == "target_url") return "page";
    const std::string tail = "_text";
    if (param.size() > tail.size() &&
        param.compare(param.size() - tail.size(), tail.size(), tail) == 0)
        return param.substr(0, param.size() - tail.size());
    return param;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

// Per-instance decomposition used by assembly and merging: enough to re-run
// generalization from scratch.
struct Remnant {
    std::string pattern;
    std::string verb;
    std::string role;
    std::string name;  // the specific action, instance description
    bool taken = false;
    std::string instance_id;
    Provenance provenance;

    auto tie() const {
        return std::tie(pattern, verb, role, name, taken, instance_id, provenance.source,
                        provenance.task_id);
    }
};

std::vector<Remnant> remnants_from_raw(const std::vector<RawAction>& raw,
                                       const std::vector<NormalizationRule>& rules) {
    std::vector<Remnant> out;
    out.reserve(raw.size());
    for (const auto& a : raw) {
        Remnant r;
        r.pattern = normalize_url(a.url, rules);
        r.verb = a.verb.empty() ? first_token(a.name) : a.verb;
        r.role = a.element_role;
        r.name = a.name;
        r.taken = a.taken;
        r.instance_id = a.instance_id;
        r.provenance = a.provenance;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Remnant> remnants_from_contexts(const std::vector<Context>& contexts) {
    std::vector<Remnant> out;
    for (const auto& c : contexts) {
        for (const auto& a : c.actions) {
            for (const auto& i : a.instances) {
                Remnant r;
                r.pattern = c.pattern;
                r.verb = first_token(a.action);
                r.role = role_for_parameter(a.parameter_name);
                r.name = i.action_description;
                r.taken = i.is_taken;
                r.instance_id = i.instance_id;
                r.provenance = i.provenance;
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

// Deduplicates remnants by instance id; identical sources always carry
// identical content, ties break on field order for symmetry.
std::vector<Remnant> dedupe_remnants(std::vector<Remnant> remnants) {
    std::map<std::string, Remnant> by_id;
    for (auto& r : remnants) {
        auto [it, inserted] = by_id.try_emplace(r.instance_id, r);
        if (!inserted && r.tie() < it->second.tie()) it->second = std::move(r);
    }
    std::vector<Remnant> out;
    out.reserve(by_id.size());
    for (auto& [id, r] : by_id) out.push_back(std::move(r));
    return out;
}

std::vector<GeneralizedAction> generalize_remnants(const std::vector<Remnant>& remnants,
                                                   Annotator& ann) {
    using Key = std::tuple<std::string, std::string, std::string>;  // pattern, verb, role
    std::map<Key, std::vector<const Remnant*>> classes;
    for (const auto& r : remnants)
        classes[{r.pattern, r.verb, parameter_name_for_role(r.role)}].push_back(&r);

    std::vector<GeneralizedAction> out;
    for (auto& [key, members] : classes) {
        std::sort(members.begin(), members.end(),
                  [](const Remnant* a, const Remnant* b) {
                      return a->instance_id < b->instance_id;
                  });
        AnnotationRequest req;
        req.kind = AnnotationKind::induce_template;
        TemplateRequest tr;
        tr.verb = std::get<1>(key);
        tr.element_role = role_for_parameter(std::get<2>(key));
        for (const auto* m : members) tr.names.push_back(m->name);
        req.payload = std::move(tr);
        auto result = std::get<TemplateResult>(ann.annotate(req).result);

        GeneralizedAction g;
        g.pattern = std::get<0>(key);
        g.verb = std::get<1>(key);
        g.parameter_name = result.parameter_name;
        g.action.action = result.action_template;
        g.action.is_parameterized = result.parameterized;
        g.action.parameter_name = result.parameter_name;
        if (result.parameterized) {
            std::set<std::string> values(result.bindings.begin(), result.bindings.end());
            g.action.possible_values.assign(values.begin(), values.end());
        }
        for (const auto* m : members) {
            ActionInstance i;
            i.instance_id = m->instance_id;
            i.is_taken = m->taken;
            i.action_description = m->name;
            i.provenance = m->provenance;
            g.action.instances.push_back(std::move(i));
        }
        out.push_back(std::move(g));
    }
    return out;
}

using NameOverrides = std::map<std::string, std::pair<std::string, std::string>>;

std::vector<Context> contexts_from_generalized(const std::vector<GeneralizedAction>& actions,
                                               Annotator& ann, const std::string& environment,
                                               const NameOverrides& overrides) {
    std::map<std::string, std::vector<const GeneralizedAction*>> by_pattern;
    for (const auto& a : actions) by_pattern[a.pattern].push_back(&a);

    std::vector<Context> out;
    std::set<std::string> used_names;
    for (auto& [pattern, members] : by_pattern) {  // sorted by pattern
        Context c;
        c.pattern = pattern;
        if (auto it = overrides.find(pattern); it != overrides.end()) {
            c.name = it->second.first;
            c.description = it->second.second;
        } else {
            AnnotationRequest req;
            req.kind = AnnotationKind::describe_context;
            req.payload = ContextRequest{environment, pattern, pattern, ""};
            auto d = std::get<ContextDescription>(ann.annotate(req).result);
            c.name = d.name;
            c.description = d.description;
        }
        std::string base = sanitize_id(c.name);
        std::string name = base;
        for (int n = 2; !used_names.insert(name).second; ++n)
            name = base + "_" + std::to_string(n);
        c.name = name;
        c.context_id = "context." + name;
        c.mesh_path = "contexts/" + c.context_id + ".json";

        std::set<std::string> used_action_ids;
        std::set<std::string> recordings;
        for (const auto* g : members) {
            ParameterizedAction a = g->action;
            std::string stem = "action." + name + "_" + sanitize_id(g->verb) + "_" +
                               sanitize_id(g->parameter_name);
            std::string action_id = stem;
            for (int n = 2; !used_action_ids.insert(action_id).second; ++n)
                action_id = stem + "_" + std::to_string(n);
            a.action_id = action_id;
            std::sort(a.instances.begin(), a.instances.end(),
                      [](const ActionInstance& x, const ActionInstance& y) {
                          return x.instance_id < y.instance_id;
                      });
            c.action_count += static_cast<std::int64_t>(a.instances.size());
            for (const auto& i : a.instances) recordings.insert(i.provenance.task_id);
            c.actions.push_back(std::move(a));
        }
        std::sort(c.actions.begin(), c.actions.end(),
                  [](const ParameterizedAction& x, const ParameterizedAction& y) {
                      return x.action_id < y.action_id;
                  });
        c.contributing_recordings.assign(recordings.begin(), recordings.end());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const Context& x, const Context& y) { return x.context_id < y.context_id; });
    return out;
}

std::string pattern_for_url(const std::string& url,
                            const std::vector<NormalizationRule>& rules) {
    try {
        return normalize_url(url, rules);
    } catch (const UnparseableUrl&) {
        return "";
    }
}

bool is_auto_procedure(const Procedure& p) {
    return p.id.rfind("procedure.auto_", 0) == 0;
}

}  // namespace

std::string resolve_created_at(const std::string& requested) {
    if (!requested.empty()) return requested;
    std::time_t t;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Workflow build_steps(const Trajectory& t, Annotator& ann, const std::string& environment) {
    Workflow w;
    w.task_id = t.task_id;
    std::string wf_name = sanitize_id(environment + "_" + t.task_id);
    w.workflow_id = "workflow." + wf_name;
    w.mesh_path = "workflows/" + w.workflow_id + ".json";

    std::vector<std::string> pending_utterances;
    std::int64_t step_number = 0;
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        const RawEvent& e = t.events[i];
        if (e.action_type == ActionType::utterance) {
            pending_utterances.push_back(e.utterance);
            continue;
        }
        StepWindow window;
        window.event = e;
        for (std::size_t j = i + 1; j < t.events.size(); ++j) {
            if (t.events[j].action_type != ActionType::utterance) {
                window.next_url = t.events[j].url;
                break;
            }
        }
        window.utterances = std::move(pending_utterances);
        pending_utterances.clear();
        if (!e.snapshot_ref.empty()) {
            auto it = t.snapshots.find(e.snapshot_ref);
            if (it != t.snapshots.end()) {
                std::string tree = filter_accessibility_tree(serialize_snapshot_tree(it->second));
                window.snapshot_excerpt = tree.substr(0, kExcerptLimit);
            }
        }
        AnnotationRequest req;
        req.kind = AnnotationKind::summarize_step;
        req.payload = std::move(window);
        auto summary = std::get<StepSummary>(ann.annotate(req).result);

        Step s;
        s.step_number = ++step_number;
        s.name = summary.name;
        s.description = summary.description;
        s.outcome = summary.outcome;
        s.url = e.url;
        w.steps.push_back(std::move(s));
    }
    if (!pending_utterances.empty() && !w.steps.empty()) {
        std::string joined;
        for (const auto& u : pending_utterances) {
            if (!joined.empty()) joined += "; ";
            joined += u;
        }
        w.steps.back().description += " (note: " + joined + ")";
    }
    return w;
}

std::vector<RawAction> extract_actions(const Workflow& w, const Trajectory& t, Annotator& ann,
                                       const std::string& source_label) {
    std::vector<RawAction> out;
    std::string task = sanitize_id(t.task_id);

    // Taken actions, deterministically from step data; the source event
    // supplies the role.
    std::vector<const RawEvent*> action_events;
    for (const auto& e : t.events)
        if (e.action_type != ActionType::utterance) action_events.push_back(&e);

    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const Step& s = w.steps[i];
        RawAction a;
        a.name = s.name;
        a.description = s.description;
        a.expected_outcome = s.outcome;
        a.taken = true;
        a.url = s.url;
        a.provenance.source = source_label;
        a.provenance.task_id = t.task_id;
        a.provenance.step_number = s.step_number;
        a.verb = first_token(s.name);
        const RawEvent* e = i < action_events.size() ? action_events[i] : nullptr;
        a.element_role = e ? fallback_role(e->action_type, e->element_role) : "element";
        a.instance_id = "instance." + task + "_" + std::to_string(s.step_number) + "_0";
        out.push_back(std::move(a));
    }

    // Potential actions from interface elements nothing in the trajectory
    // exercised.
    std::set<std::pair<std::string, std::string>> taken_pairs;
    for (const auto& e : t.events)
        if (e.action_type != ActionType::utterance)
            taken_pairs.insert({e.selector, e.element_text});

    for (const auto& [snapshot_id, snapshot] : t.snapshots) {
        AnnotationRequest req;
        req.kind = AnnotationKind::propose_potential_actions;
        PotentialRequest pr;
        pr.snapshot = snapshot;
        pr.taken.assign(taken_pairs.begin(), taken_pairs.end());
        req.payload = std::move(pr);
        auto proposals = std::get<std::vector<PotentialAction>>(ann.annotate(req).result);

        std::size_t idx = 0;
        for (const auto& p : proposals) {
            RawAction a;
            a.name = p.name;
            a.description = p.description;
            a.expected_outcome = p.expected_outcome;
            a.taken = false;
            a.url = snapshot.url;
            a.provenance.source = source_label;
            a.provenance.task_id = t.task_id;
            a.provenance.snapshot_id = snapshot_id;
            a.verb = first_token(p.name);
            a.element_role = p.role.empty() ? "element" : p.role;
            a.instance_id = "instance." + task + "_" + std::to_string(snapshot.capture_index) +
                            "_" + std::to_string(++idx);
            out.push_back(std::move(a));
        }
    }
    return out;
}

std::vector<GeneralizedAction> generalize_actions(const std::vector<RawAction>& raw,
                                                  Annotator& ann,
                                                  const std::vector<NormalizationRule>& rules) {
    return generalize_remnants(dedupe_remnants(remnants_from_raw(raw, rules)), ann);
}

std::vector<Context> build_contexts(const std::vector<GeneralizedAction>& actions,
                                    Annotator& ann, const std::string& environment) {
    return contexts_from_generalized(actions, ann, environment, {});
}

TacitKnowledge extract_knowledge(const std::vector<Workflow>& workflows,
                                 const std::vector<Context>& contexts,
                                 const std::vector<NormalizationRule>& rules, Annotator& ann,
                                 std::vector<std::string>* warnings) {
    std::map<std::string, const Context*> by_pattern;
    for (const auto& c : contexts) by_pattern[c.pattern] = &c;

    // Maximal same-context step-name runs per context, across workflows.
    std::map<std::string, std::vector<std::vector<std::string>>> segments;
    for (const auto& w : workflows) {
        std::string current_ctx;
        std::vector<std::string> run;
        auto flush = [&] {
            if (!current_ctx.empty() && !run.empty()) segments[current_ctx].push_back(run);
            run.clear();
        };
        for (const auto& s : w.steps) {
            std::string pattern = pattern_for_url(s.url, rules);
            auto it = by_pattern.find(pattern);
            std::string ctx = it == by_pattern.end() ? "" : it->second->context_id;
            if (ctx != current_ctx) {
                flush();
                current_ctx = ctx;
            }
            run.push_back(s.name);
        }
        flush();
    }

    KnowledgeRequest req;
    for (const auto& c : contexts) {
        auto it = segments.find(c.context_id);
        if (it == segments.end()) continue;
        KnowledgeRequest::ContextSegments cs;
        cs.context_id = c.context_id;
        cs.context_name = c.name;
        cs.pattern = c.pattern;
        cs.segments = it->second;
        req.contexts.push_back(std::move(cs));
    }
    AnnotationRequest areq;
    areq.kind = AnnotationKind::extract_knowledge;
    areq.payload = std::move(req);
    auto result = std::get<KnowledgeResult>(ann.annotate(areq).result);

    std::set<std::string> context_ids, action_ids;
    for (const auto& c : contexts) {
        context_ids.insert(c.context_id);
        for (const auto& a : c.actions) action_ids.insert(a.action_id);
    }
    TacitKnowledge out;
    for (auto& d : result.definitions) {
        bool resolved = true;
        for (const auto& r : d.related_context_ids)
            if (!context_ids.count(r)) resolved = false;
        for (const auto& r : d.related_action_ids)
            if (!action_ids.count(r)) resolved = false;
        if (!resolved) {
            if (warnings)
                warnings->push_back("dropped definition '" + d.id +
                                    "' with unresolved references");
            continue;
        }
        out.definitions.push_back(std::move(d));
    }
    for (auto& p : result.procedures) {
        if (!context_ids.count(p.context_id)) {
            if (warnings)
                warnings->push_back("dropped procedure '" + p.id +
                                    "' with unresolved context");
            continue;
        }
        out.procedures.push_back(std::move(p));
    }
    return out;
}

EnvironmentMap assemble_map(const BuildOptions& opts, const std::vector<Workflow>& workflows,
                            const std::vector<Context>& contexts,
                            const TacitKnowledge& knowledge, Annotator& ann) {
    // Decompose to per-instance remnants and rebuild; this single canonical
    // path makes assembly, merging, and split/rebuild agree byte-for-byte.
    auto remnants = dedupe_remnants(remnants_from_contexts(contexts));

    NameOverrides overrides;
    for (const auto& c : contexts) {
        auto candidate = std::make_pair(c.name, c.description);
        auto [it, inserted] = overrides.try_emplace(c.pattern, candidate);
        if (!inserted && candidate < it->second) it->second = candidate;
    }

    auto rebuilt =
        contexts_from_generalized(generalize_remnants(remnants, ann), ann, opts.environment,
                                  overrides);

    std::map<std::string, Workflow> wf_by_id;
    for (const auto& w : workflows) {
        auto [it, inserted] = wf_by_id.try_emplace(w.workflow_id, w);
        if (!inserted && std::tie(w.task_id, w.steps) < std::tie(it->second.task_id,
                                                                 it->second.steps))
            it->second = w;
    }
    std::map<std::string, std::string> context_by_pattern;
    for (const auto& c : rebuilt) context_by_pattern[c.pattern] = c.context_id;

    std::vector<Workflow> final_workflows;
    for (auto& [id, w] : wf_by_id) {
        for (auto& s : w.steps) {
            auto it = context_by_pattern.find(pattern_for_url(s.url, opts.rules));
            s.context_id = it == context_by_pattern.end() ? "" : it->second;
        }
        final_workflows.push_back(std::move(w));
    }

    // Auto-mined procedures are a pure function of workflows + contexts and
    // are re-derived here; everything else in the incoming knowledge is kept,
    // deduplicated by id.
    TacitKnowledge auto_knowledge =
        extract_knowledge(final_workflows, rebuilt, opts.rules, ann);
    std::map<std::string, Definition> defs;
    for (const auto& d : knowledge.definitions) {
        auto [it, inserted] = defs.try_emplace(d.id, d);
        if (!inserted && std::tie(d.term, d.meaning) < std::tie(it->second.term,
                                                                it->second.meaning))
            it->second = d;
    }
    std::map<std::string, Procedure> procs;
    for (const auto& p : auto_knowledge.procedures) procs.try_emplace(p.id, p);
    for (const auto& p : knowledge.procedures) {
        if (is_auto_procedure(p)) continue;
        procs.try_emplace(p.id, p);
    }

    EnvironmentMap m;
    m.id = "env-map-" + opts.environment;
    m.name = capitalize(opts.environment) + " Environment Map";
    m.base_url = opts.base_url;
    m.contexts = std::move(rebuilt);
    m.workflows = std::move(final_workflows);

    std::set<std::string> known_contexts, known_actions;
    for (const auto& c : m.contexts) {
        known_contexts.insert(c.context_id);
        for (const auto& a : c.actions) known_actions.insert(a.action_id);
    }
    for (auto& [id, d] : defs) {
        bool resolved = true;
        for (const auto& r : d.related_context_ids)
            if (!known_contexts.count(r)) resolved = false;
        for (const auto& r : d.related_action_ids)
            if (!known_actions.count(r)) resolved = false;
        if (resolved) m.tacit_knowledge.definitions.push_back(std::move(d));
    }
    for (auto& [id, p] : procs)
        if (known_contexts.count(p.context_id))
            m.tacit_knowledge.procedures.push_back(std::move(p));

    m.statistics = compute_statistics(m);
    m.description = "Merged environment map from " +
                    std::to_string(m.statistics.recordings_processed) + " " +
                    opts.environment + " recordings";
    m.metadata.created_at = resolve_created_at(opts.created_at);
    m.metadata.pipeline_version = kPipelineVersion;
    m.metadata.annotator_kind = ann.kind_name();

    auto violations = validate_map(m);
    if (!violations.empty()) {
        std::vector<std::string> msgs;
        for (const auto& v : violations) msgs.push_back(v.code + ": " + v.detail);
        throw InvalidMap(msgs);
    }
    return m;
}

EnvironmentMap merge_maps(const EnvironmentMap& a, const EnvironmentMap& b, Annotator& ann,
                          const std::vector<NormalizationRule>& rules) {
    if (a.base_url != b.base_url) throw EnvironmentMismatch(a.base_url, b.base_url);
    if (a.id != b.id) throw EnvironmentMismatch(a.id, b.id);

    BuildOptions opts;
    opts.environment = a.environment();
    opts.base_url = a.base_url;
    opts.rules = rules;
    opts.created_at = std::min(a.metadata.created_at, b.metadata.created_at);

    std::vector<Workflow> workflows = a.workflows;
    workflows.insert(workflows.end(), b.workflows.begin(), b.workflows.end());
    std::vector<Context> contexts = a.contexts;
    contexts.insert(contexts.end(), b.contexts.begin(), b.contexts.end());
    TacitKnowledge knowledge = a.tacit_knowledge;
    knowledge.definitions.insert(knowledge.definitions.end(),
                                 b.tacit_knowledge.definitions.begin(),
                                 b.tacit_knowledge.definitions.end());
    knowledge.procedures.insert(knowledge.procedures.end(),
                                b.tacit_knowledge.procedures.begin(),
                                b.tacit_knowledge.procedures.end());
    return assemble_map(opts, workflows, contexts, knowledge, ann);
}

MapStatistics compute_statistics(const EnvironmentMap& m) {
    MapStatistics s;
    std::set<std::string> tasks;
    for (const auto& w : m.workflows) {
        s.num_steps += static_cast<std::int64_t>(w.steps.size());
        tasks.insert(w.task_id);
    }
    s.pages_identified = static_cast<std::int64_t>(m.contexts.size());
    for (const auto& c : m.contexts) {
        s.actions_extracted += c.action_count;
        for (const auto& a : c.actions)
            for (const auto& i : a.instances) tasks.insert(i.provenance.task_id);
    }
    s.recordings_processed = static_cast<std::int64_t>(tasks.size());
    return s;
}

EnvironmentMap build_map(const std::vector<Trajectory>& trajectories, const BuildOptions& opts,
                         Annotator& ann) {
    std::vector<const Trajectory*> ordered;
    for (const auto& t : trajectories) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const Trajectory* a, const Trajectory* b) { return a->task_id < b->task_id; });

    std::vector<Workflow> workflows;
    std::vector<RawAction> raw;
    for (const Trajectory* t : ordered) {
        Workflow w = build_steps(*t, ann, opts.environment);
        auto actions = extract_actions(w, *t, ann, opts.source_label);
        raw.insert(raw.end(), actions.begin(), actions.end());
        if (!w.steps.empty()) workflows.push_back(std::move(w));
    }
    auto generalized = generalize_actions(raw, ann, opts.rules);
    auto contexts = build_contexts(generalized, ann, opts.environment);
    auto knowledge = extract_knowledge(workflows, contexts, opts.rules, ann);
    return assemble_map(opts, workflows, contexts, knowledge, ann);
}

}  // namespace envmap
