#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "envmap/annotate.hpp"
#include "envmap/map.hpp"
#include "envmap/normalize.hpp"
#include "envmap/trace.hpp"

namespace envmap {

// Intermediate unparameterized action (phase 2 output).
struct RawAction {
    std::string name;
    std::string description;
    std::string expected_outcome;
    bool taken = false;
    std::string url;  // source url, used for context assignment
    Provenance provenance;
    std::string verb;         // interaction verb, first token of the name
    std::string element_role;  // accessibility-role proxy for target structure
    std::string instance_id;   // instance.<task>_<step|capture>_<idx>
};

// An induced action template together with the pattern it belongs to.
struct GeneralizedAction {
    std::string pattern;
    std::string verb;
    std::string parameter_name;
    ParameterizedAction action;
};

struct BuildOptions {
    std::string environment;
    std::string base_url;
    std::vector<NormalizationRule> rules = default_rules();
    std::string created_at;  // empty -> resolved from SOURCE_DATE_EPOCH or now
    std::string source_label = "trajectory";
};

inline constexpr const char* kPipelineVersion = "1.0.0";

// Phase 1: one Step per action-bearing event; utterances fold into the next
// step's description. Step context_ids are left empty until assembly.
Workflow build_steps(const Trajectory& t, Annotator& ann, const std::string& environment);

// Phase 2: one taken RawAction per step plus potential RawActions proposed
// from unexercised snapshot elements.
std::vector<RawAction> extract_actions(const Workflow& w, const Trajectory& t, Annotator& ann,
                                       const std::string& source_label = "trajectory");

// Phase 3: partition by (verb, element role, normalized url) and induce one
// template per class; every raw action becomes exactly one instance.
std::vector<GeneralizedAction> generalize_actions(const std::vector<RawAction>& raw,
                                                  Annotator& ann,
                                                  const std::vector<NormalizationRule>& rules);

// Phase 4: one context per pattern, named via describe_context; action and
// context ids assigned, lists canonically sorted.
std::vector<Context> build_contexts(const std::vector<GeneralizedAction>& actions,
                                    Annotator& ann, const std::string& environment);

// Phase 4: tacit knowledge. The heuristic provider mines repeated consecutive
// step subsequences per context; definitions come only from the remote
// provider. Entries with unresolvable references are dropped and reported
// through `warnings`.
TacitKnowledge extract_knowledge(const std::vector<Workflow>& workflows,
                                 const std::vector<Context>& contexts,
                                 const std::vector<NormalizationRule>& rules, Annotator& ann,
                                 std::vector<std::string>* warnings = nullptr);

// Phase 5: canonical assembly. Same-pattern contexts merge, same-class
// actions consolidate (values unioned, templates re-induced), knowledge is
// deduplicated by id, statistics recomputed, ordering canonicalized. The
// result passes validate_map.
EnvironmentMap assemble_map(const BuildOptions& opts, const std::vector<Workflow>& workflows,
                            const std::vector<Context>& contexts,
                            const TacitKnowledge& knowledge, Annotator& ann);

// Deterministic pattern-keyed merge of two maps of the same environment;
// instances deduplicate by id, auto-mined procedures are re-derived from the
// merged workflows, hand-added knowledge survives by id.
EnvironmentMap merge_maps(const EnvironmentMap& a, const EnvironmentMap& b, Annotator& ann,
                          const std::vector<NormalizationRule>& rules = default_rules());

MapStatistics compute_statistics(const EnvironmentMap& m);

// Phases 1-5 over a trajectory set.
EnvironmentMap build_map(const std::vector<Trajectory>& trajectories, const BuildOptions& opts,
                         Annotator& ann);

// Resolves BuildOptions.created_at: explicit value, else SOURCE_DATE_EPOCH,
// else the current UTC time, as `YYYY-MM-DDTHH:MM:SSZ`.
std::string resolve_created_at(const std::string& requested);

}  // namespace envmap
