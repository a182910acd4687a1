#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "envmap/errors.hpp"

namespace envmap {

struct Provenance {
    std::string source;   // trajectory source label
    std::string task_id;  // recording id
    std::optional<std::int64_t> step_number;
    std::optional<std::string> snapshot_id;

    bool operator==(const Provenance&) const = default;
};

struct ActionInstance {
    std::string instance_id;  // instance.<task>_<step>_<idx>
    bool is_taken = false;
    std::string action_description;  // the specific action, e.g. "Click Settings"
    Provenance provenance;

    bool operator==(const ActionInstance&) const = default;
};

struct ParameterizedAction {
    std::string action_id;      // action.<id>
    std::string action;         // template, at most one {placeholder}
    bool is_parameterized = false;
    std::string parameter_name;  // role-derived slot name, e.g. link_text
    std::vector<std::string> possible_values;
    std::vector<ActionInstance> instances;

    bool operator==(const ParameterizedAction&) const = default;
};

struct Context {
    std::string context_id;  // context.<name>
    std::string name;
    std::string description;
    std::string pattern;  // normalized URL pattern
    std::vector<ParameterizedAction> actions;
    std::int64_t action_count = 0;  // total instance count
    std::vector<std::string> contributing_recordings;
    std::string mesh_path;  // relative path of the detailed context file

    bool operator==(const Context&) const = default;
};

struct Step {
    std::int64_t step_number = 0;
    std::string name;
    std::string description;
    std::string outcome;
    std::string url;
    std::string context_id;

    auto operator<=>(const Step&) const = default;
    bool operator==(const Step&) const = default;
};

struct Workflow {
    std::string workflow_id;  // workflow.<env>_<task_id>
    std::string task_id;
    std::vector<Step> steps;
    std::string mesh_path;

    bool operator==(const Workflow&) const = default;
};

struct Definition {
    std::string id;
    std::string term;
    std::string meaning;
    std::vector<std::string> related_context_ids;
    std::vector<std::string> related_action_ids;

    bool operator==(const Definition&) const = default;
};

struct Procedure {
    std::string id;
    std::string goal;
    std::string context_id;
    std::vector<std::string> action_sequence;

    bool operator==(const Procedure&) const = default;
};

struct TacitKnowledge {
    std::vector<Definition> definitions;
    std::vector<Procedure> procedures;

    bool operator==(const TacitKnowledge&) const = default;
};

struct MapStatistics {
    std::int64_t num_steps = 0;
    std::int64_t pages_identified = 0;
    std::int64_t actions_extracted = 0;
    std::int64_t recordings_processed = 0;

    bool operator==(const MapStatistics&) const = default;
};

struct MapMetadata {
    std::string created_at;
    std::string pipeline_version;
    std::string annotator_kind;

    bool operator==(const MapMetadata&) const = default;
};

struct EnvironmentMap {
    std::string id;  // env-map-<env>
    std::string name;
    std::string description;
    std::string base_url;
    std::vector<Context> contexts;
    std::vector<Workflow> workflows;
    TacitKnowledge tacit_knowledge;
    MapStatistics statistics;
    MapMetadata metadata;

    bool operator==(const EnvironmentMap&) const = default;

    // Environment name embedded in the map id (`env-map-gitlab` -> `gitlab`).
    std::string environment() const;
};

// Lowercases and squashes a string into the [a-z0-9_]+ id alphabet.
std::string sanitize_id(const std::string& s);

// Substitutes the single {placeholder} of a template and tidies whitespace;
// used both when instantiating and when checking instance descriptions.
std::string instantiate_template(const std::string& tmpl, const std::string& value);

// Writes `<out_dir>/map.json` plus one detail file per context
// (`contexts/<context_id>.json`) and per workflow
// (`workflows/<workflow_id>.json`). 2-space indented JSON, LF endings,
// keys in schema order. Throws InvalidMap when validate_map reports breaches.
void serialize_map(const EnvironmentMap& m, const std::filesystem::path& out_dir);

// Reads a map directory written by serialize_map (or hand-edited in place).
EnvironmentMap deserialize_map(const std::filesystem::path& dir);

// Reports every invariant breach; empty iff the map is well-formed.
std::vector<Violation> validate_map(const EnvironmentMap& m);

}  // namespace envmap
