#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "envmap/errors.hpp"

namespace envmap {

enum class ActionType { click, type, scroll, navigate, select, key, utterance };

std::string to_string(ActionType t);
ActionType action_type_from_string(const std::string& s);

struct RawEvent {
    std::int64_t index = 0;
    std::int64_t timestamp = 0;  // ms since session start
    ActionType action_type = ActionType::click;
    std::string url;
    std::string selector;
    std::string element_text;
    std::string element_role;
    std::string value;
    std::string utterance;
    std::string snapshot_ref;

    bool operator==(const RawEvent&) const = default;
};

struct InterfaceElement {
    std::string element_id;
    std::string role;
    std::string text;
    bool interactable = false;
    std::vector<std::string> children;

    bool operator==(const InterfaceElement&) const = default;
};

struct DomSnapshot {
    std::string snapshot_id;
    std::string url;
    std::vector<InterfaceElement> elements;
    std::int64_t capture_index = 0;  // event index the snapshot follows

    bool operator==(const DomSnapshot&) const = default;
};

struct Trajectory {
    std::string task_id;
    std::string environment;
    std::string base_url;
    std::vector<RawEvent> events;
    std::map<std::string, DomSnapshot> snapshots;

    bool operator==(const Trajectory&) const = default;
};

// Parses the canonical line-delimited event-log format. Line 1 is a header
// record `{"kind":"header","task_id":...,"environment":...,"base_url":...}`;
// following lines are event or snapshot records discriminated by `kind`.
Trajectory parse_trajectory(std::istream& source);
Trajectory parse_trajectory(const std::string& source_text);
Trajectory parse_trajectory_file(const std::string& path);

// Inverse of parse_trajectory; emits one record per line.
std::string serialize_trajectory(const Trajectory& t);

// Reports every invariant breach (non-monotonic index, non-decreasing
// timestamp, empty url on an action event, dangling snapshot_ref, duplicate
// snapshot ids, element cycles). Empty result iff the trajectory is valid.
std::vector<Violation> validate_trajectory(const Trajectory& t);

// Depth-first `role "text" [element_id]` serialization of a snapshot, one
// indented line per element. Roots are elements no other element lists as a
// child, in declaration order.
std::string serialize_snapshot_tree(const DomSnapshot& snapshot);

}  // namespace envmap
