#include "envmap/trace.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace envmap {

using json = nlohmann::ordered_json;

std::string to_string(ActionType t) {
    switch (t) {
        case ActionType::click: return "click";
        case ActionType::type: return "type";
        case ActionType::scroll: return "scroll";
        case ActionType::navigate: return "navigate";
        case ActionType::select: return "select";
        case ActionType::key: return "key";
        case ActionType::utterance: return "utterance";
    }
    return "click";
}

ActionType action_type_from_string(const std::string& s) {
    if (s == "click") return ActionType::click;
    if (s == "type") return ActionType::type;
    if (s == "scroll") return ActionType::scroll;
    if (s == "navigate") return ActionType::navigate;
    if (s == "select") return ActionType::select;
    if (s == "key") return ActionType::key;
    if (s == "utterance") return ActionType::utterance;
    throw std::invalid_argument("unknown action_type '" + s + "'");
}

namespace {

std::string opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return "";
    return it->get<std::string>();
}

RawEvent event_from_json(const json& j, std::size_t line_no) {
    RawEvent e;
    try {
        e.index = j.at("index").get<std::int64_t>();
        e.timestamp = j.at("timestamp").get<std::int64_t>();
        e.action_type = action_type_from_string(j.at("action_type").get<std::string>());
        e.url = opt_string(j, "url");
        e.selector = opt_string(j, "selector");
        e.element_text = opt_string(j, "element_text");
        e.element_role = opt_string(j, "element_role");
        e.value = opt_string(j, "value");
        e.utterance = opt_string(j, "utterance");
        e.snapshot_ref = opt_string(j, "snapshot_ref");
    } catch (const json::exception& ex) {
        throw MalformedRecord(line_no, ex.what());
    } catch (const std::invalid_argument& ex) {
        throw MalformedRecord(line_no, ex.what());
    }
    return e;
}

DomSnapshot snapshot_from_json(const json& j, std::size_t line_no) {
    DomSnapshot s;
    try {
        s.snapshot_id = j.at("snapshot_id").get<std::string>();
        s.url = opt_string(j, "url");
        s.capture_index = j.value("capture_index", std::int64_t{0});
        for (const auto& ej : j.value("elements", json::array())) {
            InterfaceElement el;
            el.element_id = ej.at("element_id").get<std::string>();
            el.role = opt_string(ej, "role");
            el.text = opt_string(ej, "text");
            el.interactable = ej.value("interactable", false);
            for (const auto& c : ej.value("children", json::array()))
                el.children.push_back(c.get<std::string>());
            s.elements.push_back(std::move(el));
        }
    } catch (const json::exception& ex) {
        throw MalformedRecord(line_no, ex.what());
    }
    return s;
}

json event_to_json(const RawEvent& e) {
    json j;
    j["kind"] = "event";
    j["index"] = e.index;
    j["timestamp"] = e.timestamp;
    j["action_type"] = to_string(e.action_type);
    if (!e.url.empty()) j["url"] = e.url;
    if (!e.selector.empty()) j["selector"] = e.selector;
    if (!e.element_text.empty()) j["element_text"] = e.element_text;
    if (!e.element_role.empty()) j["element_role"] = e.element_role;
    if (!e.value.empty()) j["value"] = e.value;
    if (!e.utterance.empty()) j["utterance"] = e.utterance;
    if (!e.snapshot_ref.empty()) j["snapshot_ref"] = e.snapshot_ref;
    return j;
}

json snapshot_to_json(const DomSnapshot& s) {
    json j;
    j["kind"] = "snapshot";
    j["snapshot_id"] = s.snapshot_id;
    j["url"] = s.url;
    j["capture_index"] = s.capture_index;
    json elements = json::array();
    for (const auto& el : s.elements) {
        json ej;
        ej["element_id"] = el.element_id;
        ej["role"] = el.role;
        ej["text"] = el.text;
        ej["interactable"] = el.interactable;
        ej["children"] = el.children;
        elements.push_back(std::move(ej));
    }
    j["elements"] = std::move(elements);
    return j;
}

}  // namespace

Trajectory parse_trajectory(std::istream& source) {
    Trajectory t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            throw MalformedRecord(line_no, ex.what());
        }
        if (!j.is_object() || !j.contains("kind"))
            throw MalformedRecord(line_no, "record has no 'kind' field");
        std::string kind = j["kind"].get<std::string>();

        if (!have_header) {
            if (kind != "header" || !j.contains("task_id"))
                throw MissingHeader("first record must be a header with task_id");
            t.task_id = j["task_id"].get<std::string>();
            if (t.task_id.empty()) throw MissingHeader("task_id is empty");
            t.environment = opt_string(j, "environment");
            t.base_url = opt_string(j, "base_url");
            have_header = true;
            continue;
        }
        if (kind == "event") {
            t.events.push_back(event_from_json(j, line_no));
        } else if (kind == "snapshot") {
            DomSnapshot s = snapshot_from_json(j, line_no);
            t.snapshots[s.snapshot_id] = std::move(s);
        } else {
            throw MalformedRecord(line_no, "unknown record kind '" + kind + "'");
        }
    }
    if (!have_header) throw MissingHeader("input is empty");

    for (const auto& e : t.events) {
        if (!e.snapshot_ref.empty() && !t.snapshots.count(e.snapshot_ref))
            throw DanglingSnapshotRef(static_cast<std::size_t>(e.index), e.snapshot_ref);
    }
    return t;
}

Trajectory parse_trajectory(const std::string& source_text) {
    std::istringstream in(source_text);
    return parse_trajectory(in);
}

Trajectory parse_trajectory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    return parse_trajectory(in);
}

std::string serialize_trajectory(const Trajectory& t) {
    std::string out;
    json header;
    header["kind"] = "header";
    header["task_id"] = t.task_id;
    header["environment"] = t.environment;
    header["base_url"] = t.base_url;
    out += header.dump() + "\n";
    for (const auto& e : t.events) out += event_to_json(e).dump() + "\n";
    for (const auto& [id, s] : t.snapshots) out += snapshot_to_json(s).dump() + "\n";
    return out;
}

std::vector<Violation> validate_trajectory(const Trajectory& t) {
    std::vector<Violation> out;
    if (t.task_id.empty()) out.push_back({"EmptyTaskId", "trajectory has no task_id"});

    std::int64_t prev_index = -1;
    std::int64_t prev_ts = -1;
    for (std::size_t pos = 0; pos < t.events.size(); ++pos) {
        const auto& e = t.events[pos];
        if (e.index <= prev_index)
            out.push_back({"NonMonotonicIndex",
                           "event at position " + std::to_string(pos) + " has index " +
                               std::to_string(e.index) + " after " + std::to_string(prev_index)});
        if (e.timestamp < prev_ts)
            out.push_back({"DecreasingTimestamp",
                           "event at position " + std::to_string(pos) + " goes back in time"});
        if (e.url.empty() && e.action_type != ActionType::utterance)
            out.push_back({"EmptyUrl", "event at index " + std::to_string(e.index) +
                                           " has no url"});
        if (!e.snapshot_ref.empty() && !t.snapshots.count(e.snapshot_ref))
            out.push_back({"DanglingSnapshotRef",
                           "event at index " + std::to_string(e.index) +
                               " references '" + e.snapshot_ref + "'"});
        prev_index = e.index;
        prev_ts = e.timestamp;
    }

    for (const auto& [id, s] : t.snapshots) {
        std::set<std::string> ids;
        for (const auto& el : s.elements) {
            if (!ids.insert(el.element_id).second)
                out.push_back({"DuplicateElementId",
                               "snapshot " + id + " repeats element '" + el.element_id + "'"});
        }
        for (const auto& el : s.elements)
            for (const auto& c : el.children)
                if (!ids.count(c))
                    out.push_back({"DanglingChildRef",
                                   "snapshot " + id + " element '" + el.element_id +
                                       "' lists unknown child '" + c + "'"});
        // Cycle check: every element may be visited at most once on any
        // root-to-leaf walk; detected via ancestor tracking.
        std::set<std::string> child_ids;
        for (const auto& el : s.elements)
            for (const auto& c : el.children) child_ids.insert(c);
        std::map<std::string, const InterfaceElement*> by_id;
        for (const auto& el : s.elements) by_id[el.element_id] = &el;
        std::set<std::string> on_path;
        std::set<std::string> visited;
        auto walk = [&](auto&& self, const std::string& eid) -> bool {
            if (on_path.count(eid)) return false;
            auto it = by_id.find(eid);
            if (it == by_id.end()) return true;
            visited.insert(eid);
            on_path.insert(eid);
            for (const auto& c : it->second->children)
                if (!self(self, c)) return false;
            on_path.erase(eid);
            return true;
        };
        bool cycle = false;
        for (const auto& el : s.elements) {
            if (child_ids.count(el.element_id)) continue;
            if (!walk(walk, el.element_id)) cycle = true;
        }
        // Elements unreachable from any root can only sit in (or below)
        // rootless cycles; walk them too.
        for (const auto& el : s.elements)
            if (!cycle && !visited.count(el.element_id) && !walk(walk, el.element_id))
                cycle = true;
        if (cycle)
            out.push_back({"ElementCycle", "snapshot " + id + " has a child cycle"});
    }
    return out;
}

std::string serialize_snapshot_tree(const DomSnapshot& snapshot) {
    std::map<std::string, const InterfaceElement*> by_id;
    std::set<std::string> child_ids;
    for (const auto& el : snapshot.elements) {
        by_id[el.element_id] = &el;
        for (const auto& c : el.children) child_ids.insert(c);
    }
    std::string out;
    std::set<std::string> visited;
    auto emit = [&](auto&& self, const InterfaceElement& el, int depth) -> void {
        if (!visited.insert(el.element_id).second) return;
        out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + el.role + " \"" +
               el.text + "\" [" + el.element_id + "]\n";
        for (const auto& c : el.children) {
            auto it = by_id.find(c);
            if (it != by_id.end()) self(self, *it->second, depth + 1);
        }
    };
    for (const auto& el : snapshot.elements)
        if (!child_ids.count(el.element_id)) emit(emit, el, 0);
    return out;
}

}  // namespace envmap
