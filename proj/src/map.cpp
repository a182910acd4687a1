#include "envmap/map.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace envmap {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kMapFile = "map.json";

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw SchemaViolation(path.string(), ex.what());
    }
}

template <typename T>
T require(const json& j, const char* field, const std::string& path) {
    auto it = j.find(field);
    if (it == j.end()) throw SchemaViolation(path, std::string("missing field '") + field + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw SchemaViolation(path, std::string("bad type for field '") + field + "'");
    }
}

json provenance_to_json(const Provenance& p) {
    json j;
    j["source"] = p.source;
    j["task_id"] = p.task_id;
    if (p.step_number) j["step_number"] = *p.step_number;
    if (p.snapshot_id) j["snapshot_id"] = *p.snapshot_id;
    return j;
}

Provenance provenance_from_json(const json& j, const std::string& path) {
    Provenance p;
    p.source = require<std::string>(j, "source", path);
    p.task_id = require<std::string>(j, "task_id", path);
    if (j.contains("step_number") && !j["step_number"].is_null())
        p.step_number = j["step_number"].get<std::int64_t>();
    if (j.contains("snapshot_id") && !j["snapshot_id"].is_null())
        p.snapshot_id = j["snapshot_id"].get<std::string>();
    return p;
}

json context_detail_to_json(const Context& c) {
    json j;
    j["id"] = c.context_id;
    j["pattern"] = c.pattern;
    json actions = json::array();
    for (const auto& a : c.actions) {
        json aj;
        aj["action"] = a.action;
        aj["action_id"] = a.action_id;
        aj["type"] = a.is_parameterized ? "generalized" : "specific";
        aj["is_parameterized"] = a.is_parameterized;
        aj["parameter_name"] = a.parameter_name;
        aj["possible_values"] = a.possible_values;
        json instances = json::array();
        for (const auto& i : a.instances) {
            json ij;
            ij["action_id"] = i.instance_id;
            ij["is_taken"] = i.is_taken;
            ij["action_description"] = i.action_description;
            ij["provenance"] = provenance_to_json(i.provenance);
            instances.push_back(std::move(ij));
        }
        aj["instances"] = std::move(instances);
        actions.push_back(std::move(aj));
    }
    j["available_actions"] = std::move(actions);
    return j;
}

Context context_detail_from_json(const json& j, const std::string& path) {
    Context c;
    c.context_id = require<std::string>(j, "id", path);
    c.pattern = require<std::string>(j, "pattern", path);
    for (const auto& aj : require<json>(j, "available_actions", path)) {
        ParameterizedAction a;
        a.action = require<std::string>(aj, "action", path);
        a.action_id = require<std::string>(aj, "action_id", path);
        a.is_parameterized = require<bool>(aj, "is_parameterized", path);
        a.parameter_name = require<std::string>(aj, "parameter_name", path);
        for (const auto& v : require<json>(aj, "possible_values", path))
            a.possible_values.push_back(v.get<std::string>());
        for (const auto& ij : require<json>(aj, "instances", path)) {
            ActionInstance i;
            i.instance_id = require<std::string>(ij, "action_id", path);
            i.is_taken = require<bool>(ij, "is_taken", path);
            i.action_description = require<std::string>(ij, "action_description", path);
            i.provenance = provenance_from_json(require<json>(ij, "provenance", path), path);
            a.instances.push_back(std::move(i));
        }
        c.actions.push_back(std::move(a));
    }
    return c;
}

json workflow_detail_to_json(const Workflow& w) {
    json j;
    j["workflow_id"] = w.workflow_id;
    j["task_id"] = w.task_id;
    json steps = json::array();
    for (const auto& s : w.steps) {
        json sj;
        sj["step_number"] = s.step_number;
        sj["name"] = s.name;
        sj["description"] = s.description;
        sj["outcome"] = s.outcome;
        sj["url"] = s.url;
        sj["context_id"] = s.context_id;
        steps.push_back(std::move(sj));
    }
    j["steps"] = std::move(steps);
    return j;
}

Workflow workflow_detail_from_json(const json& j, const std::string& path) {
    Workflow w;
    w.workflow_id = require<std::string>(j, "workflow_id", path);
    w.task_id = require<std::string>(j, "task_id", path);
    for (const auto& sj : require<json>(j, "steps", path)) {
        Step s;
        s.step_number = require<std::int64_t>(sj, "step_number", path);
        s.name = require<std::string>(sj, "name", path);
        s.description = require<std::string>(sj, "description", path);
        s.outcome = require<std::string>(sj, "outcome", path);
        s.url = require<std::string>(sj, "url", path);
        s.context_id = require<std::string>(sj, "context_id", path);
        w.steps.push_back(std::move(s));
    }
    return w;
}

json knowledge_to_json(const TacitKnowledge& k) {
    json j;
    json defs = json::array();
    for (const auto& d : k.definitions) {
        json dj;
        dj["id"] = d.id;
        dj["term"] = d.term;
        dj["meaning"] = d.meaning;
        dj["related_context_ids"] = d.related_context_ids;
        dj["related_action_ids"] = d.related_action_ids;
        defs.push_back(std::move(dj));
    }
    json procs = json::array();
    for (const auto& p : k.procedures) {
        json pj;
        pj["id"] = p.id;
        pj["goal"] = p.goal;
        pj["context_id"] = p.context_id;
        pj["action_sequence"] = p.action_sequence;
        procs.push_back(std::move(pj));
    }
    j["definitions"] = std::move(defs);
    j["procedures"] = std::move(procs);
    return j;
}

TacitKnowledge knowledge_from_json(const json& j, const std::string& path) {
    TacitKnowledge k;
    for (const auto& dj : require<json>(j, "definitions", path)) {
        Definition d;
        d.id = require<std::string>(dj, "id", path);
        d.term = require<std::string>(dj, "term", path);
        d.meaning = require<std::string>(dj, "meaning", path);
        for (const auto& v : require<json>(dj, "related_context_ids", path))
            d.related_context_ids.push_back(v.get<std::string>());
        for (const auto& v : require<json>(dj, "related_action_ids", path))
            d.related_action_ids.push_back(v.get<std::string>());
        k.definitions.push_back(std::move(d));
    }
    for (const auto& pj : require<json>(j, "procedures", path)) {
        Procedure p;
        p.id = require<std::string>(pj, "id", path);
        p.goal = require<std::string>(pj, "goal", path);
        p.context_id = require<std::string>(pj, "context_id", path);
        for (const auto& v : require<json>(pj, "action_sequence", path))
            p.action_sequence.push_back(v.get<std::string>());
        k.procedures.push_back(std::move(p));
    }
    return k;
}

const std::regex& context_id_re() {
    static const std::regex re("context\\.[a-z0-9_]+");
    return re;
}
const std::regex& action_id_re() {
    static const std::regex re("action\\.[a-z0-9_]+");
    return re;
}
const std::regex& instance_id_re() {
    static const std::regex re("instance\\.[a-z0-9_]+_[0-9]+_[0-9]+");
    return re;
}
const std::regex& workflow_id_re() {
    static const std::regex re("workflow\\.[a-z0-9_]+");
    return re;
}

// Recovers the parameter binding of `description` against `tmpl`, if any.
std::optional<std::string> extract_binding(const std::string& tmpl,
                                           const std::string& description) {
    auto open = tmpl.find('{');
    auto close = tmpl.find('}', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos) return std::nullopt;
    std::string prefix = tmpl.substr(0, open);
    std::string suffix = tmpl.substr(close + 1);
    if (description.size() >= prefix.size() + suffix.size() &&
        description.compare(0, prefix.size(), prefix) == 0 &&
        description.compare(description.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return description.substr(prefix.size(),
                                  description.size() - prefix.size() - suffix.size());
    }
    // Empty binding collapses the surrounding whitespace.
    if (instantiate_template(tmpl, "") == description) return std::string();
    return std::nullopt;
}

}  // namespace

std::string EnvironmentMap::environment() const {
    const std::string prefix = "env-map-";
    if (id.rfind(prefix, 0) == 0) return id.substr(prefix.size());
    return id;
}

std::string sanitize_id(const std::string& s) {
    std::string out;
    bool last_us = false;
    for (char ch : s) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out += c;
            last_us = false;
        } else if (!last_us && !out.empty()) {
            out += '_';
            last_us = true;
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "x" : out;
}

std::string instantiate_template(const std::string& tmpl, const std::string& value) {
    std::string out = tmpl;
    auto open = out.find('{');
    auto close = out.find('}', open == std::string::npos ? 0 : open);
    if (open != std::string::npos && close != std::string::npos)
        out = out.substr(0, open) + value + out.substr(close + 1);
    // Collapse double spaces left by empty values, trim the ends.
    std::string tidy;
    for (char c : out)
        if (c != ' ' || tidy.empty() || tidy.back() != ' ') tidy += c;
    while (!tidy.empty() && tidy.front() == ' ') tidy.erase(tidy.begin());
    while (!tidy.empty() && tidy.back() == ' ') tidy.pop_back();
    return tidy;
}

void serialize_map(const EnvironmentMap& m, const std::filesystem::path& out_dir) {
    auto violations = validate_map(m);
    if (!violations.empty()) {
        std::vector<std::string> msgs;
        for (const auto& v : violations) msgs.push_back(v.code + ": " + v.detail);
        throw InvalidMap(msgs);
    }

    std::filesystem::create_directories(out_dir / "contexts");
    std::filesystem::create_directories(out_dir / "workflows");

    json top;
    top["id"] = m.id;
    top["name"] = m.name;
    top["description"] = m.description;
    top["base_url"] = m.base_url;
    json page_contexts = json::array();
    for (const auto& c : m.contexts) {
        json cj;
        cj["context_id"] = c.context_id;
        cj["name"] = c.name;
        cj["description"] = c.description;
        cj["pattern"] = c.pattern;
        cj["context_mesh_path"] = c.mesh_path;
        cj["action_count"] = c.action_count;
        cj["contributing_recordings"] = c.contributing_recordings;
        page_contexts.push_back(std::move(cj));
        write_json_file(out_dir / c.mesh_path, context_detail_to_json(c));
    }
    top["page_contexts"] = std::move(page_contexts);
    json workflows = json::array();
    for (const auto& w : m.workflows) {
        json wj;
        wj["workflow_id"] = w.workflow_id;
        wj["workflow_mesh_path"] = w.mesh_path;
        workflows.push_back(std::move(wj));
        write_json_file(out_dir / w.mesh_path, workflow_detail_to_json(w));
    }
    top["workflows"] = std::move(workflows);
    top["tacit_knowledge"] = knowledge_to_json(m.tacit_knowledge);
    json stats;
    stats["num_steps"] = m.statistics.num_steps;
    stats["pages_identified"] = m.statistics.pages_identified;
    stats["actions_extracted"] = m.statistics.actions_extracted;
    stats["recordings_processed"] = m.statistics.recordings_processed;
    top["statistics"] = std::move(stats);
    json meta;
    meta["created_at"] = m.metadata.created_at;
    meta["pipeline_version"] = m.metadata.pipeline_version;
    meta["annotator_kind"] = m.metadata.annotator_kind;
    top["metadata"] = std::move(meta);

    write_json_file(out_dir / kMapFile, top);
}

EnvironmentMap deserialize_map(const std::filesystem::path& dir) {
    auto top_path = dir / kMapFile;
    json top = read_json_file(top_path);
    std::string where = top_path.string();

    EnvironmentMap m;
    m.id = require<std::string>(top, "id", where);
    m.name = require<std::string>(top, "name", where);
    m.description = require<std::string>(top, "description", where);
    m.base_url = require<std::string>(top, "base_url", where);

    for (const auto& cj : require<json>(top, "page_contexts", where)) {
        std::string context_id = require<std::string>(cj, "context_id", where);
        std::string mesh_path = require<std::string>(cj, "context_mesh_path", where);
        auto detail_path = dir / mesh_path;
        if (!std::filesystem::exists(detail_path))
            throw DanglingMeshPath(context_id, mesh_path);
        Context c = context_detail_from_json(read_json_file(detail_path), detail_path.string());
        c.name = require<std::string>(cj, "name", where);
        c.description = require<std::string>(cj, "description", where);
        c.action_count = require<std::int64_t>(cj, "action_count", where);
        for (const auto& r : require<json>(cj, "contributing_recordings", where))
            c.contributing_recordings.push_back(r.get<std::string>());
        c.mesh_path = mesh_path;
        if (c.context_id != context_id)
            throw SchemaViolation(detail_path.string(), "id disagrees with map.json context_id");
        m.contexts.push_back(std::move(c));
    }
    for (const auto& wj : require<json>(top, "workflows", where)) {
        std::string workflow_id = require<std::string>(wj, "workflow_id", where);
        std::string mesh_path = require<std::string>(wj, "workflow_mesh_path", where);
        auto detail_path = dir / mesh_path;
        if (!std::filesystem::exists(detail_path))
            throw DanglingMeshPath(workflow_id, mesh_path);
        Workflow w =
            workflow_detail_from_json(read_json_file(detail_path), detail_path.string());
        w.mesh_path = mesh_path;
        if (w.workflow_id != workflow_id)
            throw SchemaViolation(detail_path.string(),
                                  "workflow_id disagrees with map.json entry");
        m.workflows.push_back(std::move(w));
    }
    m.tacit_knowledge = knowledge_from_json(require<json>(top, "tacit_knowledge", where), where);
    json stats = require<json>(top, "statistics", where);
    m.statistics.num_steps = require<std::int64_t>(stats, "num_steps", where);
    m.statistics.pages_identified = require<std::int64_t>(stats, "pages_identified", where);
    m.statistics.actions_extracted = require<std::int64_t>(stats, "actions_extracted", where);
    m.statistics.recordings_processed =
        require<std::int64_t>(stats, "recordings_processed", where);
    json meta = require<json>(top, "metadata", where);
    m.metadata.created_at = require<std::string>(meta, "created_at", where);
    m.metadata.pipeline_version = require<std::string>(meta, "pipeline_version", where);
    m.metadata.annotator_kind = require<std::string>(meta, "annotator_kind", where);
    return m;
}

std::vector<Violation> validate_map(const EnvironmentMap& m) {
    std::vector<Violation> out;

    if (m.id.rfind("env-map-", 0) != 0)
        out.push_back({"BadMapId", "map id '" + m.id + "' lacks env-map- prefix"});

    std::set<std::string> context_ids, action_ids, instance_ids, patterns, workflow_ids;
    std::set<std::string> provenance_tasks;
    std::int64_t total_instances = 0;

    for (const auto& c : m.contexts) {
        if (!std::regex_match(c.context_id, context_id_re()))
            out.push_back({"BadId", "context id '" + c.context_id + "'"});
        if (!context_ids.insert(c.context_id).second)
            out.push_back({"DuplicateId", "context id '" + c.context_id + "'"});
        if (!patterns.insert(c.pattern).second)
            out.push_back({"DuplicatePattern", "pattern '" + c.pattern + "' in " + c.context_id});

        std::int64_t count = 0;
        std::set<std::string> recordings;
        for (const auto& a : c.actions) {
            if (!std::regex_match(a.action_id, action_id_re()))
                out.push_back({"BadId", "action id '" + a.action_id + "'"});
            if (!action_ids.insert(a.action_id).second)
                out.push_back({"DuplicateId", "action id '" + a.action_id + "'"});
            bool has_placeholder = a.action.find('{') != std::string::npos &&
                                   a.action.find('}') != std::string::npos;
            if (a.is_parameterized != has_placeholder)
                out.push_back({"TemplateMismatch",
                               a.action_id + ": is_parameterized disagrees with template '" +
                                   a.action + "'"});

            std::set<std::string> observed;
            for (const auto& i : a.instances) {
                ++count;
                if (!std::regex_match(i.instance_id, instance_id_re()))
                    out.push_back({"BadId", "instance id '" + i.instance_id + "'"});
                if (!instance_ids.insert(i.instance_id).second)
                    out.push_back({"DuplicateId", "instance id '" + i.instance_id + "'"});
                if (!i.provenance.step_number && !i.provenance.snapshot_id)
                    out.push_back({"EmptyProvenance",
                                   i.instance_id + " carries neither step nor snapshot"});
                if (i.is_taken && !i.provenance.step_number)
                    out.push_back({"MissingStepNumber",
                                   "taken instance " + i.instance_id + " has no step_number"});
                if (!i.is_taken && !i.provenance.snapshot_id)
                    out.push_back({"MissingSnapshotId",
                                   "potential instance " + i.instance_id + " has no snapshot"});
                recordings.insert(i.provenance.task_id);
                provenance_tasks.insert(i.provenance.task_id);
                if (a.is_parameterized) {
                    auto binding = extract_binding(a.action, i.action_description);
                    if (!binding) {
                        out.push_back({"InstanceMismatch",
                                       i.instance_id + " description '" + i.action_description +
                                           "' does not instantiate '" + a.action + "'"});
                    } else {
                        observed.insert(*binding);
                        if (std::find(a.possible_values.begin(), a.possible_values.end(),
                                      *binding) == a.possible_values.end())
                            out.push_back({"UnknownValue",
                                           i.instance_id + " binds '" + *binding +
                                               "' absent from possible_values"});
                    }
                } else if (i.action_description != a.action) {
                    out.push_back({"InstanceMismatch",
                                   i.instance_id + " description differs from template '" +
                                       a.action + "'"});
                }
            }
            if (a.is_parameterized) {
                std::set<std::string> declared(a.possible_values.begin(),
                                               a.possible_values.end());
                if (declared != observed)
                    out.push_back({"ValueSetMismatch",
                                   a.action_id + ": possible_values differs from observed"});
            } else if (!a.possible_values.empty()) {
                out.push_back({"ValueSetMismatch",
                               a.action_id + ": unparameterized action lists values"});
            }
        }
        total_instances += count;
        if (count != c.action_count)
            out.push_back({"CountMismatch",
                           c.context_id + ": action_count " + std::to_string(c.action_count) +
                               " != " + std::to_string(count) + " instances"});
        std::set<std::string> declared(c.contributing_recordings.begin(),
                                       c.contributing_recordings.end());
        if (declared != recordings)
            out.push_back({"RecordingsMismatch",
                           c.context_id + ": contributing_recordings differs from provenance"});
    }

    std::int64_t total_steps = 0;
    for (const auto& w : m.workflows) {
        if (!std::regex_match(w.workflow_id, workflow_id_re()))
            out.push_back({"BadId", "workflow id '" + w.workflow_id + "'"});
        if (!workflow_ids.insert(w.workflow_id).second)
            out.push_back({"DuplicateId", "workflow id '" + w.workflow_id + "'"});
        if (w.steps.empty())
            out.push_back({"EmptyWorkflow", w.workflow_id + " has no steps"});
        std::int64_t expected = 1;
        for (const auto& s : w.steps) {
            if (s.step_number != expected++)
                out.push_back({"NonContiguousSteps",
                               w.workflow_id + " step numbering breaks at " +
                                   std::to_string(s.step_number)});
            if (s.url.empty())
                out.push_back({"EmptyUrl", w.workflow_id + " step " +
                                               std::to_string(s.step_number) + " has no url"});
            if (!s.context_id.empty() && !context_ids.count(s.context_id))
                out.push_back({"UnresolvedReference",
                               w.workflow_id + " step references " + s.context_id});
        }
        total_steps += static_cast<std::int64_t>(w.steps.size());
        provenance_tasks.insert(w.task_id);
    }

    std::set<std::string> knowledge_ids;
    auto check_ref = [&](const std::string& owner, const std::string& ref, bool is_context) {
        const auto& pool = is_context ? context_ids : action_ids;
        if (!pool.count(ref))
            out.push_back({"UnresolvedReference", owner + " references unknown '" + ref + "'"});
    };
    for (const auto& d : m.tacit_knowledge.definitions) {
        if (!knowledge_ids.insert(d.id).second)
            out.push_back({"DuplicateId", "knowledge id '" + d.id + "'"});
        for (const auto& r : d.related_context_ids) check_ref(d.id, r, true);
        for (const auto& r : d.related_action_ids) check_ref(d.id, r, false);
    }
    for (const auto& p : m.tacit_knowledge.procedures) {
        if (!knowledge_ids.insert(p.id).second)
            out.push_back({"DuplicateId", "knowledge id '" + p.id + "'"});
        check_ref(p.id, p.context_id, true);
    }

    if (m.statistics.pages_identified != static_cast<std::int64_t>(m.contexts.size()))
        out.push_back({"StatisticsMismatch", "pages_identified != |contexts|"});
    if (m.statistics.actions_extracted != total_instances)
        out.push_back({"StatisticsMismatch", "actions_extracted != total instances"});
    if (m.statistics.num_steps != total_steps)
        out.push_back({"StatisticsMismatch", "num_steps != total workflow steps"});
    if (m.statistics.recordings_processed !=
        static_cast<std::int64_t>(provenance_tasks.size()))
        out.push_back({"StatisticsMismatch", "recordings_processed != distinct task ids"});

    return out;
}

}  // namespace envmap
