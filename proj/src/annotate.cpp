#include "envmap/annotate.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace envmap {

using json = nlohmann::ordered_json;

std::string to_string(AnnotationKind k) {
    switch (k) {
        case AnnotationKind::summarize_step: return "summarize_step";
        case AnnotationKind::propose_potential_actions: return "propose_potential_actions";
        case AnnotationKind::induce_template: return "induce_template";
        case AnnotationKind::describe_context: return "describe_context";
        case AnnotationKind::extract_knowledge: return "extract_knowledge";
    }
    return "summarize_step";
}

AnnotationKind annotation_kind_from_string(const std::string& s) {
    if (s == "summarize_step") return AnnotationKind::summarize_step;
    if (s == "propose_potential_actions") return AnnotationKind::propose_potential_actions;
    if (s == "induce_template") return AnnotationKind::induce_template;
    if (s == "describe_context") return AnnotationKind::describe_context;
    if (s == "extract_knowledge") return AnnotationKind::extract_knowledge;
    throw std::invalid_argument("unknown annotation kind '" + s + "'");
}

std::string parameter_name_for_role(const std::string& role) {
    if (role == "page") return "target_url";
    return sanitize_id(role.empty() ? "element" : role) + "_text";
}

// ---- heuristic rules -------------------------------------------------------

namespace {

std::string pick(const std::string& a, const std::string& b, const std::string& c) {
    if (!a.empty()) return a;
    if (!b.empty()) return b;
    return c;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (!out.empty()) out += " ";
        out += tokens[i];
    }
    return out;
}

}  // namespace

StepSummary heuristic_summarize(const StepWindow& w) {
    const RawEvent& e = w.event;
    std::string target = pick(e.element_text, e.selector, "element");
    std::string name;
    switch (e.action_type) {
        case ActionType::click:
            name = "Click " + target;
            break;
        case ActionType::type:
            name = e.value.empty() ? "Type into " + target
                                   : "Type " + e.value + " into " + target;
            break;
        case ActionType::scroll:
            name = e.value.empty() ? "Scroll page" : "Scroll " + e.value;
            break;
        case ActionType::navigate:
            name = "Navigate to " + e.url;
            break;
        case ActionType::select:
            name = e.value.empty() ? "Select " + target
                                   : "Select " + e.value + " in " + target;
            break;
        case ActionType::key:
            name = "Press " + pick(e.value, e.element_text, "key");
            break;
        case ActionType::utterance:
            name = "Note " + e.utterance;
            break;
    }

    std::string outcome;
    if (w.next_url && *w.next_url != e.url) {
        outcome = "navigated to " + *w.next_url;
    } else if (e.action_type == ActionType::navigate) {
        outcome = "navigated to " + e.url;
    } else {
        outcome = "state updated on " + e.url;
    }

    std::string description = name + " at " + e.url;
    if (!w.utterances.empty()) {
        description += " (note: ";
        for (std::size_t i = 0; i < w.utterances.size(); ++i) {
            if (i) description += "; ";
            description += w.utterances[i];
        }
        description += ")";
    }
    return {name, description, outcome};
}

std::vector<PotentialAction> heuristic_propose_potential(const PotentialRequest& req) {
    std::set<std::pair<std::string, std::string>> taken(req.taken.begin(), req.taken.end());
    std::vector<PotentialAction> out;
    for (const auto& el : req.snapshot.elements) {
        if (!el.interactable) continue;
        if (taken.count({el.element_id, el.text})) continue;
        PotentialAction p;
        p.selector = el.element_id;
        p.role = el.role;
        p.text = el.text;
        std::string target = pick(el.text, el.element_id, "element");
        if (el.role == "textbox" || el.role == "searchbox") {
            p.name = "Type into " + target;
        } else {
            p.name = "Click " + target;
        }
        p.description = "Unexercised " + (el.role.empty() ? "element" : el.role) + " '" +
                        target + "' on " + req.snapshot.url;
        p.expected_outcome = "may update state on " + req.snapshot.url;
        out.push_back(std::move(p));
    }
    return out;
}

TemplateResult heuristic_induce_template(const TemplateRequest& req) {
    TemplateResult r;
    r.parameter_name = parameter_name_for_role(req.element_role);
    if (req.names.empty()) return r;

    std::set<std::string> distinct(req.names.begin(), req.names.end());
    if (distinct.size() < 2) {
        r.action_template = req.names.front();
        r.parameterized = false;
        r.bindings.assign(req.names.size(), "");
        return r;
    }

    std::vector<std::vector<std::string>> tokens;
    for (const auto& n : distinct) tokens.push_back(tokenize(n));

    // Longest common token prefix across the distinct names.
    std::size_t prefix = tokens.front().size();
    for (const auto& t : tokens) prefix = std::min(prefix, t.size());
    for (std::size_t p = 0; p < prefix; ++p) {
        for (const auto& t : tokens) {
            if (t[p] != tokens.front()[p]) {
                prefix = p;
                break;
            }
        }
        if (prefix == p) break;
    }
    // Longest common token suffix of what remains after the prefix.
    std::size_t suffix = tokens.front().size() - prefix;
    for (const auto& t : tokens) suffix = std::min(suffix, t.size() - prefix);
    for (std::size_t s = 0; s < suffix; ++s) {
        for (const auto& t : tokens) {
            if (t[t.size() - 1 - s] != tokens.front()[tokens.front().size() - 1 - s]) {
                suffix = s;
                break;
            }
        }
        if (suffix == s) break;
    }

    const auto& ref = tokens.front();
    std::string head = join_tokens(ref, 0, prefix);
    std::string tail = join_tokens(ref, ref.size() - suffix, ref.size());
    r.action_template = head;
    if (!r.action_template.empty()) r.action_template += " ";
    r.action_template += "{" + r.parameter_name + "}";
    if (!tail.empty()) r.action_template += " " + tail;
    r.parameterized = true;

    for (const auto& n : req.names) {
        auto t = tokenize(n);
        r.bindings.push_back(join_tokens(t, prefix, t.size() - suffix));
    }
    return r;
}

ContextDescription heuristic_describe_context(const ContextRequest& req) {
    ContextDescription d;
    std::string tail = (req.pattern == "/") ? "main" : sanitize_id(req.pattern);
    d.name = sanitize_id(req.environment) + "_" + tail;
    d.description = req.pattern;
    return d;
}

KnowledgeResult heuristic_extract_knowledge(const KnowledgeRequest& req) {
    KnowledgeResult out;  // definitions stay empty: naming requires semantics
    for (const auto& ctx : req.contexts) {
        std::map<std::vector<std::string>, int> counts;
        for (const auto& seg : ctx.segments) {
            for (std::size_t len = 2; len <= seg.size(); ++len) {
                for (std::size_t start = 0; start + len <= seg.size(); ++start) {
                    counts[std::vector<std::string>(seg.begin() + start,
                                                    seg.begin() + start + len)]++;
                }
            }
        }
        std::vector<std::pair<std::vector<std::string>, int>> qualifying;
        for (const auto& [seq, cnt] : counts)
            if (cnt >= 2) qualifying.emplace_back(seq, cnt);

        auto contains = [](const std::vector<std::string>& big,
                           const std::vector<std::string>& small) {
            if (small.size() >= big.size()) return false;
            for (std::size_t i = 0; i + small.size() <= big.size(); ++i)
                if (std::equal(small.begin(), small.end(), big.begin() + i)) return true;
            return false;
        };

        const std::vector<std::string>* best = nullptr;
        int best_count = 0;
        for (const auto& [seq, cnt] : qualifying) {
            bool maximal = true;
            for (const auto& [other, ocnt] : qualifying)
                if (contains(other, seq)) {
                    maximal = false;
                    break;
                }
            if (!maximal) continue;
            if (!best || cnt > best_count ||
                (cnt == best_count && (seq.size() > best->size() ||
                                       (seq.size() == best->size() && seq < *best)))) {
                best = &seq;
                best_count = cnt;
            }
        }
        if (!best) continue;

        Procedure p;
        p.id = "procedure.auto_" + sanitize_id(ctx.context_name);
        p.goal = "Repeated sequence on " + ctx.pattern + ": " + best->front() + " ... " +
                 best->back();
        p.context_id = ctx.context_id;
        p.action_sequence = *best;
        out.procedures.push_back(std::move(p));
    }
    return out;
}

AnnotationResponse HeuristicAnnotator::annotate(const AnnotationRequest& req) {
    AnnotationResponse resp;
    resp.kind = req.kind;
    switch (req.kind) {
        case AnnotationKind::summarize_step:
            resp.result = heuristic_summarize(std::get<StepWindow>(req.payload));
            break;
        case AnnotationKind::propose_potential_actions:
            resp.result = heuristic_propose_potential(std::get<PotentialRequest>(req.payload));
            break;
        case AnnotationKind::induce_template:
            resp.result = heuristic_induce_template(std::get<TemplateRequest>(req.payload));
            break;
        case AnnotationKind::describe_context:
            resp.result = heuristic_describe_context(std::get<ContextRequest>(req.payload));
            break;
        case AnnotationKind::extract_knowledge:
            resp.result = heuristic_extract_knowledge(std::get<KnowledgeRequest>(req.payload));
            break;
    }
    return resp;
}

// ---- wire format -----------------------------------------------------------

namespace {

json event_to_wire(const RawEvent& e) {
    json j;
    j["index"] = e.index;
    j["timestamp"] = e.timestamp;
    j["action_type"] = to_string(e.action_type);
    j["url"] = e.url;
    j["selector"] = e.selector;
    j["element_text"] = e.element_text;
    j["element_role"] = e.element_role;
    j["value"] = e.value;
    j["utterance"] = e.utterance;
    j["snapshot_ref"] = e.snapshot_ref;
    return j;
}

RawEvent event_from_wire(const json& j) {
    RawEvent e;
    e.index = j.at("index").get<std::int64_t>();
    e.timestamp = j.at("timestamp").get<std::int64_t>();
    e.action_type = action_type_from_string(j.at("action_type").get<std::string>());
    e.url = j.at("url").get<std::string>();
    e.selector = j.at("selector").get<std::string>();
    e.element_text = j.at("element_text").get<std::string>();
    e.element_role = j.at("element_role").get<std::string>();
    e.value = j.at("value").get<std::string>();
    e.utterance = j.at("utterance").get<std::string>();
    e.snapshot_ref = j.at("snapshot_ref").get<std::string>();
    return e;
}

json snapshot_to_wire(const DomSnapshot& s) {
    json j;
    j["snapshot_id"] = s.snapshot_id;
    j["url"] = s.url;
    j["capture_index"] = s.capture_index;
    json els = json::array();
    for (const auto& el : s.elements) {
        json ej;
        ej["element_id"] = el.element_id;
        ej["role"] = el.role;
        ej["text"] = el.text;
        ej["interactable"] = el.interactable;
        ej["children"] = el.children;
        els.push_back(std::move(ej));
    }
    j["elements"] = std::move(els);
    return j;
}

DomSnapshot snapshot_from_wire(const json& j) {
    DomSnapshot s;
    s.snapshot_id = j.at("snapshot_id").get<std::string>();
    s.url = j.at("url").get<std::string>();
    s.capture_index = j.at("capture_index").get<std::int64_t>();
    for (const auto& ej : j.at("elements")) {
        InterfaceElement el;
        el.element_id = ej.at("element_id").get<std::string>();
        el.role = ej.at("role").get<std::string>();
        el.text = ej.at("text").get<std::string>();
        el.interactable = ej.at("interactable").get<bool>();
        for (const auto& c : ej.at("children")) el.children.push_back(c.get<std::string>());
        s.elements.push_back(std::move(el));
    }
    return s;
}

json payload_to_wire(const AnnotationRequest& req) {
    json j;
    switch (req.kind) {
        case AnnotationKind::summarize_step: {
            const auto& w = std::get<StepWindow>(req.payload);
            j["event"] = event_to_wire(w.event);
            if (w.next_url) j["next_url"] = *w.next_url;
            j["utterances"] = w.utterances;
            j["snapshot_excerpt"] = w.snapshot_excerpt;
            break;
        }
        case AnnotationKind::propose_potential_actions: {
            const auto& p = std::get<PotentialRequest>(req.payload);
            j["snapshot"] = snapshot_to_wire(p.snapshot);
            json taken = json::array();
            for (const auto& [sel, text] : p.taken) {
                json t;
                t["selector"] = sel;
                t["text"] = text;
                taken.push_back(std::move(t));
            }
            j["taken"] = std::move(taken);
            break;
        }
        case AnnotationKind::induce_template: {
            const auto& t = std::get<TemplateRequest>(req.payload);
            j["verb"] = t.verb;
            j["element_role"] = t.element_role;
            j["names"] = t.names;
            break;
        }
        case AnnotationKind::describe_context: {
            const auto& c = std::get<ContextRequest>(req.payload);
            j["environment"] = c.environment;
            j["pattern"] = c.pattern;
            j["url"] = c.url;
            j["content_excerpt"] = c.content_excerpt;
            break;
        }
        case AnnotationKind::extract_knowledge: {
            const auto& k = std::get<KnowledgeRequest>(req.payload);
            json ctxs = json::array();
            for (const auto& c : k.contexts) {
                json cj;
                cj["context_id"] = c.context_id;
                cj["context_name"] = c.context_name;
                cj["pattern"] = c.pattern;
                cj["segments"] = c.segments;
                ctxs.push_back(std::move(cj));
            }
            j["contexts"] = std::move(ctxs);
            j["content_excerpt"] = k.content_excerpt;
            break;
        }
    }
    return j;
}

json result_to_wire(const AnnotationResponse& resp) {
    json j;
    switch (resp.kind) {
        case AnnotationKind::summarize_step: {
            const auto& s = std::get<StepSummary>(resp.result);
            j["name"] = s.name;
            j["description"] = s.description;
            j["outcome"] = s.outcome;
            break;
        }
        case AnnotationKind::propose_potential_actions: {
            j = json::array();
            for (const auto& p : std::get<std::vector<PotentialAction>>(resp.result)) {
                json pj;
                pj["name"] = p.name;
                pj["description"] = p.description;
                pj["expected_outcome"] = p.expected_outcome;
                pj["selector"] = p.selector;
                pj["role"] = p.role;
                pj["text"] = p.text;
                j.push_back(std::move(pj));
            }
            break;
        }
        case AnnotationKind::induce_template: {
            const auto& t = std::get<TemplateResult>(resp.result);
            j["action_template"] = t.action_template;
            j["parameter_name"] = t.parameter_name;
            j["parameterized"] = t.parameterized;
            j["bindings"] = t.bindings;
            break;
        }
        case AnnotationKind::describe_context: {
            const auto& c = std::get<ContextDescription>(resp.result);
            j["name"] = c.name;
            j["description"] = c.description;
            break;
        }
        case AnnotationKind::extract_knowledge: {
            const auto& k = std::get<KnowledgeResult>(resp.result);
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
            break;
        }
    }
    return j;
}

template <typename T>
std::vector<T> string_list(const json& j) {
    std::vector<T> out;
    for (const auto& v : j) out.push_back(v.template get<T>());
    return out;
}

}  // namespace

std::string request_to_json(const AnnotationRequest& req) {
    json j;
    j["kind"] = to_string(req.kind);
    j["payload"] = payload_to_wire(req);
    return j.dump();
}

AnnotationRequest request_from_json(const std::string& body) {
    json j = json::parse(body);
    AnnotationRequest req;
    req.kind = annotation_kind_from_string(j.at("kind").get<std::string>());
    const json& p = j.at("payload");
    switch (req.kind) {
        case AnnotationKind::summarize_step: {
            StepWindow w;
            w.event = event_from_wire(p.at("event"));
            if (p.contains("next_url") && !p["next_url"].is_null())
                w.next_url = p["next_url"].get<std::string>();
            w.utterances = string_list<std::string>(p.at("utterances"));
            w.snapshot_excerpt = p.at("snapshot_excerpt").get<std::string>();
            req.payload = std::move(w);
            break;
        }
        case AnnotationKind::propose_potential_actions: {
            PotentialRequest r;
            r.snapshot = snapshot_from_wire(p.at("snapshot"));
            for (const auto& t : p.at("taken"))
                r.taken.emplace_back(t.at("selector").get<std::string>(),
                                     t.at("text").get<std::string>());
            req.payload = std::move(r);
            break;
        }
        case AnnotationKind::induce_template: {
            TemplateRequest t;
            t.verb = p.at("verb").get<std::string>();
            t.element_role = p.at("element_role").get<std::string>();
            t.names = string_list<std::string>(p.at("names"));
            req.payload = std::move(t);
            break;
        }
        case AnnotationKind::describe_context: {
            ContextRequest c;
            c.environment = p.at("environment").get<std::string>();
            c.pattern = p.at("pattern").get<std::string>();
            c.url = p.at("url").get<std::string>();
            c.content_excerpt = p.at("content_excerpt").get<std::string>();
            req.payload = std::move(c);
            break;
        }
        case AnnotationKind::extract_knowledge: {
            KnowledgeRequest k;
            for (const auto& cj : p.at("contexts")) {
                KnowledgeRequest::ContextSegments c;
                c.context_id = cj.at("context_id").get<std::string>();
                c.context_name = cj.at("context_name").get<std::string>();
                c.pattern = cj.at("pattern").get<std::string>();
                for (const auto& s : cj.at("segments"))
                    c.segments.push_back(string_list<std::string>(s));
                k.contexts.push_back(std::move(c));
            }
            k.content_excerpt = p.at("content_excerpt").get<std::string>();
            req.payload = std::move(k);
            break;
        }
    }
    return req;
}

std::string response_to_json(const AnnotationResponse& resp) {
    json j;
    j["kind"] = to_string(resp.kind);
    j["result"] = result_to_wire(resp);
    return j.dump();
}

AnnotationResponse response_from_json(const std::string& body) {
    json j = json::parse(body);
    AnnotationResponse resp;
    resp.kind = annotation_kind_from_string(j.at("kind").get<std::string>());
    const json& r = j.at("result");
    switch (resp.kind) {
        case AnnotationKind::summarize_step: {
            StepSummary s;
            s.name = r.at("name").get<std::string>();
            s.description = r.at("description").get<std::string>();
            s.outcome = r.at("outcome").get<std::string>();
            resp.result = std::move(s);
            break;
        }
        case AnnotationKind::propose_potential_actions: {
            std::vector<PotentialAction> out;
            for (const auto& pj : r) {
                PotentialAction p;
                p.name = pj.at("name").get<std::string>();
                p.description = pj.at("description").get<std::string>();
                p.expected_outcome = pj.at("expected_outcome").get<std::string>();
                p.selector = pj.at("selector").get<std::string>();
                p.role = pj.at("role").get<std::string>();
                p.text = pj.at("text").get<std::string>();
                out.push_back(std::move(p));
            }
            resp.result = std::move(out);
            break;
        }
        case AnnotationKind::induce_template: {
            TemplateResult t;
            t.action_template = r.at("action_template").get<std::string>();
            t.parameter_name = r.at("parameter_name").get<std::string>();
            t.parameterized = r.at("parameterized").get<bool>();
            t.bindings = string_list<std::string>(r.at("bindings"));
            resp.result = std::move(t);
            break;
        }
        case AnnotationKind::describe_context: {
            ContextDescription c;
            c.name = r.at("name").get<std::string>();
            c.description = r.at("description").get<std::string>();
            resp.result = std::move(c);
            break;
        }
        case AnnotationKind::extract_knowledge: {
            KnowledgeResult k;
            for (const auto& dj : r.at("definitions")) {
                Definition d;
                d.id = dj.at("id").get<std::string>();
                d.term = dj.at("term").get<std::string>();
                d.meaning = dj.at("meaning").get<std::string>();
                d.related_context_ids = string_list<std::string>(dj.at("related_context_ids"));
                d.related_action_ids = string_list<std::string>(dj.at("related_action_ids"));
                k.definitions.push_back(std::move(d));
            }
            for (const auto& pj : r.at("procedures")) {
                Procedure p;
                p.id = pj.at("id").get<std::string>();
                p.goal = pj.at("goal").get<std::string>();
                p.context_id = pj.at("context_id").get<std::string>();
                p.action_sequence = string_list<std::string>(pj.at("action_sequence"));
                k.procedures.push_back(std::move(p));
            }
            resp.result = std::move(k);
            break;
        }
    }
    return resp;
}

bool response_satisfies_invariants(const AnnotationRequest& req,
                                   const AnnotationResponse& resp) {
    if (req.kind != resp.kind) return false;
    if (req.kind == AnnotationKind::induce_template) {
        const auto& t = std::get<TemplateRequest>(req.payload);
        const auto* r = std::get_if<TemplateResult>(&resp.result);
        if (!r) return false;
        if (r->bindings.size() != t.names.size()) return false;
        if (r->parameterized) {
            if (r->action_template.find("{" + r->parameter_name + "}") == std::string::npos)
                return false;
            for (std::size_t i = 0; i < t.names.size(); ++i) {
                std::string expected = instantiate_template(r->action_template, r->bindings[i]);
                if (expected != t.names[i]) return false;
            }
        }
    }
    return true;
}

// ---- remote provider -------------------------------------------------------

struct RemoteAnnotator::Impl {
    std::string scheme_host;
    std::string path;
    std::string token;
    int max_inflight;
    int inflight = 0;
    std::mutex mu;
    std::condition_variable cv;
    HeuristicAnnotator fallback;
};

RemoteAnnotator::RemoteAnnotator(std::string endpoint, std::string bearer_token,
                                 int max_inflight)
    : impl_(std::make_unique<Impl>()) {
    auto scheme_end = endpoint.find("://");
    auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
        impl_->scheme_host = endpoint;
        impl_->path = "/";
    } else {
        impl_->scheme_host = endpoint.substr(0, path_start);
        impl_->path = endpoint.substr(path_start);
    }
    impl_->token = std::move(bearer_token);
    impl_->max_inflight = std::max(1, max_inflight);
}

RemoteAnnotator::~RemoteAnnotator() = default;

}  // namespace envmap

// httplib pulled in at the bottom: it defines a large surface we only need
// for RemoteAnnotator::annotate.
#include "httplib.h"

namespace envmap {

AnnotationResponse RemoteAnnotator::annotate(const AnnotationRequest& req) {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cv.wait(lock, [&] { return impl_->inflight < impl_->max_inflight; });
        ++impl_->inflight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            {
                std::lock_guard lock(impl->mu);
                --impl->inflight;
            }
            impl->cv.notify_one();
        }
    } release{impl_.get()};

    try {
        httplib::Client client(impl_->scheme_host);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        httplib::Headers headers;
        if (!impl_->token.empty())
            headers.emplace("Authorization", "Bearer " + impl_->token);
        auto res = client.Post(impl_->path, headers, request_to_json(req),
                               "application/json");
        if (!res || res->status != 200)
            throw ProviderUnavailable(impl_->scheme_host + impl_->path);
        AnnotationResponse resp = response_from_json(res->body);
        if (!response_satisfies_invariants(req, resp))
            return impl_->fallback.annotate(req);
        return resp;
    } catch (const ProviderUnavailable&) {
        throw;
    } catch (const std::exception&) {
        // Any malformed reply counts as an invalid response.
        return impl_->fallback.annotate(req);
    }
}

std::unique_ptr<Annotator> make_annotator(const std::string& kind) {
    if (kind == "remote") {
        const char* endpoint = std::getenv("ENVMAP_ANNOTATOR_ENDPOINT");
        if (!endpoint || !*endpoint)
            throw ProviderUnavailable("ENVMAP_ANNOTATOR_ENDPOINT is not set");
        const char* key = std::getenv("ENVMAP_ANNOTATOR_KEY");
        return std::make_unique<RemoteAnnotator>(endpoint, key ? key : "");
    }
    if (kind.empty() || kind == "heuristic") return std::make_unique<HeuristicAnnotator>();
    throw std::invalid_argument("unknown annotator kind '" + kind + "'");
}

std::unique_ptr<Annotator> make_annotator_from_env() {
    const char* kind = std::getenv("ENVMAP_ANNOTATOR");
    return make_annotator(kind ? kind : "heuristic");
}

}  // namespace envmap
