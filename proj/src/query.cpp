#include "envmap/query.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "envmap/errors.hpp"

namespace envmap {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Occurrences of `needle` in `haystack`, both already lowercased.
std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++count;
    return count;
}

}  // namespace

ActionFilter action_filter_from_string(const std::string& s) {
    if (s == "taken") return ActionFilter::taken;
    if (s == "potential") return ActionFilter::potential;
    if (s == "all") return ActionFilter::all;
    throw std::invalid_argument("unknown action filter: " + s);
}

const Context* resolve_context(const EnvironmentMap& m, const std::string& url,
                               const std::vector<NormalizationRule>& rules) {
    std::string pattern = normalize_url(url, rules);
    for (const auto& c : m.contexts)
        if (c.pattern == pattern) return &c;
    return nullptr;
}

std::vector<ParameterizedAction> list_actions(const EnvironmentMap& m,
                                              const std::string& context_id,
                                              ActionFilter filter) {
    const Context* ctx = nullptr;
    for (const auto& c : m.contexts)
        if (c.context_id == context_id) ctx = &c;
    if (!ctx) throw UnknownContext(context_id);

    std::vector<ParameterizedAction> out;
    for (const auto& a : ctx->actions) {
        bool any_taken = std::any_of(a.instances.begin(), a.instances.end(),
                                     [](const ActionInstance& i) { return i.is_taken; });
        bool keep = filter == ActionFilter::all || (filter == ActionFilter::taken && any_taken) ||
                    (filter == ActionFilter::potential && !any_taken);
        if (keep) out.push_back(a);
    }
    std::sort(out.begin(), out.end(),
              [](const ParameterizedAction& x, const ParameterizedAction& y) {
                  return x.action_id < y.action_id;
              });
    return out;
}

std::vector<const Workflow*> find_workflows(const EnvironmentMap& m,
                                            const std::vector<std::string>& query) {
    std::vector<std::pair<std::size_t, const Workflow*>> scored;
    for (const auto& w : m.workflows) {
        std::size_t score = 0;
        for (const auto& s : w.steps) {
            std::string text = lowercase(s.name + " " + s.description);
            for (const auto& kw : query) score += count_occurrences(text, lowercase(kw));
        }
        if (query.empty() || score > 0) scored.emplace_back(score, &w);
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& x, const auto& y) {
                  if (x.first != y.first) return x.first > y.first;
                  return x.second->workflow_id < y.second->workflow_id;
              });
    std::vector<const Workflow*> out;
    out.reserve(scored.size());
    for (const auto& [score, w] : scored) out.push_back(w);
    return out;
}

std::vector<const Definition*> lookup_term(const EnvironmentMap& m, const std::string& term) {
    std::string wanted = lowercase(term);
    std::vector<const Definition*> out;
    for (const auto& d : m.tacit_knowledge.definitions)
        if (lowercase(d.term) == wanted) out.push_back(&d);
    return out;
}

}  // namespace envmap
