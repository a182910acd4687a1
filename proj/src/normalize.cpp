#include "envmap/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "envmap/errors.hpp"

namespace envmap {

namespace {

const std::vector<std::string> kPlaceholderVocabulary = {"{id}", "{uuid}", "{hash}", "{slug}"};

bool is_known_placeholder(const std::string& token) {
    return std::find(kPlaceholderVocabulary.begin(), kPlaceholderVocabulary.end(), token) !=
           kPlaceholderVocabulary.end();
}

std::vector<const NormalizationRule*> sorted_by_priority(
    const std::vector<NormalizationRule>& rules) {
    std::vector<const NormalizationRule*> out;
    out.reserve(rules.size());
    for (const auto& r : rules) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(),
                     [](const NormalizationRule* a, const NormalizationRule* b) {
                         return a->priority < b->priority;
                     });
    return out;
}

// Compiling a std::regex is far more expensive than matching with it, and
// normalization runs on every URL the pipeline touches; memoize per pattern.
const std::regex& compiled(const std::string& pattern) {
    thread_local std::map<std::string, std::regex> cache;
    auto it = cache.find(pattern);
    if (it == cache.end()) it = cache.emplace(pattern, std::regex(pattern)).first;
    return it->second;
}

}  // namespace

const std::vector<NormalizationRule>& default_rules() {
    static const std::vector<NormalizationRule> rules = {
        {"digits", "[0-9]+", "{id}", 1},
        {"uuid",
         "[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}",
         "{uuid}", 2},
        {"hex", "[0-9a-fA-F]{7,}", "{hash}", 3},
    };
    return rules;
}

std::vector<NormalizationRule> load_rules(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open rules file: " + file.string());
    std::vector<NormalizationRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string priority, pattern, replacement;
        if (!std::getline(fields, priority, '\t') || !std::getline(fields, pattern, '\t') ||
            !std::getline(fields, replacement, '\t')) {
            throw MalformedRecord(line_no, "expected `priority<TAB>pattern<TAB>replacement`");
        }
        if (!is_known_placeholder(replacement)) {
            throw MalformedRecord(line_no, "unknown replacement token '" + replacement + "'");
        }
        NormalizationRule rule;
        rule.rule_id = "rule_" + std::to_string(line_no);
        rule.match_pattern = pattern;
        rule.replacement = replacement;
        rule.priority = std::stoi(priority);
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::string normalize_url(const std::string& url, const std::vector<NormalizationRule>& rules) {
    std::string path = url;

    // Strip scheme and host; keep only the path.
    auto scheme_pos = path.find("://");
    if (scheme_pos != std::string::npos) {
        auto path_start = path.find('/', scheme_pos + 3);
        path = (path_start == std::string::npos) ? "/" : path.substr(path_start);
    }
    if (path.empty() || path[0] != '/') throw UnparseableUrl(url);

    // Drop query string and fragment.
    auto cut = path.find_first_of("?#");
    if (cut != std::string::npos) path = path.substr(0, cut);
    if (path.empty()) path = "/";

    auto ordered = sorted_by_priority(rules);

    std::string out;
    std::size_t pos = 1;
    while (pos <= path.size()) {
        auto next = path.find('/', pos);
        std::string segment =
            path.substr(pos, (next == std::string::npos ? path.size() : next) - pos);
        if (!segment.empty()) {
            for (const auto* rule : ordered) {
                if (std::regex_match(segment, compiled(rule->match_pattern))) {
                    segment = rule->replacement;
                    break;
                }
            }
            out += "/" + segment;
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out.empty() ? "/" : out;
}

}  // namespace envmap
