#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace envmap {

// A segment-level rewrite rule. Rules are applied per path segment in
// priority order; the first matching rule replaces the segment with its
// placeholder token.
struct NormalizationRule {
    std::string rule_id;
    std::string match_pattern;  // ECMAScript regex, anchored to the whole segment
    std::string replacement;    // one of {id}, {uuid}, {hash}, {slug}
    int priority = 0;
};

// Built-in rule set: all-digit segments -> {id}, UUID-shaped -> {uuid},
// 7+ char hex -> {hash}. Everything else is kept literally.
const std::vector<NormalizationRule>& default_rules();

// Loads rules from a tab-separated file: `priority <TAB> pattern <TAB> replacement`.
// Blank lines and lines starting with '#' are skipped.
std::vector<NormalizationRule> load_rules(const std::filesystem::path& file);

// Reduces a URL to its context pattern: scheme/host stripped, each path
// segment rewritten by the first matching rule, query and fragment dropped.
// Throws UnparseableUrl for inputs with no path structure.
std::string normalize_url(const std::string& url, const std::vector<NormalizationRule>& rules);

}  // namespace envmap
