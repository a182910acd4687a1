#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envmap/normalize.hpp"

namespace envmap {

enum class ResourceKind { document, xhr, asset, other };
std::string to_string(ResourceKind k);

struct HarEntry {
    std::string started_at;
    std::string method;
    std::string url;
    ResourceKind resource_kind = ResourceKind::other;
    int status = 0;
};

struct NavigationMetrics {
    std::vector<std::string> page_visits;  // normalized, consecutive repeats collapsed
    double backtracking_rate = 0.0;
    std::int64_t total_requests = 0;
};

// Extracts log.entries from standard HAR 1.2 text, classifying resource_kind
// from the declared _resourceType (falling back to the response MIME type) and
// ordering by start time. Throws MalformedHar.
std::vector<HarEntry> parse_har(const std::string& source);

// page_visits = normalized document URLs with consecutive duplicates
// collapsed; a transition to visit k is a backtrack when that URL appeared
// among visits 0..k-2 (a strict return, not a refresh);
// backtracking_rate = backtracks / max(1, |page_visits| - 1);
// total_requests = |entries|. URLs that fail normalization are skipped.
NavigationMetrics compute_metrics(const std::vector<HarEntry>& entries,
                                  const std::vector<NormalizationRule>& rules = default_rules());

}  // namespace envmap
