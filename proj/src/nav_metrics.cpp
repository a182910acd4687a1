#include "envmap/nav_metrics.hpp"

#include <algorithm>

#include "envmap/errors.hpp"
#include "json.hpp"

namespace envmap {

namespace {

ResourceKind classify(const std::string& declared, const std::string& mime) {
    std::string kind = declared.empty() ? mime : declared;
    std::transform(kind.begin(), kind.end(), kind.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (kind == "document" || kind.rfind("text/html", 0) == 0) return ResourceKind::document;
    if (kind == "xhr" || kind == "fetch" || kind.rfind("application/json", 0) == 0)
        return ResourceKind::xhr;
    if (kind == "script" || kind == "stylesheet" || kind == "image" || kind == "font" ||
        kind == "media" || kind.rfind("text/css", 0) == 0 ||
        kind.rfind("application/javascript", 0) == 0 || kind.rfind("image/", 0) == 0 ||
        kind.rfind("font/", 0) == 0)
        return ResourceKind::asset;
    return ResourceKind::other;
}

}  // namespace

std::string to_string(ResourceKind k) {
    switch (k) {
        case ResourceKind::document: return "document";
        case ResourceKind::xhr: return "xhr";
        case ResourceKind::asset: return "asset";
        default: return "other";
    }
}

std::vector<HarEntry> parse_har(const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedHar(e.what());
    }
    if (!doc.is_object() || !doc.contains("log") || !doc["log"].is_object())
        throw MalformedHar("missing log object");
    const auto& log = doc["log"];
    if (!log.contains("entries") || !log["entries"].is_array())
        throw MalformedHar("missing log.entries array");

    std::vector<HarEntry> out;
    for (const auto& raw : log["entries"]) {
        if (!raw.is_object() || !raw.contains("request") || !raw["request"].is_object())
            throw MalformedHar("entry without request object");
        HarEntry e;
        e.started_at = raw.value("startedDateTime", "");
        e.method = raw["request"].value("method", "GET");
        e.url = raw["request"].value("url", "");
        if (e.url.empty()) throw MalformedHar("entry request without url");
        std::string mime;
        if (raw.contains("response") && raw["response"].is_object()) {
            e.status = raw["response"].value("status", 0);
            if (raw["response"].contains("content") && raw["response"]["content"].is_object())
                mime = raw["response"]["content"].value("mimeType", "");
        }
        e.resource_kind = classify(raw.value("_resourceType", ""), mime);
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const HarEntry& a, const HarEntry& b) {
                         return a.started_at < b.started_at;
                     });
    return out;
}

NavigationMetrics compute_metrics(const std::vector<HarEntry>& entries,
                                  const std::vector<NormalizationRule>& rules) {
    NavigationMetrics m;
    m.total_requests = static_cast<std::int64_t>(entries.size());
    for (const auto& e : entries) {
        if (e.resource_kind != ResourceKind::document) continue;
        std::string visit;
        try {
            visit = normalize_url(e.url, rules);
        } catch (const UnparseableUrl&) {
            continue;
        }
        if (m.page_visits.empty() || m.page_visits.back() != visit)
            m.page_visits.push_back(std::move(visit));
    }
    std::size_t backtracks = 0;
    for (std::size_t k = 1; k < m.page_visits.size(); ++k) {
        // Backtrack: the target page was visited and then left earlier on.
        for (std::size_t j = 0; j + 1 < k; ++j) {
            if (m.page_visits[j] == m.page_visits[k]) {
                ++backtracks;
                break;
            }
        }
    }
    std::size_t transitions = m.page_visits.empty() ? 0 : m.page_visits.size() - 1;
    m.backtracking_rate =
        static_cast<double>(backtracks) / static_cast<double>(std::max<std::size_t>(1, transitions));
    return m;
}

}  // namespace envmap
