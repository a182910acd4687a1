#include "envmap/tree_filter.hpp"

#include <vector>

namespace envmap {

namespace {

constexpr const char* kTextMarker = "[...]";
constexpr const char* kCapMarker = "[...](output truncated)";

struct Line {
    std::size_t depth = 0;  // leading spaces
    std::string role;
    std::string text;  // raw line text
};

std::vector<Line> split_lines(const std::string& tree) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos < tree.size()) {
        auto end = tree.find('\n', pos);
        if (end == std::string::npos) end = tree.size();
        Line l;
        l.text = tree.substr(pos, end - pos);
        while (l.depth < l.text.size() && l.text[l.depth] == ' ') ++l.depth;
        auto role_end = l.text.find(' ', l.depth);
        l.role = l.text.substr(l.depth, (role_end == std::string::npos ? l.text.size()
                                                                       : role_end) -
                                            l.depth);
        lines.push_back(std::move(l));
        pos = end + 1;
    }
    while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
    return lines;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void truncate_text(Line& l, std::size_t text_limit) {
    auto open = l.text.find('"');
    auto close = l.text.rfind('"');
    if (open == std::string::npos || close == std::string::npos || close <= open) return;
    std::size_t len = close - open - 1;
    std::string text = l.text.substr(open + 1, len);
    if (len <= text_limit || ends_with(text, kTextMarker)) return;
    l.text = l.text.substr(0, open + 1) + text.substr(0, text_limit) + kTextMarker +
             l.text.substr(close);
}

// Keeps the first sibling_limit subtrees of each same-role sibling run and
// replaces the rest with one summary line at the siblings' depth. Recurses
// into kept subtrees so deeper runs collapse too.
void collapse_range(const std::vector<Line>& lines, std::size_t b, std::size_t e,
                    std::size_t sibling_limit, std::vector<Line>& out) {
    std::size_t i = b;
    while (i < e) {
        const Line& head = lines[i];
        // Sibling run: consecutive subtrees rooted at head.depth with the
        // same role; deeper lines in between belong to the subtrees.
        std::vector<std::pair<std::size_t, std::size_t>> run;  // [start, end) per subtree
        std::size_t j = i;
        while (j < e && lines[j].depth == head.depth && lines[j].role == head.role) {
            std::size_t start = j++;
            while (j < e && lines[j].depth > head.depth) ++j;
            run.emplace_back(start, j);
        }
        std::size_t kept = std::min(run.size(), sibling_limit);
        for (std::size_t k = 0; k < kept; ++k) {
            out.push_back(lines[run[k].first]);
            collapse_range(lines, run[k].first + 1, run[k].second, sibling_limit, out);
        }
        if (run.size() > sibling_limit) {
            Line summary;
            summary.depth = head.depth;
            summary.text = std::string(head.depth, ' ') + "[...](" + head.role +
                           " elements continue)";
            summary.role = "[...](" + head.role;
            out.push_back(std::move(summary));
        }
        i = j;
    }
}

std::vector<Line> collapse_siblings(const std::vector<Line>& lines, std::size_t sibling_limit) {
    std::vector<Line> out;
    collapse_range(lines, 0, lines.size(), sibling_limit, out);
    return out;
}

}  // namespace

std::string filter_accessibility_tree(const std::string& tree, FilterLimits limits) {
    if (tree.empty()) return "";

    auto lines = split_lines(tree);
    for (auto& l : lines) truncate_text(l, limits.text_limit);
    lines = collapse_siblings(lines, limits.sibling_limit);

    std::string out;
    for (const auto& l : lines) out += l.text + "\n";
    if (out.size() <= limits.char_cap) return out;

    // Drop whole trailing lines until the cap marker fits.
    std::string marker = std::string(kCapMarker) + "\n";
    while (!lines.empty()) {
        out.resize(out.size() - lines.back().text.size() - 1);
        lines.pop_back();
        if (out.size() + marker.size() <= limits.char_cap) break;
    }
    return out + marker;
}

}  // namespace envmap
