#pragma once

#include <cstddef>
#include <string>

namespace envmap {

struct FilterLimits {
    std::size_t sibling_limit = 10;
    std::size_t text_limit = 150;
    std::size_t char_cap = 20000;
};

// Prunes a serialized accessibility tree (indented `role "text" [id]` lines)
// down to an excerpt-sized observation:
//   - runs of more than sibling_limit consecutive same-role siblings keep the
//     first sibling_limit subtrees plus a `[...](ROLE elements continue)` line;
//   - quoted text longer than text_limit is cut to text_limit characters and
//     marked;
//   - output is capped at char_cap characters by dropping whole trailing
//     lines and appending `[...](output truncated)`.
// Idempotent; element ids of retained nodes are unchanged.
std::string filter_accessibility_tree(const std::string& tree, FilterLimits limits = {});

}  // namespace envmap
