#pragma once

#include <optional>
#include <string>
#include <vector>

#include "envmap/map.hpp"
#include "envmap/normalize.hpp"

namespace envmap {

enum class ActionFilter { taken, potential, all };
ActionFilter action_filter_from_string(const std::string& s);

// Normalizes `url` with `rules` and returns the context whose pattern equals
// the normalized form, if any. Patterns are unique, so at most one matches.
const Context* resolve_context(const EnvironmentMap& m, const std::string& url,
                               const std::vector<NormalizationRule>& rules = default_rules());

// Actions of a context filtered by instance kind: `taken` keeps actions with
// at least one taken instance, `potential` keeps actions with none. Sorted by
// action_id. Throws UnknownContext.
std::vector<ParameterizedAction> list_actions(const EnvironmentMap& m,
                                              const std::string& context_id,
                                              ActionFilter filter);

// Workflows scored by term frequency of lowercased keywords over step names
// and descriptions; descending score, ties by workflow_id. An empty query
// returns all workflows in id order; zero-score workflows are dropped for
// non-empty queries.
std::vector<const Workflow*> find_workflows(const EnvironmentMap& m,
                                            const std::vector<std::string>& query);

// Case-insensitive exact match over definition terms.
std::vector<const Definition*> lookup_term(const EnvironmentMap& m, const std::string& term);

}  // namespace envmap
