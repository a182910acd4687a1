#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "envmap/map.hpp"
#include "envmap/trace.hpp"

namespace envmap {

enum class AnnotationKind {
    summarize_step,
    propose_potential_actions,
    induce_template,
    describe_context,
    extract_knowledge,
};

std::string to_string(AnnotationKind k);
AnnotationKind annotation_kind_from_string(const std::string& s);

// ---- request payloads ------------------------------------------------------

struct StepWindow {
    RawEvent event;
    std::optional<std::string> next_url;   // url of the following action event
    std::vector<std::string> utterances;   // narration preceding the event
    std::string snapshot_excerpt;          // filtered tree text, may be empty
};

struct PotentialRequest {
    DomSnapshot snapshot;
    // (selector, text) pairs of elements exercised anywhere in the trajectory.
    std::vector<std::pair<std::string, std::string>> taken;
};

struct TemplateRequest {
    std::string verb;
    std::string element_role;
    std::vector<std::string> names;  // raw action names, one per instance
};

struct ContextRequest {
    std::string environment;
    std::string pattern;
    std::string url;             // a representative source url
    std::string content_excerpt;
};

struct KnowledgeRequest {
    struct ContextSegments {
        std::string context_id;
        std::string context_name;
        std::string pattern;
        // Maximal runs of consecutive step names inside this context, one
        // entry per run, across all workflows.
        std::vector<std::vector<std::string>> segments;
    };
    std::vector<ContextSegments> contexts;
    std::string content_excerpt;
};

// ---- response results ------------------------------------------------------

struct StepSummary {
    std::string name;
    std::string description;
    std::string outcome;
};

struct PotentialAction {
    std::string name;
    std::string description;
    std::string expected_outcome;
    std::string selector;  // element_id of the proposed element
    std::string role;
    std::string text;
};

struct TemplateResult {
    std::string action_template;   // at most one {placeholder}
    std::string parameter_name;
    bool parameterized = false;
    std::vector<std::string> bindings;  // one per request name, same order
};

struct ContextDescription {
    std::string name;
    std::string description;
};

struct KnowledgeResult {
    std::vector<Definition> definitions;
    std::vector<Procedure> procedures;
};

struct AnnotationRequest {
    AnnotationKind kind = AnnotationKind::summarize_step;
    std::variant<StepWindow, PotentialRequest, TemplateRequest, ContextRequest,
                 KnowledgeRequest>
        payload;
};

struct AnnotationResponse {
    AnnotationKind kind = AnnotationKind::summarize_step;
    std::variant<StepSummary, std::vector<PotentialAction>, TemplateResult,
                 ContextDescription, KnowledgeResult>
        result;
};

// ---- providers -------------------------------------------------------------

class Annotator {
public:
    virtual ~Annotator() = default;
    virtual AnnotationResponse annotate(const AnnotationRequest& req) = 0;
    virtual std::string kind_name() const = 0;
};

// Rule-based provider; a pure function of the request, bit-identical across
// runs and processes.
class HeuristicAnnotator final : public Annotator {
public:
    AnnotationResponse annotate(const AnnotationRequest& req) override;
    std::string kind_name() const override { return "heuristic"; }
};

// HTTP provider: POSTs the request record as JSON to the configured endpoint
// and validates the reply; any reply violating the response invariants is
// discarded and the heuristic answer substituted.
class RemoteAnnotator final : public Annotator {
public:
    RemoteAnnotator(std::string endpoint, std::string bearer_token,
                    int max_inflight = 4);
    ~RemoteAnnotator() override;
    AnnotationResponse annotate(const AnnotationRequest& req) override;
    std::string kind_name() const override { return "remote"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Picks the provider from ENVMAP_ANNOTATOR / ENVMAP_ANNOTATOR_ENDPOINT /
// ENVMAP_ANNOTATOR_KEY; defaults to the heuristic.
std::unique_ptr<Annotator> make_annotator_from_env();
std::unique_ptr<Annotator> make_annotator(const std::string& kind);

// The individual heuristic rules, exposed for direct use and testing.
StepSummary heuristic_summarize(const StepWindow& window);
std::vector<PotentialAction> heuristic_propose_potential(const PotentialRequest& req);
TemplateResult heuristic_induce_template(const TemplateRequest& req);
ContextDescription heuristic_describe_context(const ContextRequest& req);
KnowledgeResult heuristic_extract_knowledge(const KnowledgeRequest& req);

// Parameter slot name for an element role ("link" -> "link_text",
// "page" -> "target_url").
std::string parameter_name_for_role(const std::string& role);

// JSON wire format (field names match the type definitions).
std::string request_to_json(const AnnotationRequest& req);
AnnotationRequest request_from_json(const std::string& body);
std::string response_to_json(const AnnotationResponse& resp);
AnnotationResponse response_from_json(const std::string& body);

// Checks the response invariants against its request (kind agreement,
// one binding per template instance, bindings drawn from the value set).
bool response_satisfies_invariants(const AnnotationRequest& req,
                                   const AnnotationResponse& resp);

}  // namespace envmap
