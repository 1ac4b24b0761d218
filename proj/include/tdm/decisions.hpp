#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdm/dsl.hpp"
#include "tdm/model.hpp"

namespace tdm::decisions {

struct Request {
    std::string requester_entity_id;
    std::string action_kind;
    std::string target_asset_id;
    bool operator==(const Request&) const = default;
};

// Requests for services travel as messages: exactly one sender, one or more
// receivers, a transport label, and an optional delivery policy constraining
// the transport.
struct Message {
    std::string id;
    std::string sender_id;
    std::vector<std::string> receiver_ids;
    std::string transport = "local";
    std::optional<std::string> delivery_policy_id;
    Request payload;
    bool operator==(const Message&) const = default;
};

enum class DecisionKind { Permission, Obligation, Denial };

std::string to_string(DecisionKind k);

struct PolicyDecision {
    std::string id;
    DecisionKind kind = DecisionKind::Denial;
    // Every policy with at least one matching rule, sorted. Empty only for the
    // default-deny case.
    std::vector<std::string> influenced_policy_ids;
    // First matching rule index per influenced policy, sorted by policy id.
    std::vector<std::pair<std::string, int>> matched_rules;
    std::string created_by_pdp_id;
    std::optional<std::string> enables_state;
    Request request;
    bool operator==(const PolicyDecision&) const = default;
};

struct Action {
    std::string id;
    std::string kind;
    std::string performed_by;
    std::string performed_on;
    std::string decision_id;
    long sequence = 0;
    bool operator==(const Action&) const = default;
};

// Guard flags referenced by action-rule `if` clauses, plus the state label a
// resulting Permission enables on its target resource.
struct EvalContext {
    std::map<std::string, bool> guards;
    std::optional<std::string> enable_state;
};

struct DecisionLog {
    std::vector<Message> messages;
    std::vector<PolicyDecision> decisions;
    std::vector<Action> actions;

    const PolicyDecision* find_decision(const std::string& id) const;
    const Action* find_action(const std::string& id) const;
    std::string next_decision_id() const { return "d" + std::to_string(decisions.size() + 1); }
    std::string next_message_id() const { return "m" + std::to_string(messages.size() + 1); }
};

// Checks message well-formedness and the delivery policy, then releases the
// payload. Throws MalformedMessage / DeliveryRefused.
Request deliver(const TrustDomainModel& model, const Message& message);

// Policy decision point. Scans the action rules of every non-delivery policy
// whose scope domain contains the requester or the target's owner; the first
// match in (policy id, rule index) order decides. No match means Denial with
// empty influence (default-deny). Pure function of its arguments.
PolicyDecision evaluate(const TrustDomainModel& model, const Request& request,
                        const std::string& pdp_id, const EvalContext& ctx = {});

// Notes the enforcement point hands to the audit pipeline.
struct AuditNote {
    std::string event_kind;  // action-performed | action-blocked | obligation-pending
    std::string action_id;
    std::string decision_id;
    std::string detail;
    bool critical = false;
};

struct EnforceOutcome {
    TrustDomainModel model;          // state updates applied
    std::optional<Action> action;    // absent = blocked
    std::vector<AuditNote> notes;
    bool blocked() const { return !action.has_value(); }
};

// Policy enforcement point: Permissions and Obligations yield an Action with
// a fresh sequence number, Denials are blocked; every outcome produces an
// audit note. A Permission carrying enables_state rewrites the target
// resource's state label.
EnforceOutcome enforce(const TrustDomainModel& model, const PolicyDecision& decision,
                       const std::string& pep_id, long next_sequence);

// The influence trail: creating PDP plus (policy, matched rule index) pairs.
std::pair<std::string, std::vector<std::pair<std::string, int>>> decision_provenance(
    const DecisionLog& log, const std::string& decision_id);

// True when the selector (role id, entity id, or "*") covers the actor.
// Agents are matched through the role they act on behalf of.
bool subject_matches(const TrustDomainModel& model, const std::string& selector,
                     const std::string& actor_id);

struct RequestScriptLine {
    Request request;
    EvalContext ctx;
    SourceSpan span;
};

struct RequestScriptParse {
    std::vector<RequestScriptLine> lines;
    std::vector<dsl::Diagnostic> diagnostics;
};

// Line format: `request <ENTITY> <KIND> <ASSET> [ctx k=v,...]` with boolean
// values; `#` comments and blank lines are ignored.
RequestScriptParse parse_request_script(std::string_view text);

}  // namespace tdm::decisions
