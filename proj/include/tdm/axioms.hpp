#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdm/audit.hpp"
#include "tdm/decisions.hpp"
#include "tdm/model.hpp"

namespace tdm::axioms {

struct Axiom {
    std::string id;           // AX1..AX12
    std::string description;  // what must hold
    std::string citation;     // the taxonomy statement the check enforces
};

struct AxiomViolation {
    std::string axiom_id;
    std::vector<std::string> offending_element_ids;
    std::string explanation;
    bool operator==(const AxiomViolation&) const = default;
};

struct ValidationReport {
    std::string model_name;
    std::vector<std::string> checked_axioms;
    std::vector<std::string> unchecked_axioms;  // logs absent
    std::vector<AxiomViolation> violations;

    bool consistent() const { return violations.empty(); }
};

// The fixed catalog, AX1..AX12.
const std::vector<Axiom>& axiom_catalog();
const Axiom& axiom(const std::string& id);  // throws UnknownAxiom

// The taxonomy's relations, extracted as plain id-pair tables. The axiom
// checks run against this view, so tests can assert behavior on states the
// typed model cannot represent (two owners, two entity types, ...).
struct RelationSet {
    std::string model_name;

    std::set<std::string> domain_ids, role_ids, entity_ids, asset_ids, agent_ids, control_ids,
        policy_ids, store_ids;

    using Pairs = std::set<std::pair<std::string, std::string>>;
    Pairs type_of;              // entity -> entity type name
    Pairs asset_type_of;        // asset -> asset type name
    Pairs owns_asset;           // role -> asset
    Pairs owns_agent;           // role -> agent
    Pairs member_of;            // entity -> domain
    Pairs has_role;             // entity -> role
    Pairs publishes;            // management agent -> policy
    Pairs published_to;         // policy -> store
    Pairs published_policy_to;  // agent -> store (stored copy; derived on extraction)
    Pairs establishes;          // role -> policy
    Pairs scope_of;             // policy -> domain
    Pairs provisioned_by;       // resource asset -> agent

    std::map<std::string, std::string> agent_kind;    // agent -> kind name
    std::map<std::string, ControlKind> control_kind;  // control -> kind

    bool decisions_log_present = false;
    bool audit_log_present = false;

    struct DecisionRecord {
        std::string id;
        std::string created_by_pdp_id;
        std::vector<std::string> influenced;
        std::string requester;
        std::string target;
    };
    struct MessageRecord {
        std::string id;
        std::string sender;
        std::vector<std::string> receivers;
    };
    struct ActionRecord {
        std::string id;
        std::string decision_id;
    };
    struct EventRef {
        std::string event_id;
        std::string action_id;
        std::string decision_id;
    };
    std::vector<DecisionRecord> decisions;
    std::vector<MessageRecord> messages;
    std::vector<ActionRecord> actions;
    std::vector<EventRef> audit_refs;
};

RelationSet extract_relations(const TrustDomainModel& model,
                              const decisions::DecisionLog* decisions_log = nullptr,
                              const audit::CentralAuditStore* audit_log = nullptr);

// Checks every axiom the relation set has data for. AX3 and AX11 need the
// decisions log, AX12 both logs; those are listed as unchecked otherwise.
// Violations are reported once with the minimal witnessing element set and
// deterministic (axiom, element ids) ordering.
ValidationReport validate_relations(const RelationSet& rs);

ValidationReport validate(const TrustDomainModel& model,
                          const decisions::DecisionLog* decisions_log = nullptr,
                          const audit::CentralAuditStore* audit_log = nullptr);

// The axiom_id subset of validate()'s report. Throws UnknownAxiom.
std::vector<AxiomViolation> check_axiom(const TrustDomainModel& model, const std::string& axiom_id,
                                        const decisions::DecisionLog* decisions_log = nullptr,
                                        const audit::CentralAuditStore* audit_log = nullptr);

}  // namespace tdm::axioms
