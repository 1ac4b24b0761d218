#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tdm {

// ---------------------------------------------------------------------------
// Element kinds and enumerations
// ---------------------------------------------------------------------------

enum class EntityType { Person, Organization, System, Process, Resource, Agent };
enum class AssetType { Data, Resource, Service };
enum class AgentKind { Generic, DomainManagementAgent };
enum class ControlKind {
    PolicyEnforcementPoint,
    PolicyDecisionPoint,
    DomainAuditAgent,
    DomainManagementAgent,
};
enum class FlowDirection { Uni, Bi };
enum class RuleEffect { Permit, Deny, Oblige };

enum class ElementKind { Domain, Entity, Role, Asset, Agent, Control, Policy, Store, AuditStore };

std::string to_string(EntityType t);
std::string to_string(AssetType t);
std::string to_string(AgentKind k);
std::string to_string(ControlKind k);
std::string to_string(RuleEffect e);
std::string to_string(ElementKind k);
std::optional<EntityType> parse_entity_type(const std::string& s);
std::optional<AssetType> parse_asset_type(const std::string& s);
std::optional<ControlKind> parse_control_kind(const std::string& s);

// Control kinds use short DSL spellings (pep/pdp/audit/management).
std::string control_kind_keyword(ControlKind k);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
    UnknownPolicy,
    UnknownDomain,
    UnknownRole,
    UnknownAgent,
    UnknownAsset,
    UnknownEntity,
    UnknownControl,
    UnknownPdp,
    UnknownPep,
    UnknownNode,
    UnknownDecision,
    UnknownAxiom,
    NotManagementAgent,
    NotAResource,
    AlreadyProvisioned,
    NotProvisioned,
    UnprovisionedResource,
    DeliveryRefused,
    MalformedMessage,
    StaleDecision,
    NoCentralStore,
    StoreFormat,
};

const char* errc_name(Errc c);

// Thrown by operations whose preconditions do not hold. Structural validation
// (build_model, parse) reports error lists instead of throwing.
class ModelError : public std::runtime_error {
public:
    ModelError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

inline constexpr const char* kWildcard = "*";

struct FlowRule {
    std::string source_asset_id;
    std::string dest_asset_id;
    FlowDirection direction = FlowDirection::Uni;
    bool operator==(const FlowRule&) const = default;
};

// subject and target accept the "*" wildcard; guard is a named boolean flag
// looked up in the evaluation context (empty = unguarded).
struct ActionRule {
    RuleEffect effect = RuleEffect::Deny;
    std::string subject;
    std::string action_kind;
    std::string target;
    std::string guard;
    bool operator==(const ActionRule&) const = default;
};

struct Rule {
    std::variant<FlowRule, ActionRule> body;
    bool operator==(const Rule&) const = default;

    bool is_flow() const { return std::holds_alternative<FlowRule>(body); }
    const FlowRule& flow() const { return std::get<FlowRule>(body); }
    const ActionRule& action() const { return std::get<ActionRule>(body); }
};

// ---------------------------------------------------------------------------
// Model elements
// ---------------------------------------------------------------------------

struct Domain {
    std::string id;
    // Inverse view of DomainEntity::memberships, filled in by build_model.
    std::set<std::string> member_ids;
    bool operator==(const Domain&) const = default;
};

struct DomainEntity {
    std::string id;
    EntityType entity_type = EntityType::System;
    std::set<std::string> memberships;
    std::set<std::string> role_ids;
    bool operator==(const DomainEntity&) const = default;
};

struct Role {
    std::string id;
    // Inverse ownership/establishment views, filled in by build_model.
    std::set<std::string> owned_asset_ids;
    std::set<std::string> owned_agent_ids;
    std::set<std::string> established_policy_ids;
    bool operator==(const Role&) const = default;
};

struct Agent {
    std::string id;
    std::string owner_role_id;
    std::string acts_on_behalf_of;
    AgentKind kind = AgentKind::Generic;
    bool operator==(const Agent&) const = default;
};

struct Asset {
    std::string id;
    AssetType asset_type = AssetType::Data;
    std::string owner_role_id;
    std::optional<std::string> state;           // resources only
    std::optional<std::string> provisioned_by;  // management agent id
    std::optional<std::string> provided_by;     // services: backing resource
    bool operator==(const Asset&) const = default;
};

struct Control {
    std::string id;
    ControlKind kind = ControlKind::PolicyEnforcementPoint;
    std::string domain_id;
    std::optional<std::string> central_store_id;  // required for audit agents
    bool operator==(const Control&) const = default;
};

struct Policy {
    std::string id;
    std::string establisher_role_id;
    std::string scope_domain_id;
    std::vector<Rule> rules;
    std::optional<std::string> published_by;  // management agent
    std::optional<std::string> published_to;  // policy store
    std::set<std::string> equivalent_to;      // symmetric, irreflexive
    bool is_delivery_policy = false;
    bool operator==(const Policy&) const = default;
};

struct DomainPolicyStore {
    std::string id;
    std::string domain_id;
    // Inverse view of Policy::published_to, sorted by policy id.
    std::vector<std::string> policy_ids;
    bool operator==(const DomainPolicyStore&) const = default;
};

// ---------------------------------------------------------------------------
// TrustDomainModel
// ---------------------------------------------------------------------------

// Immutable value: every mutating operation returns a new model. Identifiers
// are case-sensitive dotted names, unique across the whole model.
struct TrustDomainModel {
    std::string name = "model";
    std::map<std::string, Domain> domains;
    std::map<std::string, DomainEntity> entities;
    std::map<std::string, Role> roles;
    std::map<std::string, Asset> assets;
    std::map<std::string, Agent> agents;
    std::map<std::string, Control> controls;
    std::map<std::string, Policy> policies;
    std::map<std::string, DomainPolicyStore> policy_stores;
    std::string central_audit_store_id;  // empty when not declared

    bool operator==(const TrustDomainModel&) const = default;

    const Domain* find_domain(const std::string& id) const;
    const DomainEntity* find_entity(const std::string& id) const;
    const Role* find_role(const std::string& id) const;
    const Asset* find_asset(const std::string& id) const;
    const Agent* find_agent(const std::string& id) const;
    const Control* find_control(const std::string& id) const;
    const Policy* find_policy(const std::string& id) const;
    const DomainPolicyStore* find_store(const std::string& id) const;

    std::optional<ElementKind> kind_of(const std::string& id) const;

    bool entity_has_role(const std::string& entity_id, const std::string& role_id) const;
    std::set<std::string> entities_with_role(const std::string& role_id) const;
    // True when some member entity of the domain holds the given role.
    bool domain_contains_role(const std::string& domain_id, const std::string& role_id) const;
    bool domain_contains_entity(const std::string& domain_id, const std::string& entity_id) const;
};

// ---------------------------------------------------------------------------
// Declarations (produced by the DSL parser or constructed programmatically)
// ---------------------------------------------------------------------------

struct SourceSpan {
    int line = 0;  // 1-based; 0 = no source location
    int col_begin = 0;
    int col_end = 0;
    bool operator==(const SourceSpan&) const = default;
};

struct ModelDecl {
    std::string id;
    SourceSpan span;
};
struct AuditStoreDecl {
    std::string id;
    SourceSpan span;
};
struct DomainDecl {
    std::string id;
    SourceSpan span;
};
struct RoleDecl {
    std::string id;
    SourceSpan span;
};
struct EntityDecl {
    std::string id;
    EntityType type = EntityType::System;
    std::vector<std::string> domains;
    std::vector<std::string> roles;
    SourceSpan span;
};
struct AgentDecl {
    std::string id;
    std::string owner_role;
    std::string acts_for;  // empty = defaults to owner_role
    AgentKind kind = AgentKind::Generic;
    SourceSpan span;
};
struct AssetDecl {
    std::string id;
    AssetType type = AssetType::Data;
    std::string owner_role;
    std::optional<std::string> provided_by;
    std::optional<std::string> state;
    std::optional<std::string> provisioned_by;
    SourceSpan span;
};
struct ControlDecl {
    std::string id;
    ControlKind kind = ControlKind::PolicyEnforcementPoint;
    std::string domain;
    std::optional<std::string> central_store;
    SourceSpan span;
};
struct StoreDecl {
    std::string id;
    std::string domain;
    SourceSpan span;
};
struct RuleDecl {
    Rule rule;
    SourceSpan span;
};
struct PolicyDecl {
    std::string id;
    std::string establisher_role;
    std::string scope_domain;
    std::vector<RuleDecl> rules;
    std::optional<std::string> published_by;
    std::optional<std::string> published_to;
    std::vector<std::string> equivalent_to;
    bool is_delivery_policy = false;
    SourceSpan span;
};

using Declaration = std::variant<ModelDecl, AuditStoreDecl, DomainDecl, RoleDecl, EntityDecl,
                                 AgentDecl, AssetDecl, ControlDecl, StoreDecl, PolicyDecl>;

const std::string& declaration_id(const Declaration& d);
SourceSpan declaration_span(const Declaration& d);

// ---------------------------------------------------------------------------
// build_model
// ---------------------------------------------------------------------------

enum class StructuralErrorKind { DuplicateIdentifier, DanglingReference, TypeMismatch };

struct StructuralError {
    StructuralErrorKind kind = StructuralErrorKind::DanglingReference;
    std::string message;
    // Ids involved: [0] is the declaring/referencing element where meaningful.
    std::vector<std::string> ids;
    SourceSpan span;
};

struct BuildResult {
    std::optional<TrustDomainModel> model;
    std::vector<StructuralError> errors;
    bool ok() const { return model.has_value(); }
};

// Assembles and checks a model: global id uniqueness, referential integrity,
// reference kinds, rule endpoint types. Derived inverse views (domain members,
// role ownership, store contents) are recomputed from scratch. Axiom checking
// is a separate concern (axioms module).
BuildResult build_model(const std::vector<Declaration>& declarations);

// ---------------------------------------------------------------------------
// Lifecycle operations (all throw ModelError on precondition failure)
// ---------------------------------------------------------------------------

// Copies a policy into a target domain under a new establisher. The clone gets
// identical rules and a fresh id derived from the original, and the two
// policies are linked symmetrically through the equivalence property.
std::pair<TrustDomainModel, std::string> clone_policy(const TrustDomainModel& model,
                                                      const std::string& policy_id,
                                                      const std::string& target_domain_id,
                                                      const std::string& new_establisher_role_id);

TrustDomainModel provision_resource(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                                    const std::string& resource_asset_id,
                                    const std::string& initial_state);

TrustDomainModel deprovision_resource(const TrustDomainModel& model,
                                      const std::string& mgmt_agent_id,
                                      const std::string& resource_asset_id);

// Compares the provisioned resource's state label against the expectation.
// Recording the comparison as an audit event is the caller's job (the simulate
// pipeline wires this through the audit module).
bool validate_state(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                    const std::string& resource_asset_id, const std::string& expected_state);

std::set<std::string> domain_members(const TrustDomainModel& model, const std::string& domain_id);

// All policies transitively linked to the given one via equivalence links,
// including the policy itself.
std::set<std::string> equivalence_closure(const TrustDomainModel& model,
                                          const std::string& policy_id);

// Identifier syntax: dot-separated segments, each [A-Za-z_][A-Za-z0-9_-]*.
bool is_valid_identifier(const std::string& s);

}  // namespace tdm
