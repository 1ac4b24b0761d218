#include "tdm/model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

namespace tdm {

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(EntityType t) {
    switch (t) {
        case EntityType::Person: return "Person";
        case EntityType::Organization: return "Organization";
        case EntityType::System: return "System";
        case EntityType::Process: return "Process";
        case EntityType::Resource: return "Resource";
        case EntityType::Agent: return "Agent";
    }
    return "?";
}

std::string to_string(AssetType t) {
    switch (t) {
        case AssetType::Data: return "Data";
        case AssetType::Resource: return "Resource";
        case AssetType::Service: return "Service";
    }
    return "?";
}

std::string to_string(AgentKind k) {
    return k == AgentKind::DomainManagementAgent ? "DomainManagementAgent" : "Generic";
}

std::string to_string(ControlKind k) {
    switch (k) {
        case ControlKind::PolicyEnforcementPoint: return "PolicyEnforcementPoint";
        case ControlKind::PolicyDecisionPoint: return "PolicyDecisionPoint";
        case ControlKind::DomainAuditAgent: return "DomainAuditAgent";
        case ControlKind::DomainManagementAgent: return "DomainManagementAgent";
    }
    return "?";
}

std::string to_string(RuleEffect e) {
    switch (e) {
        case RuleEffect::Permit: return "permit";
        case RuleEffect::Deny: return "deny";
        case RuleEffect::Oblige: return "oblige";
    }
    return "?";
}

std::string to_string(ElementKind k) {
    switch (k) {
        case ElementKind::Domain: return "domain";
        case ElementKind::Entity: return "entity";
        case ElementKind::Role: return "role";
        case ElementKind::Asset: return "asset";
        case ElementKind::Agent: return "agent";
        case ElementKind::Control: return "control";
        case ElementKind::Policy: return "policy";
        case ElementKind::Store: return "store";
        case ElementKind::AuditStore: return "audit-store";
    }
    return "?";
}

std::optional<EntityType> parse_entity_type(const std::string& s) {
    if (s == "Person") return EntityType::Person;
    if (s == "Organization") return EntityType::Organization;
    if (s == "System") return EntityType::System;
    if (s == "Process") return EntityType::Process;
    if (s == "Resource") return EntityType::Resource;
    if (s == "Agent") return EntityType::Agent;
    return std::nullopt;
}

std::optional<AssetType> parse_asset_type(const std::string& s) {
    if (s == "Data") return AssetType::Data;
    if (s == "Resource") return AssetType::Resource;
    if (s == "Service") return AssetType::Service;
    return std::nullopt;
}

std::optional<ControlKind> parse_control_kind(const std::string& s) {
    if (s == "pep") return ControlKind::PolicyEnforcementPoint;
    if (s == "pdp") return ControlKind::PolicyDecisionPoint;
    if (s == "audit") return ControlKind::DomainAuditAgent;
    if (s == "management") return ControlKind::DomainManagementAgent;
    return std::nullopt;
}

std::string control_kind_keyword(ControlKind k) {
    switch (k) {
        case ControlKind::PolicyEnforcementPoint: return "pep";
        case ControlKind::PolicyDecisionPoint: return "pdp";
        case ControlKind::DomainAuditAgent: return "audit";
        case ControlKind::DomainManagementAgent: return "management";
    }
    return "?";
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::UnknownPolicy: return "UnknownPolicy";
        case Errc::UnknownDomain: return "UnknownDomain";
        case Errc::UnknownRole: return "UnknownRole";
        case Errc::UnknownAgent: return "UnknownAgent";
        case Errc::UnknownAsset: return "UnknownAsset";
        case Errc::UnknownEntity: return "UnknownEntity";
        case Errc::UnknownControl: return "UnknownControl";
        case Errc::UnknownPdp: return "UnknownPdp";
        case Errc::UnknownPep: return "UnknownPep";
        case Errc::UnknownNode: return "UnknownNode";
        case Errc::UnknownDecision: return "UnknownDecision";
        case Errc::UnknownAxiom: return "UnknownAxiom";
        case Errc::NotManagementAgent: return "NotManagementAgent";
        case Errc::NotAResource: return "NotAResource";
        case Errc::AlreadyProvisioned: return "AlreadyProvisioned";
        case Errc::NotProvisioned: return "NotProvisioned";
        case Errc::UnprovisionedResource: return "UnprovisionedResource";
        case Errc::DeliveryRefused: return "DeliveryRefused";
        case Errc::MalformedMessage: return "MalformedMessage";
        case Errc::StaleDecision: return "StaleDecision";
        case Errc::NoCentralStore: return "NoCentralStore";
        case Errc::StoreFormat: return "StoreFormat";
    }
    return "Error";
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

bool is_valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    bool seg_start = true;
    for (char c : s) {
        if (seg_start) {
            if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
            seg_start = false;
        } else if (c == '.') {
            seg_start = true;
        } else if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
            return false;
        }
    }
    return !seg_start;  // no trailing dot
}

// ---------------------------------------------------------------------------
// Model accessors
// ---------------------------------------------------------------------------

namespace {
template <class M>
auto find_in(const M& m, const std::string& id) -> const typename M::mapped_type* {
    auto it = m.find(id);
    return it == m.end() ? nullptr : &it->second;
}
}  // namespace

const Domain* TrustDomainModel::find_domain(const std::string& id) const { return find_in(domains, id); }
const DomainEntity* TrustDomainModel::find_entity(const std::string& id) const { return find_in(entities, id); }
const Role* TrustDomainModel::find_role(const std::string& id) const { return find_in(roles, id); }
const Asset* TrustDomainModel::find_asset(const std::string& id) const { return find_in(assets, id); }
const Agent* TrustDomainModel::find_agent(const std::string& id) const { return find_in(agents, id); }
const Control* TrustDomainModel::find_control(const std::string& id) const { return find_in(controls, id); }
const Policy* TrustDomainModel::find_policy(const std::string& id) const { return find_in(policies, id); }
const DomainPolicyStore* TrustDomainModel::find_store(const std::string& id) const {
    return find_in(policy_stores, id);
}

std::optional<ElementKind> TrustDomainModel::kind_of(const std::string& id) const {
    if (domains.count(id)) return ElementKind::Domain;
    if (entities.count(id)) return ElementKind::Entity;
    if (roles.count(id)) return ElementKind::Role;
    if (assets.count(id)) return ElementKind::Asset;
    if (agents.count(id)) return ElementKind::Agent;
    if (controls.count(id)) return ElementKind::Control;
    if (policies.count(id)) return ElementKind::Policy;
    if (policy_stores.count(id)) return ElementKind::Store;
    if (!central_audit_store_id.empty() && id == central_audit_store_id) return ElementKind::AuditStore;
    return std::nullopt;
}

bool TrustDomainModel::entity_has_role(const std::string& entity_id, const std::string& role_id) const {
    const DomainEntity* e = find_entity(entity_id);
    return e && e->role_ids.count(role_id) > 0;
}

std::set<std::string> TrustDomainModel::entities_with_role(const std::string& role_id) const {
    std::set<std::string> out;
    for (const auto& [id, e] : entities)
        if (e.role_ids.count(role_id)) out.insert(id);
    return out;
}

bool TrustDomainModel::domain_contains_role(const std::string& domain_id, const std::string& role_id) const {
    const Domain* d = find_domain(domain_id);
    if (!d) return false;
    for (const auto& member : d->member_ids) {
        const DomainEntity* e = find_entity(member);
        if (e && e->role_ids.count(role_id)) return true;
    }
    return false;
}

bool TrustDomainModel::domain_contains_entity(const std::string& domain_id,
                                              const std::string& entity_id) const {
    const Domain* d = find_domain(domain_id);
    return d && d->member_ids.count(entity_id) > 0;
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

const std::string& declaration_id(const Declaration& d) {
    return std::visit([](const auto& x) -> const std::string& { return x.id; }, d);
}

SourceSpan declaration_span(const Declaration& d) {
    return std::visit([](const auto& x) { return x.span; }, d);
}

// ---------------------------------------------------------------------------
// build_model
// ---------------------------------------------------------------------------

namespace {

struct Builder {
    TrustDomainModel model;
    std::vector<StructuralError> errors;
    std::map<std::string, SourceSpan> seen;  // id -> first declaration span
    bool model_named = false;
    bool audit_store_named = false;

    void error(StructuralErrorKind kind, std::string msg, std::vector<std::string> ids,
               SourceSpan span) {
        errors.push_back({kind, std::move(msg), std::move(ids), span});
    }

    static std::string span_text(const SourceSpan& s) {
        return "line " + std::to_string(s.line);
    }

    bool claim_id(const std::string& id, const SourceSpan& span) {
        auto [it, inserted] = seen.emplace(id, span);
        if (!inserted) {
            std::string msg = "duplicate identifier '" + id + "'";
            if (it->second.line > 0 && span.line > 0)
                msg += " (first declared at " + span_text(it->second) + ", redeclared at " +
                       span_text(span) + ")";
            error(StructuralErrorKind::DuplicateIdentifier, msg, {id}, span);
            return false;
        }
        return true;
    }

    void dangling(const std::string& from, const std::string& missing, const std::string& field,
                  SourceSpan span) {
        error(StructuralErrorKind::DanglingReference,
              "'" + from + "' references unknown " + field + " '" + missing + "'", {from, missing},
              span);
    }

    void mismatch(const std::string& from, const std::string& msg, SourceSpan span) {
        error(StructuralErrorKind::TypeMismatch, "'" + from + "': " + msg, {from}, span);
    }
};

}  // namespace

BuildResult build_model(const std::vector<Declaration>& declarations) {
    Builder b;

    // Pass 1: register every element so references can be checked in any order.
    for (const auto& decl : declarations) {
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, ModelDecl>) {
                    if (b.model_named)
                        b.error(StructuralErrorKind::DuplicateIdentifier,
                                "duplicate model header '" + d.id + "'", {d.id}, d.span);
                    b.model_named = true;
                    b.model.name = d.id;
                    return;
                } else if constexpr (std::is_same_v<T, AuditStoreDecl>) {
                    if (b.audit_store_named) {
                        b.error(StructuralErrorKind::DuplicateIdentifier,
                                "duplicate audit-store declaration '" + d.id + "'", {d.id}, d.span);
                        return;
                    }
                    if (!b.claim_id(d.id, d.span)) return;
                    b.audit_store_named = true;
                    b.model.central_audit_store_id = d.id;
                    return;
                } else {
                    if (!b.claim_id(d.id, d.span)) return;
                    if constexpr (std::is_same_v<T, DomainDecl>) {
                        b.model.domains[d.id] = Domain{d.id, {}};
                    } else if constexpr (std::is_same_v<T, RoleDecl>) {
                        b.model.roles[d.id] = Role{d.id, {}, {}, {}};
                    } else if constexpr (std::is_same_v<T, EntityDecl>) {
                        DomainEntity e;
                        e.id = d.id;
                        e.entity_type = d.type;
                        e.memberships.insert(d.domains.begin(), d.domains.end());
                        e.role_ids.insert(d.roles.begin(), d.roles.end());
                        b.model.entities[d.id] = std::move(e);
                    } else if constexpr (std::is_same_v<T, AgentDecl>) {
                        Agent a;
                        a.id = d.id;
                        a.owner_role_id = d.owner_role;
                        a.acts_on_behalf_of = d.acts_for.empty() ? d.owner_role : d.acts_for;
                        a.kind = d.kind;
                        b.model.agents[d.id] = std::move(a);
                    } else if constexpr (std::is_same_v<T, AssetDecl>) {
                        Asset a;
                        a.id = d.id;
                        a.asset_type = d.type;
                        a.owner_role_id = d.owner_role;
                        a.provided_by = d.provided_by;
                        a.state = d.state;
                        a.provisioned_by = d.provisioned_by;
                        b.model.assets[d.id] = std::move(a);
                    } else if constexpr (std::is_same_v<T, ControlDecl>) {
                        Control c;
                        c.id = d.id;
                        c.kind = d.kind;
                        c.domain_id = d.domain;
                        c.central_store_id = d.central_store;
                        b.model.controls[d.id] = std::move(c);
                    } else if constexpr (std::is_same_v<T, StoreDecl>) {
                        b.model.policy_stores[d.id] = DomainPolicyStore{d.id, d.domain, {}};
                    } else if constexpr (std::is_same_v<T, PolicyDecl>) {
                        Policy p;
                        p.id = d.id;
                        p.establisher_role_id = d.establisher_role;
                        p.scope_domain_id = d.scope_domain;
                        for (const auto& r : d.rules) p.rules.push_back(r.rule);
                        p.published_by = d.published_by;
                        p.published_to = d.published_to;
                        p.equivalent_to.insert(d.equivalent_to.begin(), d.equivalent_to.end());
                        p.is_delivery_policy = d.is_delivery_policy;
                        b.model.policies[d.id] = std::move(p);
                    }
                }
            },
            decl);
    }

    // Pass 2: reference and type checks, keyed back to declaration spans.
    for (const auto& decl : declarations) {
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                const TrustDomainModel& m = b.model;
                if constexpr (std::is_same_v<T, EntityDecl>) {
                    for (const auto& dom : d.domains)
                        if (!m.find_domain(dom)) b.dangling(d.id, dom, "domain", d.span);
                    for (const auto& r : d.roles)
                        if (!m.find_role(r)) b.dangling(d.id, r, "role", d.span);
                } else if constexpr (std::is_same_v<T, AgentDecl>) {
                    if (!m.find_role(d.owner_role)) b.dangling(d.id, d.owner_role, "role", d.span);
                    const std::string& acts = d.acts_for.empty() ? d.owner_role : d.acts_for;
                    if (!m.find_role(acts)) b.dangling(d.id, acts, "role", d.span);
                } else if constexpr (std::is_same_v<T, AssetDecl>) {
                    if (!m.find_role(d.owner_role)) b.dangling(d.id, d.owner_role, "role", d.span);
                    if (d.provided_by) {
                        if (d.type != AssetType::Service)
                            b.mismatch(d.id, "provided-by applies only to Service assets", d.span);
                        const Asset* backing = m.find_asset(*d.provided_by);
                        if (!backing)
                            b.dangling(d.id, *d.provided_by, "asset", d.span);
                        else if (backing->asset_type != AssetType::Resource)
                            b.mismatch(d.id, "provided-by must name a Resource asset, but '" +
                                                 *d.provided_by + "' is " +
                                                 to_string(backing->asset_type),
                                       d.span);
                    }
                    if (d.state && d.type != AssetType::Resource)
                        b.mismatch(d.id, "only Resource assets carry a state label", d.span);
                    if (d.provisioned_by) {
                        if (d.type != AssetType::Resource)
                            b.mismatch(d.id, "only Resource assets can be provisioned", d.span);
                        if (!m.find_agent(*d.provisioned_by))
                            b.dangling(d.id, *d.provisioned_by, "agent", d.span);
                    }
                } else if constexpr (std::is_same_v<T, ControlDecl>) {
                    if (!m.find_domain(d.domain)) b.dangling(d.id, d.domain, "domain", d.span);
                    if (d.central_store) {
                        if (*d.central_store != m.central_audit_store_id)
                            b.dangling(d.id, *d.central_store, "audit-store", d.span);
                    } else if (d.kind == ControlKind::DomainAuditAgent) {
                        b.mismatch(d.id, "audit control requires a central-store", d.span);
                    }
                } else if constexpr (std::is_same_v<T, StoreDecl>) {
                    if (!m.find_domain(d.domain)) b.dangling(d.id, d.domain, "domain", d.span);
                } else if constexpr (std::is_same_v<T, PolicyDecl>) {
                    if (!m.find_role(d.establisher_role))
                        b.dangling(d.id, d.establisher_role, "role", d.span);
                    if (!m.find_domain(d.scope_domain))
                        b.dangling(d.id, d.scope_domain, "domain", d.span);
                    if (d.published_by) {
                        const Agent* a = m.find_agent(*d.published_by);
                        if (!a)
                            b.dangling(d.id, *d.published_by, "agent", d.span);
                        else if (a->kind != AgentKind::DomainManagementAgent)
                            b.mismatch(d.id, "publisher '" + *d.published_by +
                                                 "' is not a management agent",
                                       d.span);
                    }
                    if (d.published_to && !m.find_store(*d.published_to))
                        b.dangling(d.id, *d.published_to, "store", d.span);
                    for (const auto& eq : d.equivalent_to) {
                        if (eq == d.id)
                            b.mismatch(d.id, "equivalence links are irreflexive", d.span);
                        else if (!m.find_policy(eq))
                            b.dangling(d.id, eq, "policy", d.span);
                    }
                    for (const auto& rd : d.rules) {
                        SourceSpan span = rd.span.line ? rd.span : d.span;
                        if (rd.rule.is_flow()) {
                            const FlowRule& f = rd.rule.flow();
                            for (const std::string* ep : {&f.source_asset_id, &f.dest_asset_id}) {
                                const Asset* a = m.find_asset(*ep);
                                if (!a)
                                    b.dangling(d.id, *ep, "asset", span);
                                else if (a->asset_type != AssetType::Data)
                                    b.mismatch(d.id,
                                               "flow endpoints must be Data assets, but '" + *ep +
                                                   "' is " + to_string(a->asset_type),
                                               span);
                            }
                        } else {
                            const ActionRule& r = rd.rule.action();
                            if (r.subject != kWildcard && !m.find_role(r.subject) &&
                                !m.find_entity(r.subject))
                                b.dangling(d.id, r.subject, "role or entity", span);
                            if (r.target != kWildcard && !m.find_asset(r.target))
                                b.dangling(d.id, r.target, "asset", span);
                        }
                    }
                }
            },
            decl);
    }

    if (!b.errors.empty()) return {std::nullopt, std::move(b.errors)};

    // Pass 3: derive inverse views and symmetrize equivalence links.
    TrustDomainModel& m = b.model;
    for (const auto& [eid, e] : m.entities)
        for (const auto& dom : e.memberships) m.domains[dom].member_ids.insert(eid);
    for (const auto& [aid, a] : m.assets) m.roles[a.owner_role_id].owned_asset_ids.insert(aid);
    for (const auto& [aid, a] : m.agents) m.roles[a.owner_role_id].owned_agent_ids.insert(aid);
    for (const auto& [pid, p] : m.policies)
        m.roles[p.establisher_role_id].established_policy_ids.insert(pid);
    for (auto& [pid, p] : m.policies)
        if (p.published_to) m.policy_stores[*p.published_to].policy_ids.push_back(pid);
    for (auto& [sid, s] : m.policy_stores)
        std::sort(s.policy_ids.begin(), s.policy_ids.end());
    // Declaring one side of an equivalence link implies the other.
    for (auto& [pid, p] : m.policies) {
        for (const auto& eq : p.equivalent_to) m.policies[eq].equivalent_to.insert(pid);
    }

    return {std::move(b.model), {}};
}

// ---------------------------------------------------------------------------
// Lifecycle operations
// ---------------------------------------------------------------------------

std::pair<TrustDomainModel, std::string> clone_policy(const TrustDomainModel& model,
                                                      const std::string& policy_id,
                                                      const std::string& target_domain_id,
                                                      const std::string& new_establisher_role_id) {
    const Policy* orig = model.find_policy(policy_id);
    if (!orig) throw ModelError(Errc::UnknownPolicy, "no policy '" + policy_id + "'");
    if (!model.find_domain(target_domain_id))
        throw ModelError(Errc::UnknownDomain, "no domain '" + target_domain_id + "'");
    if (!model.find_role(new_establisher_role_id))
        throw ModelError(Errc::UnknownRole, "no role '" + new_establisher_role_id + "'");

    std::string clone_id = policy_id + "-clone";
    for (int n = 2; model.kind_of(clone_id); ++n) clone_id = policy_id + "-clone" + std::to_string(n);

    TrustDomainModel out = model;
    Policy clone = *orig;
    clone.id = clone_id;
    clone.scope_domain_id = target_domain_id;
    clone.establisher_role_id = new_establisher_role_id;
    clone.equivalent_to = {policy_id};
    clone.published_by.reset();
    clone.published_to.reset();
    out.policies[clone_id] = clone;
    out.policies[policy_id].equivalent_to.insert(clone_id);
    out.roles[new_establisher_role_id].established_policy_ids.insert(clone_id);
    return {std::move(out), clone_id};
}

namespace {
const Agent& require_management_agent(const TrustDomainModel& model, const std::string& agent_id) {
    const Agent* a = model.find_agent(agent_id);
    if (!a) throw ModelError(Errc::UnknownAgent, "no agent '" + agent_id + "'");
    if (a->kind != AgentKind::DomainManagementAgent)
        throw ModelError(Errc::NotManagementAgent, "agent '" + agent_id + "' is not a management agent");
    return *a;
}

const Asset& require_resource(const TrustDomainModel& model, const std::string& asset_id) {
    const Asset* a = model.find_asset(asset_id);
    if (!a) throw ModelError(Errc::UnknownAsset, "no asset '" + asset_id + "'");
    if (a->asset_type != AssetType::Resource)
        throw ModelError(Errc::NotAResource, "asset '" + asset_id + "' is " + to_string(a->asset_type));
    return *a;
}
}  // namespace

TrustDomainModel provision_resource(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                                    const std::string& resource_asset_id,
                                    const std::string& initial_state) {
    require_management_agent(model, mgmt_agent_id);
    const Asset& res = require_resource(model, resource_asset_id);
    if (res.provisioned_by)
        throw ModelError(Errc::AlreadyProvisioned,
                         "resource '" + resource_asset_id + "' already provisioned by '" +
                             *res.provisioned_by + "'");
    TrustDomainModel out = model;
    Asset& a = out.assets[resource_asset_id];
    a.provisioned_by = mgmt_agent_id;
    a.state = initial_state;
    return out;
}

TrustDomainModel deprovision_resource(const TrustDomainModel& model,
                                      const std::string& mgmt_agent_id,
                                      const std::string& resource_asset_id) {
    require_management_agent(model, mgmt_agent_id);
    const Asset& res = require_resource(model, resource_asset_id);
    if (!res.provisioned_by)
        throw ModelError(Errc::NotProvisioned, "resource '" + resource_asset_id + "' is not provisioned");
    TrustDomainModel out = model;
    Asset& a = out.assets[resource_asset_id];
    a.provisioned_by.reset();
    a.state.reset();
    return out;
}

bool validate_state(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                    const std::string& resource_asset_id, const std::string& expected_state) {
    require_management_agent(model, mgmt_agent_id);
    const Asset& res = require_resource(model, resource_asset_id);
    if (!res.provisioned_by)
        throw ModelError(Errc::NotProvisioned, "resource '" + resource_asset_id + "' is not provisioned");
    return res.state && *res.state == expected_state;
}

std::set<std::string> domain_members(const TrustDomainModel& model, const std::string& domain_id) {
    const Domain* d = model.find_domain(domain_id);
    if (!d) throw ModelError(Errc::UnknownDomain, "no domain '" + domain_id + "'");
    return d->member_ids;
}

std::set<std::string> equivalence_closure(const TrustDomainModel& model,
                                          const std::string& policy_id) {
    if (!model.find_policy(policy_id))
        throw ModelError(Errc::UnknownPolicy, "no policy '" + policy_id + "'");
    std::set<std::string> closure;
    std::deque<std::string> frontier{policy_id};
    while (!frontier.empty()) {
        std::string cur = frontier.front();
        frontier.pop_front();
        if (!closure.insert(cur).second) continue;
        if (const Policy* p = model.find_policy(cur))
            for (const auto& eq : p->equivalent_to)
                if (!closure.count(eq)) frontier.push_back(eq);
    }
    return closure;
}

}  // namespace tdm
