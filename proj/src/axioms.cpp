#include "tdm/axioms.hpp"

#include <algorithm>

namespace tdm::axioms {

const std::vector<Axiom>& axiom_catalog() {
    static const std::vector<Axiom> catalog = {
        {"AX1", "at most one management agent publishes any policy",
         "(d1, p) ∈ publishes ∧ (d2, p) ∈ publishes ⇔ d2 = d1"},
        {"AX2", "publishedPolicyTo holds exactly when some policy links the agent and the store",
         "(m, s) ∈ publishedPolicyTo ⇔ (∃ p : Policy • publishedTo p = s ∧ "
         "(m, p) ∈ publishes)"},
        {"AX3", "every influenced pair is witnessed by a policy decision point",
         "(p, x) ∈ influenced ⇒ (∃ y : PolicyDecisionPoint • (y, p) ∈ "
         "consumes ∧ (y, x) ∈ creates)"},
        {"AX4", "any given policy is established by exactly one role",
         "a policy can only be established by one role"},
        {"AX5", "every policy scopes exactly one existing domain", "scopeOf : Policy → Domain"},
        {"AX6", "every domain entity has exactly one entity type",
         "typeOf : DomainEntity → EntityType; an entity has exactly one of the types"},
        {"AX7", "every asset is owned by exactly one role",
         "individual assets must be owned by exactly one Role"},
        {"AX8", "every agent is owned by exactly one role",
         "individual agents must be owned by exactly one Role"},
        {"AX9", "every message has one sender and at least one receiver",
         "hasSender : Message → Sender; a Message has a Sender and one or more Receivers"},
        {"AX10", "resources are provisioned by domain management agents",
         "provisions : DomainManagementAgent ↔ Resource; a Resource can be provisioned or "
         "de-provisioned in the Provider domain"},
        {"AX11", "influenced policies scope a domain covering the target's owner or the requester",
         "a policy is only effective within the domain"},
        {"AX12", "every recorded action is covered by at least one audit event",
         "controls produce Evidence to indicate that actions have been performed in accordance "
         "to the policies"},
    };
    return catalog;
}

const Axiom& axiom(const std::string& id) {
    for (const auto& ax : axiom_catalog())
        if (ax.id == id) return ax;
    throw ModelError(Errc::UnknownAxiom, "no axiom '" + id + "'");
}

namespace {

int axiom_index(const std::string& id) {
    return std::stoi(id.substr(2));
}

// Values grouped by key, keys sorted.
std::map<std::string, std::vector<std::string>> group_by_first(const RelationSet::Pairs& pairs) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [a, b] : pairs) out[a].push_back(b);
    return out;
}

std::map<std::string, std::vector<std::string>> group_by_second(const RelationSet::Pairs& pairs) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [a, b] : pairs) out[b].push_back(a);
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep = ", ") {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += sep;
        out += s;
    }
    return out;
}

struct Checker {
    const RelationSet& rs;
    ValidationReport report;

    void violation(const std::string& axiom_id, std::vector<std::string> ids, std::string why) {
        report.violations.push_back({axiom_id, std::move(ids), std::move(why)});
    }

    void ax1() {
        for (const auto& [policy, agents] : group_by_second(rs.publishes)) {
            if (agents.size() <= 1) continue;
            std::vector<std::string> ids{policy};
            ids.insert(ids.end(), agents.begin(), agents.end());
            violation("AX1", std::move(ids),
                      "policy '" + policy + "' is published by " + std::to_string(agents.size()) +
                          " management agents (" + join(agents) + ")");
        }
    }

    void ax2() {
        RelationSet::Pairs derived;
        for (const auto& [p, s] : rs.published_to)
            for (const auto& [agent, policy] : rs.publishes)
                if (policy == p) derived.insert({agent, s});
        for (const auto& pair : rs.published_policy_to)
            if (!derived.count(pair))
                violation("AX2", {pair.first, pair.second},
                          "publishedPolicyTo records (" + pair.first + ", " + pair.second +
                              ") but no policy links them");
        for (const auto& pair : derived)
            if (!rs.published_policy_to.count(pair))
                violation("AX2", {pair.first, pair.second},
                          "agent '" + pair.first + "' publishes a policy stored in '" +
                              pair.second + "' but publishedPolicyTo omits the pair");
    }

    void ax3() {
        for (const auto& d : rs.decisions) {
            auto kind = rs.control_kind.find(d.created_by_pdp_id);
            bool creator_ok =
                kind != rs.control_kind.end() && kind->second == ControlKind::PolicyDecisionPoint;
            for (const auto& p : d.influenced) {
                if (creator_ok && rs.policy_ids.count(p)) continue;
                violation("AX3", {d.id, p},
                          "influenced pair (" + p + ", " + d.id + ") has no witnessing decision "
                          "point" +
                              (creator_ok ? " consuming the policy"
                                          : ": creator '" + d.created_by_pdp_id +
                                                "' is not a policy decision point"));
            }
        }
    }

    void ax4() {
        for (const auto& policy : rs.policy_ids) {
            std::vector<std::string> roles;
            for (const auto& [r, p] : rs.establishes)
                if (p == policy) roles.push_back(r);
            if (roles.size() == 1) continue;
            std::vector<std::string> ids{policy};
            ids.insert(ids.end(), roles.begin(), roles.end());
            violation("AX4", std::move(ids),
                      roles.empty()
                          ? "policy '" + policy + "' has no establishing role"
                          : "policy '" + policy + "' is established by " +
                                std::to_string(roles.size()) + " roles (" + join(roles) + ")");
        }
    }

    void ax5() {
        auto scopes = group_by_first(rs.scope_of);
        for (const auto& policy : rs.policy_ids) {
            const auto it = scopes.find(policy);
            if (it == scopes.end() || it->second.empty()) {
                violation("AX5", {policy}, "policy '" + policy + "' scopes no domain");
                continue;
            }
            if (it->second.size() > 1) {
                violation("AX5", {policy},
                          "policy '" + policy + "' scopes " + std::to_string(it->second.size()) +
                              " domains (" + join(it->second) + ")");
                continue;
            }
            if (!rs.domain_ids.count(it->second.front()))
                violation("AX5", {policy},
                          "policy '" + policy + "' scopes unknown domain '" + it->second.front() +
                              "'");
        }
    }

    void ax6() {
        auto types = group_by_first(rs.type_of);
        for (const auto& entity : rs.entity_ids) {
            auto it = types.find(entity);
            size_t n = it == types.end() ? 0 : it->second.size();
            if (n != 1)
                violation("AX6", {entity},
                          "entity '" + entity + "' has " + std::to_string(n) + " types" +
                              (n ? " (" + join(it->second) + ")" : ""));
        }
    }

    void single_owner(const std::string& axiom_id, const std::set<std::string>& universe,
                      const RelationSet::Pairs& owns, const std::string& what) {
        auto owners = group_by_second(owns);
        for (const auto& id : universe) {
            auto it = owners.find(id);
            size_t n = it == owners.end() ? 0 : it->second.size();
            if (n == 1) continue;
            std::vector<std::string> ids{id};
            if (it != owners.end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
            violation(axiom_id, std::move(ids),
                      what + " '" + id + "' is owned by " + std::to_string(n) + " roles" +
                          (n ? " (" + join(it->second) + ")" : ""));
        }
    }

    void ax9() {
        for (const auto& m : rs.messages) {
            if (m.sender.empty())
                violation("AX9", {m.id}, "message '" + m.id + "' has no sender");
            if (m.receivers.empty())
                violation("AX9", {m.id}, "message '" + m.id + "' has no receivers");
        }
    }

    void ax10() {
        for (const auto& [resource, agent] : rs.provisioned_by) {
            if (!rs.asset_type_of.count({resource, "Resource"})) {
                violation("AX10", {resource, agent},
                          "provisioned element '" + resource + "' is not a Resource asset");
                continue;
            }
            auto it = rs.agent_kind.find(agent);
            if (it == rs.agent_kind.end() || it->second != "DomainManagementAgent")
                violation("AX10", {resource, agent},
                          "resource '" + resource + "' is provisioned by '" + agent +
                              "', which is not a domain management agent");
        }
    }

    void ax11() {
        auto scopes = group_by_first(rs.scope_of);
        auto members = group_by_second(rs.member_of);
        auto target_owners = group_by_second(rs.owns_asset);
        for (const auto& d : rs.decisions) {
            for (const auto& p : d.influenced) {
                if (!rs.policy_ids.count(p)) continue;  // AX3's finding
                bool ok = false;
                auto sc = scopes.find(p);
                if (sc != scopes.end()) {
                    for (const auto& dom : sc->second) {
                        auto mem = members.find(dom);
                        if (mem == members.end()) continue;
                        for (const auto& entity : mem->second) {
                            if (entity == d.requester) {
                                ok = true;
                                break;
                            }
                            auto owners = target_owners.find(d.target);
                            if (owners != target_owners.end())
                                for (const auto& role : owners->second)
                                    if (rs.has_role.count({entity, role})) {
                                        ok = true;
                                        break;
                                    }
                            if (ok) break;
                        }
                        if (ok) break;
                    }
                }
                if (!ok)
                    violation("AX11", {d.id, p},
                              "decision '" + d.id + "' was influenced by '" + p +
                                  "', whose scope domain contains neither requester '" +
                                  d.requester + "' nor an owner of '" + d.target + "'");
            }
        }
    }

    void ax12() {
        for (const auto& a : rs.actions) {
            bool covered = false;
            for (const auto& e : rs.audit_refs)
                if (e.action_id == a.id ||
                    (!a.decision_id.empty() && e.decision_id == a.decision_id)) {
                    covered = true;
                    break;
                }
            if (!covered)
                violation("AX12", {a.id},
                          "action '" + a.id + "' has no audit event referencing it");
        }
    }
};

}  // namespace

RelationSet extract_relations(const TrustDomainModel& m,
                              const decisions::DecisionLog* decisions_log,
                              const audit::CentralAuditStore* audit_log) {
    RelationSet rs;
    rs.model_name = m.name;
    for (const auto& [id, _] : m.domains) rs.domain_ids.insert(id);
    for (const auto& [id, _] : m.roles) rs.role_ids.insert(id);
    for (const auto& [id, _] : m.policy_stores) rs.store_ids.insert(id);
    for (const auto& [id, e] : m.entities) {
        rs.entity_ids.insert(id);
        rs.type_of.insert({id, to_string(e.entity_type)});
        for (const auto& d : e.memberships) rs.member_of.insert({id, d});
        for (const auto& r : e.role_ids) rs.has_role.insert({id, r});
    }
    for (const auto& [id, a] : m.assets) {
        rs.asset_ids.insert(id);
        rs.asset_type_of.insert({id, to_string(a.asset_type)});
        rs.owns_asset.insert({a.owner_role_id, id});
        if (a.provisioned_by) rs.provisioned_by.insert({id, *a.provisioned_by});
    }
    for (const auto& [id, a] : m.agents) {
        rs.agent_ids.insert(id);
        rs.owns_agent.insert({a.owner_role_id, id});
        rs.agent_kind[id] = to_string(a.kind);
    }
    for (const auto& [id, c] : m.controls) {
        rs.control_ids.insert(id);
        rs.control_kind[id] = c.kind;
    }
    for (const auto& [id, p] : m.policies) {
        rs.policy_ids.insert(id);
        rs.scope_of.insert({id, p.scope_domain_id});
        rs.establishes.insert({p.establisher_role_id, id});
        if (p.published_by) rs.publishes.insert({*p.published_by, id});
        if (p.published_to) rs.published_to.insert({id, *p.published_to});
    }
    for (const auto& [id, r] : m.roles)
        for (const auto& p : r.established_policy_ids) rs.establishes.insert({id, p});
    // Stored publishedPolicyTo copy starts out as the derived relation.
    for (const auto& [agent, policy] : rs.publishes)
        for (const auto& [p, store] : rs.published_to)
            if (p == policy) rs.published_policy_to.insert({agent, store});

    if (decisions_log) {
        rs.decisions_log_present = true;
        for (const auto& d : decisions_log->decisions)
            rs.decisions.push_back({d.id, d.created_by_pdp_id, d.influenced_policy_ids,
                                    d.request.requester_entity_id, d.request.target_asset_id});
        for (const auto& msg : decisions_log->messages)
            rs.messages.push_back({msg.id, msg.sender_id, msg.receiver_ids});
        for (const auto& a : decisions_log->actions) rs.actions.push_back({a.id, a.decision_id});
    }
    if (audit_log) {
        rs.audit_log_present = true;
        for (const auto& e : audit_log->events)
            rs.audit_refs.push_back({e.id, e.action_id, e.decision_id});
    }
    return rs;
}

ValidationReport validate_relations(const RelationSet& rs) {
    Checker c{rs, {}};
    c.report.model_name = rs.model_name;

    c.ax1();
    c.ax2();
    bool decisions_ok = rs.decisions_log_present;
    if (decisions_ok) c.ax3();
    c.ax4();
    c.ax5();
    c.ax6();
    c.single_owner("AX7", rs.asset_ids, rs.owns_asset, "asset");
    c.single_owner("AX8", rs.agent_ids, rs.owns_agent, "agent");
    c.ax9();
    c.ax10();
    if (decisions_ok) c.ax11();
    bool ax12_ok = decisions_ok && rs.audit_log_present;
    if (ax12_ok) c.ax12();

    for (const auto& ax : axiom_catalog()) {
        bool checked = true;
        if (ax.id == "AX3" || ax.id == "AX11") checked = decisions_ok;
        if (ax.id == "AX12") checked = ax12_ok;
        (checked ? c.report.checked_axioms : c.report.unchecked_axioms).push_back(ax.id);
    }

    std::sort(c.report.violations.begin(), c.report.violations.end(),
              [](const AxiomViolation& a, const AxiomViolation& b) {
                  int ia = axiom_index(a.axiom_id), ib = axiom_index(b.axiom_id);
                  if (ia != ib) return ia < ib;
                  if (a.offending_element_ids != b.offending_element_ids)
                      return a.offending_element_ids < b.offending_element_ids;
                  return a.explanation < b.explanation;
              });
    return std::move(c.report);
}

ValidationReport validate(const TrustDomainModel& model,
                          const decisions::DecisionLog* decisions_log,
                          const audit::CentralAuditStore* audit_log) {
    return validate_relations(extract_relations(model, decisions_log, audit_log));
}

std::vector<AxiomViolation> check_axiom(const TrustDomainModel& model, const std::string& axiom_id,
                                        const decisions::DecisionLog* decisions_log,
                                        const audit::CentralAuditStore* audit_log) {
    axiom(axiom_id);  // validates the id
    ValidationReport report = validate(model, decisions_log, audit_log);
    std::vector<AxiomViolation> out;
    for (auto& v : report.violations)
        if (v.axiom_id == axiom_id) out.push_back(std::move(v));
    return out;
}

}  // namespace tdm::axioms
