#include "tdm/decisions.hpp"

#include <algorithm>
#include <sstream>

namespace tdm::decisions {

std::string to_string(DecisionKind k) {
    switch (k) {
        case DecisionKind::Permission: return "Permission";
        case DecisionKind::Obligation: return "Obligation";
        case DecisionKind::Denial: return "Denial";
    }
    return "?";
}

const PolicyDecision* DecisionLog::find_decision(const std::string& id) const {
    for (const auto& d : decisions)
        if (d.id == id) return &d;
    return nullptr;
}

const Action* DecisionLog::find_action(const std::string& id) const {
    for (const auto& a : actions)
        if (a.id == id) return &a;
    return nullptr;
}

bool subject_matches(const TrustDomainModel& model, const std::string& selector,
                     const std::string& actor_id) {
    if (selector == kWildcard || selector == actor_id) return true;
    if (model.entity_has_role(actor_id, selector)) return true;
    if (const Agent* a = model.find_agent(actor_id))
        if (a->acts_on_behalf_of == selector) return true;
    return false;
}

namespace {

bool rule_matches(const TrustDomainModel& model, const ActionRule& rule, const Request& req,
                  const EvalContext& ctx) {
    if (rule.action_kind != req.action_kind) return false;
    if (rule.target != kWildcard && rule.target != req.target_asset_id) return false;
    if (!subject_matches(model, rule.subject, req.requester_entity_id)) return false;
    if (!rule.guard.empty()) {
        auto it = ctx.guards.find(rule.guard);
        if (it == ctx.guards.end() || !it->second) return false;
    }
    return true;
}

}  // namespace

Request deliver(const TrustDomainModel& model, const Message& message) {
    if (message.sender_id.empty())
        throw ModelError(Errc::MalformedMessage, "message '" + message.id + "' has no sender");
    if (message.receiver_ids.empty())
        throw ModelError(Errc::MalformedMessage, "message '" + message.id + "' has no receivers");
    if (message.delivery_policy_id) {
        const Policy* dp = model.find_policy(*message.delivery_policy_id);
        if (!dp)
            throw ModelError(Errc::MalformedMessage, "message '" + message.id +
                                                         "' names unknown delivery policy '" +
                                                         *message.delivery_policy_id + "'");
        if (!dp->is_delivery_policy)
            throw ModelError(Errc::MalformedMessage,
                             "policy '" + dp->id + "' is not a delivery policy");
        // Every receiver needs an explicit permit for (sender, deliver, receiver).
        for (const auto& receiver : message.receiver_ids) {
            bool permitted = false;
            for (const auto& r : dp->rules) {
                if (r.is_flow()) continue;
                const ActionRule& rule = r.action();
                if (rule.action_kind != "deliver") continue;
                if (rule.target != kWildcard && rule.target != receiver) continue;
                if (!subject_matches(model, rule.subject, message.sender_id)) continue;
                if (rule.effect == RuleEffect::Permit) permitted = true;
                break;  // first matching rule decides
            }
            if (!permitted)
                throw ModelError(Errc::DeliveryRefused, "delivery policy '" + dp->id +
                                                            "' refuses transfer from '" +
                                                            message.sender_id + "' to '" +
                                                            receiver + "'");
        }
    }
    return message.payload;
}

PolicyDecision evaluate(const TrustDomainModel& model, const Request& request,
                        const std::string& pdp_id, const EvalContext& ctx) {
    const Control* pdp = model.find_control(pdp_id);
    if (!pdp || pdp->kind != ControlKind::PolicyDecisionPoint)
        throw ModelError(Errc::UnknownPdp, "'" + pdp_id + "' is not a policy decision point");
    const DomainEntity* requester = model.find_entity(request.requester_entity_id);
    if (!requester)
        throw ModelError(Errc::UnknownEntity, "no entity '" + request.requester_entity_id + "'");
    const Asset* target = model.find_asset(request.target_asset_id);
    if (!target) throw ModelError(Errc::UnknownAsset, "no asset '" + request.target_asset_id + "'");
    if (target->asset_type == AssetType::Resource && !target->provisioned_by)
        throw ModelError(Errc::UnprovisionedResource,
                         "resource '" + target->id + "' is not provisioned");

    PolicyDecision out;
    out.created_by_pdp_id = pdp_id;
    out.request = request;

    // A policy is only effective within its domain: consider it when the scope
    // domain contains the requester or an entity holding the target's owner
    // role. std::map iteration gives the (policy id, rule index) scan order.
    std::optional<RuleEffect> winner;
    for (const auto& [pid, p] : model.policies) {
        if (p.is_delivery_policy) continue;
        if (!model.domain_contains_entity(p.scope_domain_id, request.requester_entity_id) &&
            !model.domain_contains_role(p.scope_domain_id, target->owner_role_id))
            continue;
        int first_match = -1;
        for (size_t i = 0; i < p.rules.size(); ++i) {
            if (p.rules[i].is_flow()) continue;
            if (!rule_matches(model, p.rules[i].action(), request, ctx)) continue;
            first_match = static_cast<int>(i);
            break;
        }
        if (first_match < 0) continue;
        if (!winner) winner = p.rules[first_match].action().effect;
        out.influenced_policy_ids.push_back(pid);
        out.matched_rules.emplace_back(pid, first_match);
    }

    if (!winner) {
        out.kind = DecisionKind::Denial;  // default-deny
        return out;
    }
    switch (*winner) {
        case RuleEffect::Permit: out.kind = DecisionKind::Permission; break;
        case RuleEffect::Deny: out.kind = DecisionKind::Denial; break;
        case RuleEffect::Oblige: out.kind = DecisionKind::Obligation; break;
    }
    if (out.kind == DecisionKind::Permission) out.enables_state = ctx.enable_state;
    return out;
}

EnforceOutcome enforce(const TrustDomainModel& model, const PolicyDecision& decision,
                       const std::string& pep_id, long next_sequence) {
    const Control* pep = model.find_control(pep_id);
    if (!pep || pep->kind != ControlKind::PolicyEnforcementPoint)
        throw ModelError(Errc::UnknownPep, "'" + pep_id + "' is not a policy enforcement point");
    if (!model.find_entity(decision.request.requester_entity_id) ||
        !model.find_asset(decision.request.target_asset_id))
        throw ModelError(Errc::StaleDecision, "decision '" + decision.id +
                                                  "' references elements no longer in the model");

    EnforceOutcome out{model, std::nullopt, {}};
    if (decision.kind == DecisionKind::Denial) {
        out.notes.push_back({"action-blocked", "", decision.id,
                             decision.request.requester_entity_id + " " +
                                 decision.request.action_kind + " " +
                                 decision.request.target_asset_id,
                             true});
        return out;
    }

    Action act;
    act.id = "a" + std::to_string(next_sequence);
    act.kind = decision.request.action_kind;
    act.performed_by = decision.request.requester_entity_id;
    act.performed_on = decision.request.target_asset_id;
    act.decision_id = decision.id;
    act.sequence = next_sequence;

    if (decision.enables_state) {
        Asset& target = out.model.assets[decision.request.target_asset_id];
        if (target.asset_type == AssetType::Resource) target.state = *decision.enables_state;
    }

    out.notes.push_back({"action-performed", act.id, decision.id, act.kind, false});
    if (decision.kind == DecisionKind::Obligation)
        out.notes.push_back({"obligation-pending", act.id, decision.id, act.kind, false});
    out.action = std::move(act);
    return out;
}

std::pair<std::string, std::vector<std::pair<std::string, int>>> decision_provenance(
    const DecisionLog& log, const std::string& decision_id) {
    const PolicyDecision* d = log.find_decision(decision_id);
    if (!d) throw ModelError(Errc::UnknownDecision, "no decision '" + decision_id + "'");
    return {d->created_by_pdp_id, d->matched_rules};
}

RequestScriptParse parse_request_script(std::string_view text) {
    RequestScriptParse out;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                       : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::string kw;
        if (!(is >> kw)) continue;
        SourceSpan span{lineno, 1, static_cast<int>(line.size()) + 1};
        RequestScriptLine rl;
        rl.span = span;
        std::string ctxkw;
        if (kw != "request" || !(is >> rl.request.requester_entity_id >> rl.request.action_kind >>
                                 rl.request.target_asset_id)) {
            out.diagnostics.push_back(
                {dsl::Severity::Error, "expected 'request <ENTITY> <KIND> <ASSET> [ctx k=v,...]'",
                 span});
            continue;
        }
        bool bad = false;
        if (is >> ctxkw) {
            std::string pairs;
            if (ctxkw != "ctx" || !(is >> pairs)) {
                out.diagnostics.push_back(
                    {dsl::Severity::Error, "expected 'ctx k=v,...' after request", span});
                continue;
            }
            size_t start = 0;
            while (start <= pairs.size()) {
                size_t comma = pairs.find(',', start);
                std::string pair = pairs.substr(
                    start, comma == std::string::npos ? std::string::npos : comma - start);
                size_t eq = pair.find('=');
                std::string value = eq == std::string::npos ? "" : pair.substr(eq + 1);
                if (eq == std::string::npos || (value != "true" && value != "false")) {
                    out.diagnostics.push_back(
                        {dsl::Severity::Error, "bad context entry '" + pair + "' (want k=true|false)",
                         span});
                    bad = true;
                    break;
                }
                rl.ctx.guards[pair.substr(0, eq)] = value == "true";
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            std::string extra;
            if (!bad && is >> extra) {
                out.diagnostics.push_back(
                    {dsl::Severity::Error, "unexpected trailing token '" + extra + "'", span});
                bad = true;
            }
        }
        if (!bad) out.lines.push_back(std::move(rl));
    }
    return out;
}

}  // namespace tdm::decisions
