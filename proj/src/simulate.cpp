#include "tdm/simulate.hpp"

namespace tdm::sim {

namespace {

std::string first_control_of(const TrustDomainModel& model, ControlKind kind,
                             const char* what) {
    for (const auto& [id, c] : model.controls)
        if (c.kind == kind) return id;
    throw ModelError(Errc::UnknownControl, std::string("model has no ") + what);
}

}  // namespace

SimulationResult simulate(const TrustDomainModel& model,
                          const std::vector<decisions::RequestScriptLine>& script) {
    std::string pdp = first_control_of(model, ControlKind::PolicyDecisionPoint,
                                       "policy decision point");
    std::string pep = first_control_of(model, ControlKind::PolicyEnforcementPoint,
                                       "policy enforcement point");
    std::string auditor = first_control_of(model, ControlKind::DomainAuditAgent,
                                           "domain audit agent");
    if (model.central_audit_store_id.empty())
        throw ModelError(Errc::NoCentralStore, "model declares no audit-store");

    SimulationResult r{model, {}, audit::make_store(model.central_audit_store_id)};
    for (const auto& line : script) {
        decisions::Message msg;
        msg.id = r.log.next_message_id();
        msg.sender_id = line.request.requester_entity_id;
        msg.receiver_ids = {pdp};
        msg.payload = line.request;
        decisions::Request req = decisions::deliver(r.model, msg);
        r.log.messages.push_back(msg);

        decisions::PolicyDecision decision = decisions::evaluate(r.model, req, pdp, line.ctx);
        decision.id = r.log.next_decision_id();
        r.log.decisions.push_back(decision);

        decisions::EnforceOutcome outcome = decisions::enforce(
            r.model, decision, pep, static_cast<long>(r.log.actions.size()) + 1);
        r.model = std::move(outcome.model);
        if (outcome.action) r.log.actions.push_back(*outcome.action);
        for (const auto& note : outcome.notes) {
            audit::EventFields fields;
            fields.emitting_control_id = pep;
            fields.action_id = note.action_id;
            fields.decision_id = note.decision_id;
            fields.event_kind = note.event_kind;
            fields.detail = note.detail;
            fields.critical = note.critical;
            audit::forward(r.store, r.model, auditor, fields);
        }
    }
    return r;
}

bool validate_state_audited(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                            const std::string& resource_asset_id, const std::string& expected_state,
                            const std::string& audit_agent_control_id,
                            audit::CentralAuditStore& store) {
    bool ok = validate_state(model, mgmt_agent_id, resource_asset_id, expected_state);
    audit::EventFields fields;
    fields.emitting_control_id = mgmt_agent_id;
    fields.event_kind = "state-validated";
    fields.detail = resource_asset_id + " expected=" + expected_state +
                    " ok=" + (ok ? "true" : "false");
    fields.critical = !ok;  // failed validations are critical
    audit::forward(store, model, audit_agent_control_id, fields);
    return ok;
}

}  // namespace tdm::sim
