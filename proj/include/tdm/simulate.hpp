#pragma once

#include <string>
#include <vector>

#include "tdm/audit.hpp"
#include "tdm/decisions.hpp"
#include "tdm/model.hpp"

namespace tdm::sim {

// One deliver -> evaluate -> enforce pass per request, with every outcome
// forwarded through the domain audit agent into the central store.
struct SimulationResult {
    TrustDomainModel model;  // post-run state (enables_state updates applied)
    decisions::DecisionLog log;
    audit::CentralAuditStore store;
};

// Uses the model's policy decision point, enforcement point, and audit agent
// (first of each kind by id). Throws when one of them is missing or the model
// declares no central audit store.
SimulationResult simulate(const TrustDomainModel& model,
                          const std::vector<decisions::RequestScriptLine>& script);

// Records a state validation through the audit pipeline; failed validations
// are critical. Returns the comparison result.
bool validate_state_audited(const TrustDomainModel& model, const std::string& mgmt_agent_id,
                            const std::string& resource_asset_id, const std::string& expected_state,
                            const std::string& audit_agent_control_id,
                            audit::CentralAuditStore& store);

}  // namespace tdm::sim
