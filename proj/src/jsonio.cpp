#include "tdm/jsonio.hpp"

namespace tdm::jsonio {

using nlohmann::json;

json to_json(const dsl::Diagnostic& d) {
    return json{
        {"record", "diagnostic"},
        {"severity", d.severity == dsl::Severity::Error ? "error" : "warning"},
        {"message", d.message},
        {"line", d.span.line},
        {"col", d.span.col_begin},
    };
}

json to_json(const axioms::AxiomViolation& v) {
    return json{
        {"record", "violation"},
        {"axiom", v.axiom_id},
        {"citation", axioms::axiom(v.axiom_id).citation},
        {"elements", v.offending_element_ids},
        {"explanation", v.explanation},
    };
}

json to_json(const axioms::ValidationReport& r) {
    json violations = json::array();
    for (const auto& v : r.violations) violations.push_back(to_json(v));
    return json{
        {"record", "validation-report"},
        {"model", r.model_name},
        {"checked", r.checked_axioms},
        {"unchecked", r.unchecked_axioms},
        {"violations", violations},
    };
}

json to_json(const flow::DerivedDomain& d) {
    return json{
        {"record", "derived-domain"},
        {"name", d.name},
        {"direction", flow::to_string(d.direction_profile)},
        {"stores", d.member_store_ids},
        {"entities", d.member_entity_ids},
        {"policies", d.generating_policy_ids},
    };
}

json to_json(const flow::FlowViolation& v) {
    return json{
        {"record", "flow-violation"},
        {"seq", v.event.seq},
        {"source", v.event.source_store_id},
        {"dest", v.event.dest_store_id},
        {"note", v.note},
        {"policies", v.related_policy_ids},
    };
}

json to_json(const decisions::PolicyDecision& d) {
    json matched = json::array();
    for (const auto& [policy, rule] : d.matched_rules)
        matched.push_back(json{{"policy", policy}, {"rule", rule}});
    return json{
        {"record", "decision"},
        {"id", d.id},
        {"kind", decisions::to_string(d.kind)},
        {"influenced", d.influenced_policy_ids},
        {"matched", matched},
        {"pdp", d.created_by_pdp_id},
        {"request",
         {{"requester", d.request.requester_entity_id},
          {"action_kind", d.request.action_kind},
          {"target", d.request.target_asset_id}}},
    };
}

}  // namespace tdm::jsonio
