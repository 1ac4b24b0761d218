#pragma once

#include <nlohmann/json.hpp>

#include "tdm/axioms.hpp"
#include "tdm/decisions.hpp"
#include "tdm/dsl.hpp"
#include "tdm/flow.hpp"

// Structured-output records shared by the CLI and the python bindings.
namespace tdm::jsonio {

nlohmann::json to_json(const dsl::Diagnostic& d);
nlohmann::json to_json(const axioms::AxiomViolation& v);
nlohmann::json to_json(const axioms::ValidationReport& r);
nlohmann::json to_json(const flow::DerivedDomain& d);
nlohmann::json to_json(const flow::FlowViolation& v);
nlohmann::json to_json(const decisions::PolicyDecision& d);

}  // namespace tdm::jsonio
