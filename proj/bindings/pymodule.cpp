#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "tdm/axioms.hpp"
#include "tdm/dsl.hpp"
#include "tdm/flow.hpp"
#include "tdm/jsonio.hpp"
#include "tdm/model.hpp"
#include "tdm/simulate.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<long long>());
        case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(to_py(item));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

py::list diags_to_py(const std::vector<tdm::dsl::Diagnostic>& diags) {
    py::list out;
    for (const auto& d : diags) out.append(to_py(tdm::jsonio::to_json(d)));
    return out;
}

std::string diag_summary(const std::vector<tdm::dsl::Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (d.severity != tdm::dsl::Severity::Error) continue;
        if (!out.empty()) out += "; ";
        out += tdm::dsl::to_string(d);
    }
    return out;
}

tdm::TrustDomainModel load_model(const std::string& text) {
    tdm::dsl::ParseResult pr = tdm::dsl::parse(text);
    if (!pr.ok()) throw py::value_error(diag_summary(pr.diagnostics));
    tdm::BuildResult built = tdm::build_model(pr.declarations);
    if (!built.ok()) throw py::value_error("model failed to build");
    return std::move(*built.model);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Trust-domain modeling toolkit";

    py::register_exception<tdm::ModelError>(m, "ModelError");

    py::class_<tdm::TrustDomainModel>(m, "Model")
        .def_static("loads", &load_model, py::arg("text"),
                    "Parse and build a model from .tdm text")
        .def_property_readonly("name",
                               [](const tdm::TrustDomainModel& mdl) { return mdl.name; })
        .def("serialize",
             [](const tdm::TrustDomainModel& mdl) { return tdm::dsl::serialize(mdl); },
             "Canonical .tdm form")
        .def("validate",
             [](const tdm::TrustDomainModel& mdl) {
                 return to_py(tdm::jsonio::to_json(tdm::axioms::validate(mdl)));
             },
             "Axiom validation report")
        .def("domains",
             [](const tdm::TrustDomainModel& mdl) {
                 py::list out;
                 for (const auto& d : tdm::flow::derive_trust_domains(mdl))
                     out.append(to_py(tdm::jsonio::to_json(d)));
                 return out;
             },
             "Trust domains derived from flow agreements")
        .def("reach",
             [](const tdm::TrustDomainModel& mdl, const std::string& src,
                const std::string& dst) -> py::object {
                 auto path = tdm::flow::reachable(tdm::flow::build_flow_graph(mdl), src, dst);
                 if (!path) return py::none();
                 py::list out;
                 for (const auto& n : *path) out.append(py::str(n));
                 return out;
             },
             py::arg("src"), py::arg("dst"),
             "Shortest flow path between two stores, or None")
        .def("check_flow_log",
             [](const tdm::TrustDomainModel& mdl, const std::string& text) {
                 tdm::flow::FlowLogParse log = tdm::flow::parse_flow_log(text);
                 if (!log.diagnostics.empty() &&
                     log.diagnostics.front().severity == tdm::dsl::Severity::Error)
                     throw py::value_error(diag_summary(log.diagnostics));
                 py::list out;
                 for (const auto& v : tdm::flow::check_flow_log(mdl, log.events))
                     out.append(to_py(tdm::jsonio::to_json(v)));
                 return out;
             },
             py::arg("log_text"), "Violations in an observed flow log")
        .def("members",
             [](const tdm::TrustDomainModel& mdl, const std::string& domain_id) {
                 py::list out;
                 for (const auto& e : tdm::domain_members(mdl, domain_id)) out.append(py::str(e));
                 return out;
             },
             py::arg("domain_id"), "Entities that are members of a declared domain")
        .def("clone_policy",
             [](const tdm::TrustDomainModel& mdl, const std::string& policy,
                const std::string& domain, const std::string& role) {
                 auto [next, clone_id] = tdm::clone_policy(mdl, policy, domain, role);
                 return py::make_tuple(next, clone_id);
             },
             py::arg("policy_id"), py::arg("target_domain_id"), py::arg("new_establisher_role_id"),
             "Returns (new model, clone id)")
        .def("simulate",
             [](const tdm::TrustDomainModel& mdl, const std::string& script_text) {
                 tdm::decisions::RequestScriptParse script =
                     tdm::decisions::parse_request_script(script_text);
                 if (!script.diagnostics.empty())
                     throw py::value_error(diag_summary(script.diagnostics));
                 tdm::sim::SimulationResult r = tdm::sim::simulate(mdl, script.lines);
                 auto [ok, bad] = tdm::audit::verify_chain(r.store);
                 py::list decisions;
                 for (const auto& d : r.log.decisions)
                     decisions.append(to_py(tdm::jsonio::to_json(d)));
                 py::dict out;
                 out["decisions"] = decisions;
                 out["actions"] = py::int_(r.log.actions.size());
                 out["events"] = py::int_(r.store.events.size());
                 out["chain_ok"] = py::bool_(ok);
                 out["store"] = py::str(tdm::audit::save_store(r.store));
                 return out;
             },
             py::arg("script_text"),
             "Run a request script through deliver/evaluate/enforce with audit wired");

    m.def("diagnostics",
          [](const std::string& text) { return diags_to_py(tdm::dsl::diagnostics(text)); },
          py::arg("text"), "Diagnostics for .tdm text");
    m.def("fmt",
          [](const std::string& text) { return tdm::dsl::serialize(load_model(text)); },
          py::arg("text"), "Canonical form of .tdm text");
    m.def("verify_store",
          [](const std::string& text) {
              tdm::audit::CentralAuditStore store = tdm::audit::load_store(text);
              auto [ok, bad] = tdm::audit::verify_chain(store);
              py::dict out;
              out["ok"] = py::bool_(ok);
              out["first_bad_index"] = bad ? py::object(py::int_(*bad)) : py::object(py::none());
              out["events"] = py::int_(store.events.size());
              return out;
          },
          py::arg("text"), "Verify a persisted audit store's hash chain");
    m.def("axiom_catalog", []() {
        py::list out;
        for (const auto& ax : tdm::axioms::axiom_catalog()) {
            py::dict d;
            d["id"] = ax.id;
            d["description"] = ax.description;
            d["citation"] = ax.citation;
            out.append(d);
        }
        return out;
    });
}
