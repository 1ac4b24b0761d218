#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tdm/axioms.hpp"
#include "tdm/dsl.hpp"
#include "tdm/flow.hpp"
#include "tdm/jsonio.hpp"
#include "tdm/model.hpp"
#include "tdm/simulate.hpp"

namespace {

constexpr int kExitOk = 0;        // success / no findings
constexpr int kExitFindings = 1;  // violations found
constexpr int kExitUsage = 2;     // usage or parse error

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void print_diagnostics(const std::vector<tdm::dsl::Diagnostic>& diags, const std::string& path,
                       bool structured) {
    for (const auto& d : diags) {
        if (structured)
            std::cout << tdm::jsonio::to_json(d).dump() << "\n";
        else
            std::cout << path << ":" << tdm::dsl::to_string(d) << "\n";
    }
}

// Parses and builds, or throws UsageError after printing the diagnostics.
tdm::TrustDomainModel load_model(const std::string& path, bool structured) {
    tdm::dsl::ParseResult pr = tdm::dsl::parse(read_file(path));
    if (!pr.ok()) {
        print_diagnostics(pr.diagnostics, path, structured);
        throw UsageError("'" + path + "' has errors");
    }
    print_diagnostics(pr.diagnostics, path, structured);  // warnings only
    tdm::BuildResult built = tdm::build_model(pr.declarations);
    if (!built.ok()) throw UsageError("'" + path + "' failed to build");
    return std::move(*built.model);
}

template <class Container>
std::string join(const Container& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ",";
        out += s;
    }
    return out;
}

int cmd_validate(const std::string& path, bool structured) {
    tdm::TrustDomainModel model = load_model(path, structured);
    tdm::axioms::ValidationReport report = tdm::axioms::validate(model);
    if (structured) {
        for (const auto& v : report.violations)
            std::cout << tdm::jsonio::to_json(v).dump() << "\n";
    } else {
        for (const auto& v : report.violations)
            std::cout << v.axiom_id << " [" << join(v.offending_element_ids) << "] "
                      << v.explanation << "\n";
        std::cout << "model " << report.model_name << ": " << report.violations.size()
                  << " violations (" << report.checked_axioms.size() << " axioms checked, "
                  << report.unchecked_axioms.size() << " unchecked)\n";
    }
    return report.violations.empty() ? kExitOk : kExitFindings;
}

int cmd_domains(const std::string& path, bool structured, bool dot) {
    tdm::TrustDomainModel model = load_model(path, structured);
    if (dot) {
        std::cout << tdm::flow::to_dot(tdm::flow::build_flow_graph(model));
        return kExitOk;
    }
    std::vector<tdm::flow::DerivedDomain> domains = tdm::flow::derive_trust_domains(model);
    for (const auto& d : domains) {
        if (structured) {
            std::cout << tdm::jsonio::to_json(d).dump() << "\n";
        } else {
            std::cout << "domain " << d.name << " [" << tdm::flow::to_string(d.direction_profile)
                      << "] stores: " << join(d.member_store_ids)
                      << " entities: " << join(d.member_entity_ids)
                      << " policies: " << join(d.generating_policy_ids) << "\n";
        }
    }
    if (!structured)
        std::cout << domains.size() << " trust domains derived from "
                  << model.policies.size() << " policies\n";
    return kExitOk;
}

int cmd_reach(const std::string& path, const std::string& src, const std::string& dst,
              bool structured) {
    tdm::TrustDomainModel model = load_model(path, structured);
    tdm::flow::FlowGraph graph = tdm::flow::build_flow_graph(model);
    auto p = tdm::flow::reachable(graph, src, dst);
    if (!p) {
        std::cout << "unreachable\n";
        return kExitFindings;
    }
    std::string out;
    for (const auto& n : *p) {
        if (!out.empty()) out += " -> ";
        out += n;
    }
    std::cout << out << "\n";
    return kExitOk;
}

int cmd_checkflow(const std::string& path, const std::string& log_path, bool structured) {
    tdm::TrustDomainModel model = load_model(path, structured);
    tdm::flow::FlowLogParse log = tdm::flow::parse_flow_log(read_file(log_path));
    bool errors = false;
    for (const auto& d : log.diagnostics) errors |= d.severity == tdm::dsl::Severity::Error;
    print_diagnostics(log.diagnostics, log_path, structured);
    if (errors) throw UsageError("'" + log_path + "' has errors");
    std::vector<tdm::flow::FlowViolation> violations = tdm::flow::check_flow_log(model, log.events);
    for (const auto& v : violations) {
        if (structured) {
            std::cout << tdm::jsonio::to_json(v).dump() << "\n";
        } else {
            std::cout << "seq " << v.event.seq << " flow " << v.event.source_store_id << " -> "
                      << v.event.dest_store_id << ": " << v.note;
            if (!v.related_policy_ids.empty()) {
                std::cout << " (policy";
                for (const auto& p : v.related_policy_ids) std::cout << " " << p;
                std::cout << ")";
            }
            std::cout << "\n";
        }
    }
    if (!structured)
        std::cout << violations.size() << " violations in " << log.events.size() << " events\n";
    return violations.empty() ? kExitOk : kExitFindings;
}

int cmd_simulate(const std::string& path, const std::string& script_path,
                 const std::string& audit_out, bool structured) {
    tdm::TrustDomainModel model = load_model(path, structured);
    tdm::decisions::RequestScriptParse script =
        tdm::decisions::parse_request_script(read_file(script_path));
    if (!script.diagnostics.empty()) {
        print_diagnostics(script.diagnostics, script_path, structured);
        throw UsageError("'" + script_path + "' has errors");
    }
    tdm::sim::SimulationResult r = tdm::sim::simulate(model, script.lines);
    for (const auto& d : r.log.decisions) {
        if (structured) {
            std::cout << tdm::jsonio::to_json(d).dump() << "\n";
        } else {
            std::cout << d.id << " " << tdm::decisions::to_string(d.kind) << " "
                      << d.request.requester_entity_id << " " << d.request.action_kind << " "
                      << d.request.target_asset_id << " influenced:";
            if (d.influenced_policy_ids.empty()) std::cout << " -";
            for (const auto& p : d.influenced_policy_ids) std::cout << " " << p;
            std::cout << "\n";
        }
    }
    auto [ok, bad] = tdm::audit::verify_chain(r.store);
    if (!structured)
        std::cout << r.log.decisions.size() << " decisions, " << r.log.actions.size()
                  << " actions, " << r.store.events.size() << " audit events, chain "
                  << (ok ? "ok" : "BROKEN") << "\n";
    if (!audit_out.empty()) {
        std::ofstream out(audit_out, std::ios::binary);
        if (!out) throw UsageError("cannot write '" + audit_out + "'");
        out << tdm::audit::save_store(r.store);
    }
    return kExitOk;
}

int cmd_audit_verify(const std::string& path) {
    std::string text = read_file(path);
    tdm::audit::CentralAuditStore store;
    try {
        store = tdm::audit::load_store(text);
    } catch (const tdm::ModelError& e) {
        std::cout << "store malformed: " << e.what() << "\n";
        return kExitFindings;
    }
    auto [ok, bad] = tdm::audit::verify_chain(store);
    if (!ok) {
        std::cout << "chain broken at event " << *bad << "\n";
        return kExitFindings;
    }
    std::cout << "chain ok (" << store.events.size() << " events, head " << store.head_hash
              << ")\n";
    return kExitOk;
}

int cmd_fmt(const std::string& path) {
    tdm::TrustDomainModel model = load_model(path, false);
    std::cout << tdm::dsl::serialize(model);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trust-domain toolkit: validate .tdm configurations, derive trust domains, "
                 "analyze flows, evaluate requests, and verify audit chains"};
    app.require_subcommand(1);

    std::string file, log_path, script_path, src, dst, audit_out, format = "text";
    bool dot = false;

    auto add_format = [&format](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"text", "structured"}));
    };

    CLI::App* validate = app.add_subcommand("validate", "Check a model against the axiom catalog");
    validate->add_option("file", file, "Model file (.tdm)")->required();
    add_format(validate);

    CLI::App* domains = app.add_subcommand("domains", "Derive trust domains from flow agreements");
    domains->add_option("file", file, "Model file (.tdm)")->required();
    domains->add_flag("--dot", dot, "Print the flow graph in DOT form instead");
    add_format(domains);

    CLI::App* reach = app.add_subcommand("reach", "Shortest flow path between two stores");
    reach->add_option("file", file, "Model file (.tdm)")->required();
    reach->add_option("src", src, "Source store")->required();
    reach->add_option("dst", dst, "Destination store")->required();

    CLI::App* checkflow = app.add_subcommand("checkflow", "Check an observed flow log");
    checkflow->add_option("file", file, "Model file (.tdm)")->required();
    checkflow->add_option("log", log_path, "Flow log")->required();
    add_format(checkflow);

    CLI::App* simulate = app.add_subcommand("simulate", "Run a request script through the "
                                                        "decision/enforcement pipeline");
    simulate->add_option("file", file, "Model file (.tdm)")->required();
    simulate->add_option("requests", script_path, "Request script")->required();
    simulate->add_option("--audit-out", audit_out, "Write the audit store to this path");
    add_format(simulate);

    CLI::App* audit = app.add_subcommand("audit", "Audit store operations");
    audit->require_subcommand(1);
    CLI::App* audit_verify = audit->add_subcommand("verify", "Verify an audit store's hash chain");
    audit_verify->add_option("store", file, "Audit store file")->required();

    CLI::App* fmt = app.add_subcommand("fmt", "Print the canonical form of a model file");
    fmt->add_option("file", file, "Model file (.tdm)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    bool structured = format == "structured";
    try {
        if (validate->parsed()) return cmd_validate(file, structured);
        if (domains->parsed()) return cmd_domains(file, structured, dot);
        if (reach->parsed()) return cmd_reach(file, src, dst, structured);
        if (checkflow->parsed()) return cmd_checkflow(file, log_path, structured);
        if (simulate->parsed()) return cmd_simulate(file, script_path, audit_out, structured);
        if (audit->parsed()) return cmd_audit_verify(file);
        if (fmt->parsed()) return cmd_fmt(file);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tdm::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
