// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run directly or through ctest (-R acceptance).

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "support/genmodel.hpp"
#include "support/oracles.hpp"
#include "tdm/audit.hpp"
#include "tdm/axioms.hpp"
#include "tdm/decisions.hpp"
#include "tdm/dsl.hpp"
#include "tdm/flow.hpp"
#include "tdm/jsonio.hpp"
#include "tdm/simulate.hpp"

using namespace tdm;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

struct Cli {
    int exit_code = -1;
    std::string output;
};

Cli run_cli(const std::string& args) {
    std::string cmd = std::string(TDM_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    Cli r;
    FILE* pipe = popen(cmd.c_str(), "r");
    require(pipe != nullptr, "cannot spawn CLI");
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// --- criteria ---------------------------------------------------------------

void healthcare_domains() {
    auto started = std::chrono::steady_clock::now();
    Cli r = run_cli("domains " + fixtures::path("healthcare.tdm"));
    auto elapsed = std::chrono::steady_clock::now() - started;
    require(r.exit_code == 0, "domains exited " + std::to_string(r.exit_code));

    std::set<std::string> names;
    std::istringstream lines(r.output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("domain ", 0) != 0) continue;
        names.insert(line.substr(7, line.find(' ', 7) - 7));
    }
    std::set<std::string> expected{"SS1-SS3-Demo-TDom", "SS2-SS3-Demo-TDom",
                                   "SS1-SS2-Findings-TDom", "SS3-Internal-TDom",
                                   "MS1-MS2-Stats-TDom"};
    require(names == expected, "derived domain names differ from the expected five");

    std::vector<flow::DerivedDomain> ds =
        flow::derive_trust_domains(fixtures::model("healthcare.tdm"));
    int covering = 0;
    for (const auto& d : ds) covering += d.member_store_ids.count("SS3.Demographics");
    require(covering == 3, "SS3.Demographics is a member of " + std::to_string(covering) +
                               " domains, want 3");
    require(elapsed < std::chrono::seconds(1), "domains took >= 1s");
}

void directionality() {
    flow::FlowGraph g = flow::build_flow_graph(fixtures::model("healthcare.tdm"));
    auto forward = flow::reachable(g, "SS3.Demographics", "SS3.Births");
    require(forward.has_value() && forward->size() == 2,
            "Demographics -> Births is not a length-1 path");
    require(!flow::reachable(g, "SS3.Births", "SS3.Demographics").has_value(),
            "Births -> Demographics should be unreachable");
}

void transitivity_surfacing() {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    flow::FlowGraph g = flow::build_flow_graph(m);
    auto path = flow::reachable(g, "SS1.Demographics", "SS2.Demographics");
    require(path.has_value(), "SS1 -> SS2 demographics should be transitively reachable");
    std::vector<std::string> want{"SS1.Demographics", "SS3.Demographics", "SS2.Demographics"};
    require(*path == want, "SS1 -> SS2 path is not the length-2 route through SS3");
    std::vector<flow::FlowViolation> vs =
        flow::check_flow_log(m, {{1, "SS1.Demographics", "SS2.Demographics"}});
    require(vs.size() == 1, "a direct SS1 -> SS2 transfer must be flagged");
}

void confichair_decisions() {
    TrustDomainModel m = fixtures::model("confichair.tdm");
    const std::string pdp = "Conference.PDP";

    decisions::PolicyDecision admin =
        decisions::evaluate(m, {"Dave", "read-content", "CCS.Papers"}, pdp);
    require(admin.kind == decisions::DecisionKind::Denial, "admin read-content must be denied");
    require(admin.influenced_policy_ids == std::vector<std::string>{"P-Secrecy"},
            "admin denial must cite exactly the secrecy policy");

    decisions::PolicyDecision before =
        decisions::evaluate(m, {"Bob", "read-review", "CCS.Reviews"}, pdp);
    require(before.kind == decisions::DecisionKind::Denial,
            "read-review before own submission must be denied");
    require(before.influenced_policy_ids == std::vector<std::string>{"P-ReviewVisibility"},
            "the pre-submission denial must cite the visibility policy");

    decisions::EvalContext ctx;
    ctx.guards["own-review-submitted"] = true;
    decisions::PolicyDecision after =
        decisions::evaluate(m, {"Bob", "read-review", "CCS.Reviews"}, pdp, ctx);
    require(after.kind == decisions::DecisionKind::Permission,
            "read-review after own submission must be permitted");
    require(after.influenced_policy_ids == std::vector<std::string>{"P-ReviewVisibility"},
            "the post-submission permission must cite the visibility policy");
}

void axiom_fault_matrix() {
    using axioms::RelationSet;
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    decisions::DecisionLog empty_log;
    audit::CentralAuditStore empty_store = audit::make_store(m.central_audit_store_id);

    struct Fault {
        const char* axiom;
        bool logs;
        std::function<void(RelationSet&)> mutate;
    };
    const std::vector<Fault> faults = {
        {"AX1", false,
         [](RelationSet& rs) { rs.publishes.insert({"SS1.Agent", "P-Births.Internal-TDom"}); }},
        {"AX2", false,
         [](RelationSet& rs) {
             rs.published_policy_to.insert({"SS1.Agent", "Healthcare.Policies"});
         }},
        {"AX3", true,
         [](RelationSet& rs) {
             rs.decisions.push_back({"dx1", "Healthcare.PEP", {"P-Births.Internal-TDom"}, "SS3",
                                     "SS3.Births"});
         }},
        {"AX4", false,
         [](RelationSet& rs) { rs.establishes.insert({"SS2.Owner", "P-Births.Internal-TDom"}); }},
        {"AX5", false,
         [](RelationSet& rs) {
             rs.scope_of.erase({"P-Births.Internal-TDom", "SS3-Internal-TDom"});
             rs.scope_of.insert({"P-Births.Internal-TDom", "Nowhere"});
         }},
        {"AX6", false, [](RelationSet& rs) { rs.type_of.insert({"SS1", "System"}); }},
        {"AX7", false,
         [](RelationSet& rs) { rs.owns_asset.insert({"SS2.Owner", "SS1.Demographics"}); }},
        {"AX8", false,
         [](RelationSet& rs) { rs.owns_agent.insert({"SS2.Owner", "Healthcare.Mgmt"}); }},
        {"AX9", true, [](RelationSet& rs) { rs.messages.push_back({"mx1", "SS1", {}}); }},
        {"AX10", false,
         [](RelationSet& rs) { rs.provisioned_by.insert({"SS1.Server", "SS1.Agent"}); }},
        {"AX11", true,
         [](RelationSet& rs) {
             rs.decisions.push_back({"dx2", "Healthcare.PDP", {"P-Births.Internal-TDom"}, "MS1",
                                     "MS1.Stats"});
         }},
        {"AX12", true,
         [](RelationSet& rs) {
             rs.decisions.push_back({"dx3", "Healthcare.PDP", {"P-Births.Internal-TDom"}, "SS3",
                                     "SS3.Births"});
             rs.actions.push_back({"ax1", "dx3"});
         }},
    };
    require(faults.size() == 12, "fault matrix must cover all 12 axioms");

    for (const auto& fault : faults) {
        RelationSet rs = fault.logs ? axioms::extract_relations(m, &empty_log, &empty_store)
                                    : axioms::extract_relations(m);
        require(axioms::validate_relations(rs).violations.empty(),
                std::string(fault.axiom) + ": baseline not clean");
        fault.mutate(rs);
        axioms::ValidationReport r1 = axioms::validate_relations(rs);
        require(r1.violations.size() == 1,
                std::string(fault.axiom) + ": expected exactly one violation, got " +
                    std::to_string(r1.violations.size()));
        require(r1.violations[0].axiom_id == fault.axiom,
                std::string(fault.axiom) + ": violated " + r1.violations[0].axiom_id + " instead");
        axioms::ValidationReport r2 = axioms::validate_relations(rs);
        require(jsonio::to_json(r1).dump() == jsonio::to_json(r2).dump(),
                std::string(fault.axiom) + ": report not deterministic");
    }
}

void reachability_oracle() {
    auto started = std::chrono::steady_clock::now();
    std::mt19937 rng(1234);
    long pairs = 0;
    for (int seed = 0; seed < 200; ++seed) {
        oracle::RandomGraph rg = oracle::random_graph(rng, 20, 60);
        oracle::Closure closure(rg.n, rg.edges);
        flow::FlowGraph g;
        for (int i = 0; i < rg.n; ++i) g.nodes.insert(oracle::node_name(i));
        for (const auto& [a, b] : rg.edges)
            g.edges.insert({oracle::node_name(a), oracle::node_name(b), "p"});
        for (int i = 0; i < rg.n; ++i)
            for (int j = 0; j < rg.n; ++j) {
                bool lib = flow::reachable(g, oracle::node_name(i), oracle::node_name(j))
                               .has_value();
                if (lib != closure.reaches(i, j))
                    throw Failure("disagreement at seed " + std::to_string(seed) + " pair " +
                                  oracle::node_name(i) + " -> " + oracle::node_name(j));
                ++pairs;
            }
    }
    auto elapsed = std::chrono::steady_clock::now() - started;
    require(elapsed < std::chrono::seconds(10),
            "oracle comparison exceeded 10s over " + std::to_string(pairs) + " pairs");
}

void round_trip_fixpoint() {
    for (const char* name : {"healthcare.tdm", "confichair.tdm"}) {
        TrustDomainModel m = fixtures::model(name);
        dsl::ParseResult pr = dsl::parse(dsl::serialize(m));
        require(pr.ok(), std::string(name) + ": canonical form does not reparse");
        BuildResult built = build_model(pr.declarations);
        require(built.ok(), std::string(name) + ": canonical form does not rebuild");
        require(*built.model == m, std::string(name) + ": round-trip is not a fixpoint");
    }
    std::mt19937 rng(20240811);
    for (int i = 0; i < 100; ++i) {
        TrustDomainModel m = gen::random_model(rng);
        dsl::ParseResult pr = dsl::parse(dsl::serialize(m));
        require(pr.ok(), "random model " + std::to_string(i) + ": does not reparse");
        BuildResult built = build_model(pr.declarations);
        require(built.ok() && *built.model == m,
                "random model " + std::to_string(i) + ": round-trip is not a fixpoint");
    }
}

void evidence_integrity() {
    TrustDomainModel m = fixtures::model("confichair.tdm");
    decisions::RequestScriptParse script =
        decisions::parse_request_script(fixtures::read("confichair-requests.txt"));
    require(script.diagnostics.empty(), "request script has diagnostics");
    sim::SimulationResult r = sim::simulate(m, script.lines);

    auto [ok, bad] = audit::verify_chain(r.store);
    require(ok, "chain verification failed after the scripted run");
    require(r.store.events.size() >= 20,
            "store has " + std::to_string(r.store.events.size()) + " events, need >= 20");

    axioms::ValidationReport report = axioms::validate(r.model, &r.log, &r.store);
    require(report.violations.empty(), "axioms found violations on the run's logs");
    require(report.unchecked_axioms.empty(), "all twelve axioms must be checked");

    // Tamper property over every byte of the persisted store.
    std::string text = audit::save_store(r.store);
    std::vector<size_t> line_starts{0};
    for (size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') line_starts.push_back(i + 1);

    for (size_t pos = 0; pos < text.size(); ++pos) {
        std::string tampered = text;
        tampered[pos] ^= 0x20;
        size_t line = 0;
        while (line + 1 < line_starts.size() && line_starts[line + 1] <= pos) ++line;
        bool detected = false;
        std::optional<size_t> reported;
        try {
            audit::CentralAuditStore loaded = audit::load_store(tampered);
            auto [vok, vbad] = audit::verify_chain(loaded);
            detected = !vok;
            reported = vbad;
        } catch (const ModelError&) {
            detected = true;  // the loader rejected the corruption outright
        }
        require(detected, "byte flip at offset " + std::to_string(pos) + " went undetected");
        if (reported && line > 0)
            require(*reported == line - 1,
                    "byte flip at offset " + std::to_string(pos) + " reported event " +
                        std::to_string(*reported) + ", expected " + std::to_string(line - 1));
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 healthcare-domain-derivation", healthcare_domains},
        {"2 directionality", directionality},
        {"3 transitivity-surfacing", transitivity_surfacing},
        {"4 confichair-decisions", confichair_decisions},
        {"5 axiom-fault-injection-matrix", axiom_fault_matrix},
        {"6 reachability-oracle-equivalence", reachability_oracle},
        {"7 round-trip-fixpoint", round_trip_fixpoint},
        {"8 evidence-integrity", evidence_integrity},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto started = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            c.run();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
        std::cout << verdict << " criterion " << c.name << " (" << ms << " ms)";
        if (!detail.empty()) std::cout << " - " << detail;
        std::cout << "\n";
    }
    if (failures) std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return failures ? 1 : 0;
}
