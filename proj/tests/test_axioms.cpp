#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "support/fixtures.hpp"
#include "support/genmodel.hpp"
#include "tdm/axioms.hpp"
#include "tdm/jsonio.hpp"

using namespace tdm;
using axioms::RelationSet;

namespace {

// One single-fault mutation per axiom. Relation-level faults mutate the
// extracted tables; log-level faults (AX3, AX9, AX11, AX12) inject one bad
// record into otherwise clean logs.
struct Fault {
    std::string axiom;
    std::function<void(RelationSet&)> mutate;
};

const std::vector<Fault>& fault_matrix() {
    static const std::vector<Fault> faults = {
        // P-Births is published but not stored, so a second publisher trips
        // only the uniqueness axiom.
        {"AX1", [](RelationSet& rs) { rs.publishes.insert({"SS1.Agent", "P-Births.Internal-TDom"}); }},
        {"AX2", [](RelationSet& rs) { rs.published_policy_to.insert({"SS1.Agent", "Healthcare.Policies"}); }},
        {"AX3",
         [](RelationSet& rs) {
             // Influenced pair whose creator is an enforcement point, not a PDP.
             rs.decisions.push_back({"dx1", "Healthcare.PEP", {"P-Births.Internal-TDom"}, "SS3",
                                     "SS3.Births"});
         }},
        {"AX4", [](RelationSet& rs) { rs.establishes.insert({"SS2.Owner", "P-Births.Internal-TDom"}); }},
        {"AX5",
         [](RelationSet& rs) {
             rs.scope_of.erase({"P-Births.Internal-TDom", "SS3-Internal-TDom"});
             rs.scope_of.insert({"P-Births.Internal-TDom", "Nowhere"});
         }},
        {"AX6", [](RelationSet& rs) { rs.type_of.insert({"SS1", "System"}); }},
        {"AX7", [](RelationSet& rs) { rs.owns_asset.insert({"SS2.Owner", "SS1.Demographics"}); }},
        {"AX8", [](RelationSet& rs) { rs.owns_agent.insert({"SS2.Owner", "Healthcare.Mgmt"}); }},
        {"AX9", [](RelationSet& rs) { rs.messages.push_back({"mx1", "SS1", {}}); }},
        {"AX10", [](RelationSet& rs) { rs.provisioned_by.insert({"SS1.Server", "SS1.Agent"}); }},
        {"AX11",
         [](RelationSet& rs) {
             // Valid PDP and policy, but the scope domain (SS3-Internal-TDom)
             // contains neither the requester nor an owner of the target.
             rs.decisions.push_back({"dx2", "Healthcare.PDP", {"P-Births.Internal-TDom"}, "MS1",
                                     "MS1.Stats"});
         }},
        {"AX12",
         [](RelationSet& rs) {
             rs.decisions.push_back({"dx3", "Healthcare.PDP", {"P-Births.Internal-TDom"}, "SS3",
                                     "SS3.Births"});
             rs.actions.push_back({"ax1", "dx3"});
         }},
    };
    return faults;
}

bool needs_logs(const std::string& axiom) {
    return axiom == "AX3" || axiom == "AX9" || axiom == "AX11" || axiom == "AX12";
}

}  // namespace

TEST_CASE("catalog: twelve axioms, unique ids, citations") {
    const auto& catalog = axioms::axiom_catalog();
    CHECK(catalog.size() == 12);
    std::set<std::string> ids;
    for (const auto& ax : catalog) {
        CHECK(ids.insert(ax.id).second);
        CHECK(!ax.description.empty());
        CHECK(!ax.citation.empty());
    }
    CHECK(axioms::axiom("AX1").citation.find("publishes") != std::string::npos);
    CHECK(axioms::axiom("AX5").citation.find("scopeOf") != std::string::npos);
    CHECK_THROWS_AS(static_cast<void>(axioms::axiom("AX13")), ModelError);
}

TEST_CASE("clean fixtures validate: zero violations, nine axioms checked without logs") {
    for (const char* name : {"healthcare.tdm", "confichair.tdm"}) {
        CAPTURE(name);
        axioms::ValidationReport r = axioms::validate(fixtures::model(name));
        CHECK(r.violations.empty());
        CHECK(r.checked_axioms.size() == 9);
        CHECK(r.unchecked_axioms == std::vector<std::string>{"AX3", "AX11", "AX12"});
    }
}

TEST_CASE("fault-injection matrix: each single fault violates exactly its axiom") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    decisions::DecisionLog empty_log;
    audit::CentralAuditStore empty_store = audit::make_store(m.central_audit_store_id);

    for (const auto& fault : fault_matrix()) {
        CAPTURE(fault.axiom);
        RelationSet rs = needs_logs(fault.axiom)
                             ? axioms::extract_relations(m, &empty_log, &empty_store)
                             : axioms::extract_relations(m);
        // The baseline must be clean, otherwise the fault is not the cause.
        CHECK(axioms::validate_relations(rs).violations.empty());
        fault.mutate(rs);
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == fault.axiom);
    }
}

TEST_CASE("AX1 violation lists both publishing agents") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    RelationSet rs = axioms::extract_relations(m);
    rs.publishes.insert({"SS1.Agent", "P-Births.Internal-TDom"});
    axioms::ValidationReport r = axioms::validate_relations(rs);
    REQUIRE(r.violations.size() == 1);
    const auto& ids = r.violations[0].offending_element_ids;
    CHECK(std::count(ids.begin(), ids.end(), "Healthcare.Mgmt") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "SS1.Agent") == 1);
}

TEST_CASE("AX3: a decision influenced by a policy nothing consumed") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    decisions::DecisionLog log;
    decisions::PolicyDecision d;
    d.id = "d1";
    d.kind = decisions::DecisionKind::Permission;
    d.influenced_policy_ids = {"P-Ghost"};  // not a policy of the model
    d.created_by_pdp_id = "Healthcare.PDP";
    d.request = {"SS3", "read", "SS3.Births"};
    log.decisions.push_back(d);
    std::vector<axioms::AxiomViolation> vs = axioms::check_axiom(m, "AX3", &log);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].offending_element_ids == std::vector<std::string>{"d1", "P-Ghost"});
}

TEST_CASE("AX6 is vacuously satisfied on built models") {
    CHECK(axioms::check_axiom(fixtures::model("healthcare.tdm"), "AX6").empty());
}

TEST_CASE("AX9 flags a message with zero receivers") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    decisions::DecisionLog log;
    log.messages.push_back({"m1", "SS1", {}, "local", std::nullopt, {}});
    std::vector<axioms::AxiomViolation> vs = axioms::check_axiom(m, "AX9", &log);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].offending_element_ids == std::vector<std::string>{"m1"});
}

TEST_CASE("check_axiom over all ids concatenates to validate().violations") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    decisions::DecisionLog log;
    log.messages.push_back({"m1", "", {}, "local", std::nullopt, {}});  // AX9 twice over
    log.decisions.push_back({"d1", decisions::DecisionKind::Permission, {"P-Ghost"}, {},
                             "Healthcare.PEP", std::nullopt, {"SS3", "read", "SS3.Births"}});
    audit::CentralAuditStore store = audit::make_store(m.central_audit_store_id);
    axioms::ValidationReport whole = axioms::validate(m, &log, &store);
    std::vector<axioms::AxiomViolation> collected;
    for (const auto& ax : axioms::axiom_catalog())
        for (auto& v : axioms::check_axiom(m, ax.id, &log, &store)) collected.push_back(v);
    CHECK(collected == whole.violations);
    CHECK(whole.violations.size() >= 3);
}

TEST_CASE("monotonicity: adding unrelated well-formed elements keeps a clean report") {
    std::string base = fixtures::read("healthcare.tdm");
    std::string extended = base +
                           "domain Annex\n"
                           "role Annex.Owner\n"
                           "entity Annex.Clinic : Organization in Annex role Annex.Owner\n"
                           "asset Annex.Records : Data owner Annex.Owner\n";
    dsl::ParseResult pr = dsl::parse(extended);
    REQUIRE(pr.ok());
    axioms::ValidationReport r = axioms::validate(*build_model(pr.declarations).model);
    CHECK(r.violations.empty());
}

TEST_CASE("reports are deterministic down to the serialized bytes") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");
    RelationSet rs = axioms::extract_relations(m);
    rs.type_of.insert({"SS1", "System"});
    rs.owns_asset.insert({"SS2.Owner", "SS1.Demographics"});
    rs.publishes.insert({"SS1.Agent", "P-Births.Internal-TDom"});
    std::string a = nlohmann::json(jsonio::to_json(axioms::validate_relations(rs))).dump();
    std::string b = nlohmann::json(jsonio::to_json(axioms::validate_relations(rs))).dump();
    CHECK(a == b);
    // Ordered by axiom index: AX1 before AX6 before AX7.
    axioms::ValidationReport r = axioms::validate_relations(rs);
    REQUIRE(r.violations.size() == 3);
    CHECK(r.violations[0].axiom_id == "AX1");
    CHECK(r.violations[1].axiom_id == "AX6");
    CHECK(r.violations[2].axiom_id == "AX7");
}

TEST_CASE("axiom edge paths: missing pairs and multiplicity in either direction") {
    TrustDomainModel m = fixtures::model("healthcare.tdm");

    SUBCASE("AX2 flags a derived pair the stored relation omits") {
        RelationSet rs = axioms::extract_relations(m);
        REQUIRE(!rs.published_policy_to.empty());
        rs.published_policy_to.clear();
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == "AX2");
        CHECK(r.violations[0].explanation.find("omits") != std::string::npos);
    }
    SUBCASE("AX4 flags a policy with no establishing role") {
        RelationSet rs = axioms::extract_relations(m);
        rs.establishes.erase({"SS3.Owner", "P-Births.Internal-TDom"});
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == "AX4");
        CHECK(r.violations[0].explanation.find("no establishing role") != std::string::npos);
    }
    SUBCASE("AX5 flags a policy scoping two domains") {
        RelationSet rs = axioms::extract_relations(m);
        rs.scope_of.insert({"P-Births.Internal-TDom", "Healthcare"});
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == "AX5");
        CHECK(r.violations[0].explanation.find("2 domains") != std::string::npos);
    }
    SUBCASE("AX7 flags an orphaned asset") {
        RelationSet rs = axioms::extract_relations(m);
        rs.owns_asset.erase({"SS3.Owner", "SS3.Births"});
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == "AX7");
        CHECK(r.violations[0].explanation.find("0 roles") != std::string::npos);
    }
    SUBCASE("AX10 flags a provisioned element that is not a Resource asset") {
        RelationSet rs = axioms::extract_relations(m);
        rs.provisioned_by.insert({"SS1.Demographics", "Healthcare.Mgmt"});
        axioms::ValidationReport r = axioms::validate_relations(rs);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].axiom_id == "AX10");
        CHECK(r.violations[0].explanation.find("not a Resource asset") != std::string::npos);
    }
}

TEST_CASE("random clean models stay violation-free") {
    std::mt19937 rng(31337);
    for (int i = 0; i < 40; ++i) {
        TrustDomainModel m = gen::random_model(rng);
        axioms::ValidationReport r = axioms::validate(m);
        CAPTURE(dsl::serialize(m));
        CHECK(r.violations.empty());
    }
}
