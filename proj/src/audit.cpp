#include "tdm/audit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <nlohmann/json.hpp>

namespace tdm::audit {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

const std::string& genesis_digest() {
    static const std::string g = sha256_hex(kGenesisSeed);
    return g;
}

std::string to_string(EvidenceKind k) {
    switch (k) {
        case EvidenceKind::AuditLog: return "audit-log";
        case EvidenceKind::ProvenanceRecord: return "provenance-record";
        case EvidenceKind::IntegrityMeasurementList: return "integrity-measurement-list";
        case EvidenceKind::DigitalCertificate: return "digital-certificate";
    }
    return "?";
}

CentralAuditStore make_store(const std::string& id) {
    return CentralAuditStore{id, {}, genesis_digest()};
}

std::string canonical_event_bytes(const AuditEvent& e) {
    // nlohmann::json objects serialize with sorted keys.
    json j{
        {"action", e.action_id},
        {"control", e.emitting_control_id},
        {"critical", e.critical},
        {"decision", e.decision_id},
        {"detail", e.detail},
        {"forwarded_to", e.forwarded_to},
        {"id", e.id},
        {"kind", e.event_kind},
    };
    return j.dump();
}

namespace {

std::string chain_digest(const std::string& previous, const AuditEvent& e) {
    return sha256_hex(previous + "\n" + canonical_event_bytes(e) + "\n");
}

bool known_event_kind(const std::string& kind) {
    for (const char* k : kEventKinds)
        if (kind == k) return true;
    return false;
}

bool may_emit(const TrustDomainModel& model, const std::string& id) {
    if (const Control* c = model.find_control(id)) {
        return c->kind == ControlKind::DomainAuditAgent ||
               c->kind == ControlKind::PolicyEnforcementPoint ||
               c->kind == ControlKind::DomainManagementAgent;
    }
    if (const Agent* a = model.find_agent(id)) return a->kind == AgentKind::DomainManagementAgent;
    return false;
}

AuditEvent& append_event(CentralAuditStore& store, const EventFields& fields) {
    AuditEvent e;
    e.id = "e" + std::to_string(store.events.size() + 1);
    e.emitting_control_id = fields.emitting_control_id;
    e.action_id = fields.action_id;
    e.decision_id = fields.decision_id;
    e.event_kind = fields.event_kind;
    e.detail = fields.detail;
    e.critical = fields.critical;
    e.forwarded_to = store.id;
    e.chain_hash = chain_digest(store.head_hash, e);
    store.head_hash = e.chain_hash;
    store.events.push_back(std::move(e));
    return store.events.back();
}

}  // namespace

std::pair<std::string, std::string> record_event(CentralAuditStore& store,
                                                 const TrustDomainModel& model,
                                                 const EventFields& fields) {
    if (!may_emit(model, fields.emitting_control_id))
        throw ModelError(Errc::UnknownControl,
                         "'" + fields.emitting_control_id +
                             "' is not an audit/enforcement/management control of the model");
    if (!known_event_kind(fields.event_kind))
        throw ModelError(Errc::StoreFormat, "unknown event kind '" + fields.event_kind + "'");
    AuditEvent& e = append_event(store, fields);
    return {e.id, e.chain_hash};
}

ForwardResult forward(CentralAuditStore& store, const TrustDomainModel& model,
                      const std::string& audit_agent_control_id, const EventFields& fields) {
    const Control* agent = model.find_control(audit_agent_control_id);
    if (!agent || agent->kind != ControlKind::DomainAuditAgent)
        throw ModelError(Errc::UnknownAgent,
                         "'" + audit_agent_control_id + "' is not a domain audit agent");
    if (!agent->central_store_id)
        throw ModelError(Errc::NoCentralStore,
                         "audit agent '" + audit_agent_control_id + "' has no central store");
    if (*agent->central_store_id != store.id)
        throw ModelError(Errc::NoCentralStore, "audit agent '" + audit_agent_control_id +
                                                   "' forwards to '" + *agent->central_store_id +
                                                   "', not '" + store.id + "'");

    auto [event_id, hash] = record_event(store, model, fields);
    ForwardResult out{event_id, std::nullopt};
    if (!fields.critical) return out;

    // Critical events alert the domain's management agent: prefer the
    // management control in the audit agent's domain, else any management
    // agent of the model.
    std::string target;
    for (const auto& [cid, c] : model.controls)
        if (c.kind == ControlKind::DomainManagementAgent && c.domain_id == agent->domain_id) {
            target = cid;
            break;
        }
    if (target.empty())
        for (const auto& [aid, a] : model.agents)
            if (a.kind == AgentKind::DomainManagementAgent) {
                target = aid;
                break;
            }
    EventFields alert;
    alert.emitting_control_id = audit_agent_control_id;
    alert.action_id = fields.action_id;
    alert.decision_id = fields.decision_id;
    alert.event_kind = "alert";
    alert.detail = "critical " + fields.event_kind + (target.empty() ? "" : " alerts " + target);
    alert.critical = false;
    AuditEvent& e = append_event(store, alert);
    out.alert_event_id = e.id;
    return out;
}

std::vector<Evidence> evidence_for(const CentralAuditStore& store,
                                   const decisions::DecisionLog& log, const std::string& id) {
    const decisions::Action* action = log.find_action(id);
    const decisions::PolicyDecision* decision =
        action ? log.find_decision(action->decision_id) : log.find_decision(id);
    std::string action_id = action ? action->id : "";
    if (!action && decision) {
        for (const auto& a : log.actions)
            if (a.decision_id == decision->id) {
                action = &a;
                action_id = a.id;
                break;
            }
    }
    std::string decision_id = decision ? decision->id : "";

    std::vector<Evidence> out;
    for (const auto& e : store.events) {
        bool refs = (!e.action_id.empty() && (e.action_id == id || e.action_id == action_id)) ||
                    (!e.decision_id.empty() &&
                     (e.decision_id == id || (!decision_id.empty() && e.decision_id == decision_id)));
        if (refs) out.push_back({EvidenceKind::AuditLog, canonical_event_bytes(e)});
    }
    if (out.empty() && !decision) return out;

    json prov{
        {"request",
         {{"requester", decision ? decision->request.requester_entity_id : ""},
          {"action_kind", decision ? decision->request.action_kind : ""},
          {"target", decision ? decision->request.target_asset_id : ""}}},
        {"decision", decision_id},
        {"decision_kind", decision ? decisions::to_string(decision->kind) : ""},
        {"pdp", decision ? decision->created_by_pdp_id : ""},
        {"policies", decision ? decision->influenced_policy_ids : std::vector<std::string>{}},
        {"action", action_id},
    };
    out.push_back({EvidenceKind::ProvenanceRecord, prov.dump()});
    return out;
}

std::pair<bool, std::optional<std::size_t>> verify_chain(const CentralAuditStore& store) {
    std::string prev = genesis_digest();
    for (std::size_t i = 0; i < store.events.size(); ++i) {
        if (chain_digest(prev, store.events[i]) != store.events[i].chain_hash)
            return {false, i};
        prev = store.events[i].chain_hash;
    }
    if (store.head_hash != prev) return {false, store.events.empty() ? 0 : store.events.size() - 1};
    return {true, std::nullopt};
}

std::string save_store(const CentralAuditStore& store) {
    std::string out = std::string("tdm-audit-store v1 algo=") + kDigestAlgorithm +
                      " genesis=" + genesis_digest() + " id=" + store.id + "\n";
    for (const auto& e : store.events) {
        json j{
            {"action", e.action_id},
            {"control", e.emitting_control_id},
            {"critical", e.critical},
            {"decision", e.decision_id},
            {"detail", e.detail},
            {"forwarded_to", e.forwarded_to},
            {"hash", e.chain_hash},
            {"id", e.id},
            {"kind", e.event_kind},
        };
        out += j.dump() + "\n";
    }
    return out;
}

namespace {

[[noreturn]] void bad_store(const std::string& what) {
    throw ModelError(Errc::StoreFormat, what);
}

bool is_hex256(const std::string& s) {
    if (s.size() != 64) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

}  // namespace

CentralAuditStore load_store(std::string_view text) {
    size_t nl = text.find('\n');
    if (nl == std::string_view::npos) bad_store("missing header line");
    std::string header(text.substr(0, nl));
    const std::string prefix =
        std::string("tdm-audit-store v1 algo=") + kDigestAlgorithm + " genesis=";
    if (header.rfind(prefix, 0) != 0) bad_store("bad header");
    std::string rest = header.substr(prefix.size());
    size_t sp = rest.find(' ');
    if (sp == std::string::npos || rest.substr(0, sp) != genesis_digest())
        bad_store("genesis digest mismatch");
    std::string id_part = rest.substr(sp + 1);
    if (id_part.rfind("id=", 0) != 0) bad_store("bad header");
    CentralAuditStore store = make_store(id_part.substr(3));

    size_t pos = nl + 1;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) bad_store("missing trailing newline");
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) bad_store("empty record line");
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) bad_store("unparseable record");
        static const char* required[] = {"action",       "control", "critical", "decision",
                                         "detail",       "forwarded_to", "hash", "id",
                                         "kind"};
        if (j.size() != std::size(required)) bad_store("unexpected record fields");
        for (const char* k : required)
            if (!j.contains(k)) bad_store(std::string("record missing field '") + k + "'");
        if (!j["critical"].is_boolean()) bad_store("record field 'critical' must be boolean");
        for (const char* k : {"action", "control", "decision", "detail", "forwarded_to", "hash",
                              "id", "kind"})
            if (!j[k].is_string()) bad_store(std::string("record field '") + k + "' must be string");
        AuditEvent e;
        e.action_id = j["action"].get<std::string>();
        e.emitting_control_id = j["control"].get<std::string>();
        e.critical = j["critical"].get<bool>();
        e.decision_id = j["decision"].get<std::string>();
        e.detail = j["detail"].get<std::string>();
        e.forwarded_to = j["forwarded_to"].get<std::string>();
        e.chain_hash = j["hash"].get<std::string>();
        e.id = j["id"].get<std::string>();
        e.event_kind = j["kind"].get<std::string>();
        if (!is_hex256(e.chain_hash)) bad_store("record hash is not a sha-256 hex digest");
        if (e.forwarded_to != store.id)
            bad_store("event '" + e.id + "' was forwarded to '" + e.forwarded_to +
                      "', not this store");
        store.head_hash = e.chain_hash;
        store.events.push_back(std::move(e));
    }
    return store;
}

}  // namespace tdm::audit
