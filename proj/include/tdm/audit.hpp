#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdm/decisions.hpp"
#include "tdm/model.hpp"

namespace tdm::audit {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

inline constexpr const char* kDigestAlgorithm = "sha-256";
// Chain anchor for an empty store: sha-256 of this literal.
inline constexpr const char* kGenesisSeed = "tdm-audit-genesis-v1";
const std::string& genesis_digest();

struct AuditEvent {
    std::string id;
    std::string emitting_control_id;
    std::string action_id;    // may be empty
    std::string decision_id;  // may be empty
    std::string event_kind;
    std::string forwarded_to;  // central store id, empty until forwarded
    std::string detail;
    bool critical = false;
    std::string chain_hash;  // digest over (previous chain hash, canonical bytes)
    bool operator==(const AuditEvent&) const = default;
};

// Canonical bytes hashed into the chain: the event as a JSON object with
// sorted field names, chain_hash excluded.
std::string canonical_event_bytes(const AuditEvent& e);

enum class EvidenceKind { AuditLog, ProvenanceRecord, IntegrityMeasurementList, DigitalCertificate };

std::string to_string(EvidenceKind k);

struct Evidence {
    EvidenceKind kind = EvidenceKind::AuditLog;
    std::string payload;
};

// Append-only, hash-chained event list. Single-writer contract: appends must
// be serialized by the caller; reads over a snapshot are free.
struct CentralAuditStore {
    std::string id;
    std::vector<AuditEvent> events;
    std::string head_hash;  // genesis_digest() while empty
    bool operator==(const CentralAuditStore&) const = default;
};

CentralAuditStore make_store(const std::string& id);

struct EventFields {
    std::string emitting_control_id;
    std::string action_id;
    std::string decision_id;
    std::string event_kind;  // see kEventKinds
    std::string detail;
    bool critical = false;
};

inline constexpr const char* kEventKinds[] = {
    "action-performed", "action-blocked", "obligation-pending", "state-validated",
    "provision",        "deprovision",    "alert",
};

// Appends one event; returns (event id, chain hash). The emitting control must
// be an audit/pep/management control or a management agent of the model.
// Throws UnknownControl.
std::pair<std::string, std::string> record_event(CentralAuditStore& store,
                                                 const TrustDomainModel& model,
                                                 const EventFields& fields);

struct ForwardResult {
    std::string event_id;
    std::optional<std::string> alert_event_id;  // set for critical events
};

// Domain audit agent path: records the event in the agent's configured
// central store and, for critical events, appends an alert naming the
// domain's management control (or agent). Throws UnknownAgent/NoCentralStore.
ForwardResult forward(CentralAuditStore& store, const TrustDomainModel& model,
                      const std::string& audit_agent_control_id, const EventFields& fields);

// Events referencing the action or decision, in chain order, as audit-log
// evidence, plus one synthesized provenance record
// (request -> decision -> influenced policies -> action). Unknown id -> empty.
std::vector<Evidence> evidence_for(const CentralAuditStore& store,
                                   const decisions::DecisionLog& log, const std::string& id);

// Recomputes the chain from genesis. Returns (true, nullopt) or
// (false, index of the first event whose stored hash does not match).
std::pair<bool, std::optional<std::size_t>> verify_chain(const CentralAuditStore& store);

// Persistence: header line naming the digest algorithm and genesis value,
// then one JSON record per event. load() round-trips bit-exactly and rejects
// malformed input with StoreFormat.
std::string save_store(const CentralAuditStore& store);
CentralAuditStore load_store(std::string_view text);

}  // namespace tdm::audit
