#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tdm/dsl.hpp"
#include "tdm/model.hpp"

namespace tdm::flow {

struct FlowEdge {
    std::string source;
    std::string dest;
    std::string policy_id;
    auto operator<=>(const FlowEdge&) const = default;
};

// Directed data-flow graph over Data assets. A bidirectional rule contributes
// exactly two directed edges; assets untouched by any flow rule are isolated
// nodes.
struct FlowGraph {
    std::set<std::string> nodes;
    std::set<FlowEdge> edges;

    bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
    bool has_edge(const std::string& src, const std::string& dst) const;
    std::vector<std::string> successors(const std::string& id) const;  // sorted, deduplicated
};

enum class DirectionProfile { Bidirectional, OneDirectional, Mixed };

std::string to_string(DirectionProfile p);

// Trust domain induced by one policy's flow agreements: the endpoint stores,
// the entities holding the stores' owner roles, and the direction character.
struct DerivedDomain {
    std::string name;
    std::set<std::string> member_store_ids;
    std::set<std::string> member_entity_ids;
    std::set<std::string> generating_policy_ids;
    DirectionProfile direction_profile = DirectionProfile::Bidirectional;
    bool operator==(const DerivedDomain&) const = default;
};

struct FlowEvent {
    long seq = 0;
    std::string source_store_id;
    std::string dest_store_id;
    bool operator==(const FlowEvent&) const = default;
};

struct FlowViolation {
    FlowEvent event;
    std::string note;
    std::vector<std::string> related_policy_ids;  // policies mentioning both endpoints
};

FlowGraph build_flow_graph(const TrustDomainModel& model);

// One derived domain per policy containing at least one flow rule, sorted by
// name. The name lists the stores' owner-role abbreviations (first dotted
// segment) in lexicographic order; a policy id's final dotted segment, when
// present, is appended as a tag, and owners the tag already names are not
// repeated.
std::vector<DerivedDomain> derive_trust_domains(const TrustDomainModel& model);

std::string derived_domain_name(const TrustDomainModel& model, const Policy& policy);

// Shortest directed path from src to dst, ties broken toward the
// lexicographically smallest node sequence; reachable(x, x) = [x].
// Throws UnknownNode when either endpoint is not in the graph.
std::optional<std::vector<std::string>> reachable(const FlowGraph& graph, const std::string& src,
                                                  const std::string& dst);

// Flags every event whose (source, dest) is not a direct edge. Transitive
// paths do not license a direct transfer.
std::vector<FlowViolation> check_flow_log(const TrustDomainModel& model,
                                          const std::vector<FlowEvent>& events);

std::string to_dot(const FlowGraph& graph);

struct FlowLogParse {
    std::vector<FlowEvent> events;
    std::vector<dsl::Diagnostic> diagnostics;
};

// Line format: `seq <n> flow <SRC> -> <DST>`; `#` comments and blank lines
// are ignored. Non-monotone sequence numbers get a warning.
FlowLogParse parse_flow_log(std::string_view text);

std::string format_flow_log(const std::vector<FlowEvent>& events);

}  // namespace tdm::flow
