#include "tdm/flow.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace tdm::flow {

bool FlowGraph::has_edge(const std::string& src, const std::string& dst) const {
    auto it = edges.lower_bound(FlowEdge{src, dst, ""});
    return it != edges.end() && it->source == src && it->dest == dst;
}

std::vector<std::string> FlowGraph::successors(const std::string& id) const {
    std::vector<std::string> out;
    for (auto it = edges.lower_bound(FlowEdge{id, "", ""}); it != edges.end() && it->source == id;
         ++it)
        if (out.empty() || out.back() != it->dest) out.push_back(it->dest);
    return out;
}

std::string to_string(DirectionProfile p) {
    switch (p) {
        case DirectionProfile::Bidirectional: return "bidirectional";
        case DirectionProfile::OneDirectional: return "one-directional";
        case DirectionProfile::Mixed: return "mixed";
    }
    return "?";
}

FlowGraph build_flow_graph(const TrustDomainModel& model) {
    FlowGraph g;
    for (const auto& [id, a] : model.assets)
        if (a.asset_type == AssetType::Data) g.nodes.insert(id);
    for (const auto& [pid, p] : model.policies) {
        for (const auto& r : p.rules) {
            if (!r.is_flow()) continue;
            const FlowRule& f = r.flow();
            g.edges.insert({f.source_asset_id, f.dest_asset_id, pid});
            if (f.direction == FlowDirection::Bi)
                g.edges.insert({f.dest_asset_id, f.source_asset_id, pid});
        }
    }
    return g;
}

namespace {

std::string owner_abbrev(const std::string& role_id) {
    size_t dot = role_id.find('.');
    return dot == std::string::npos ? role_id : role_id.substr(0, dot);
}

std::string policy_tag(const std::string& policy_id) {
    size_t dot = policy_id.rfind('.');
    return dot == std::string::npos ? "" : policy_id.substr(dot + 1);
}

std::set<std::string> dash_parts(const std::string& s) {
    std::set<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t dash = s.find('-', start);
        out.insert(s.substr(start, dash == std::string::npos ? std::string::npos : dash - start));
        if (dash == std::string::npos) break;
        start = dash + 1;
    }
    return out;
}

}  // namespace

std::string derived_domain_name(const TrustDomainModel& model, const Policy& policy) {
    std::set<std::string> owners;
    for (const auto& r : policy.rules) {
        if (!r.is_flow()) continue;
        const FlowRule& f = r.flow();
        for (const std::string* ep : {&f.source_asset_id, &f.dest_asset_id})
            if (const Asset* a = model.find_asset(*ep)) owners.insert(owner_abbrev(a->owner_role_id));
    }
    std::string tag = policy_tag(policy.id);
    std::set<std::string> tagged = dash_parts(tag);
    std::string name;
    for (const auto& o : owners) {
        if (!tag.empty() && tagged.count(o)) continue;
        if (!name.empty()) name += "-";
        name += o;
    }
    if (!tag.empty()) {
        if (!name.empty()) name += "-";
        name += tag;
    }
    return name;
}

std::vector<DerivedDomain> derive_trust_domains(const TrustDomainModel& model) {
    std::vector<DerivedDomain> out;
    for (const auto& [pid, p] : model.policies) {
        DerivedDomain d;
        bool any_flow = false;
        bool any_uni = false;
        bool any_bi = false;
        for (const auto& r : p.rules) {
            if (!r.is_flow()) continue;
            any_flow = true;
            const FlowRule& f = r.flow();
            (f.direction == FlowDirection::Bi ? any_bi : any_uni) = true;
            d.member_store_ids.insert(f.source_asset_id);
            d.member_store_ids.insert(f.dest_asset_id);
        }
        if (!any_flow) continue;
        for (const auto& store : d.member_store_ids)
            if (const Asset* a = model.find_asset(store)) {
                auto holders = model.entities_with_role(a->owner_role_id);
                d.member_entity_ids.insert(holders.begin(), holders.end());
            }
        d.generating_policy_ids.insert(pid);
        d.direction_profile = any_uni && any_bi ? DirectionProfile::Mixed
                              : any_bi         ? DirectionProfile::Bidirectional
                                               : DirectionProfile::OneDirectional;
        d.name = derived_domain_name(model, p);
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(),
              [](const DerivedDomain& a, const DerivedDomain& b) { return a.name < b.name; });
    return out;
}

std::optional<std::vector<std::string>> reachable(const FlowGraph& graph, const std::string& src,
                                                  const std::string& dst) {
    for (const std::string* ep : {&src, &dst})
        if (!graph.has_node(*ep))
            throw ModelError(Errc::UnknownNode, "'" + *ep + "' is not a flow-graph node");
    if (src == dst) return std::vector<std::string>{src};

    // Distances from src and to dst, then a greedy walk that keeps to shortest
    // paths and picks the smallest node id at every step. That yields the
    // lexicographically least shortest path.
    auto bfs = [&graph](const std::string& origin, bool forward) {
        std::map<std::string, int> dist{{origin, 0}};
        std::deque<std::string> q{origin};
        std::map<std::string, std::vector<std::string>> pred;
        if (!forward) {
            for (const auto& e : graph.edges) pred[e.dest].push_back(e.source);
        }
        while (!q.empty()) {
            std::string cur = q.front();
            q.pop_front();
            std::vector<std::string> next =
                forward ? graph.successors(cur) : pred[cur];
            for (const auto& n : next)
                if (dist.emplace(n, dist[cur] + 1).second) q.push_back(n);
        }
        return dist;
    };
    std::map<std::string, int> from_src = bfs(src, true);
    auto it = from_src.find(dst);
    if (it == from_src.end()) return std::nullopt;
    int total = it->second;
    std::map<std::string, int> to_dst = bfs(dst, false);

    std::vector<std::string> path{src};
    std::string cur = src;
    for (int step = 0; step < total; ++step) {
        for (const auto& n : graph.successors(cur)) {  // sorted; first fit is least
            auto fs = from_src.find(n);
            auto td = to_dst.find(n);
            if (fs != from_src.end() && fs->second == step + 1 && td != to_dst.end() &&
                td->second == total - step - 1) {
                path.push_back(n);
                cur = n;
                break;
            }
        }
    }
    return path;
}

std::vector<FlowViolation> check_flow_log(const TrustDomainModel& model,
                                          const std::vector<FlowEvent>& events) {
    FlowGraph g = build_flow_graph(model);
    std::vector<FlowViolation> out;
    for (const auto& ev : events) {
        if (!g.has_node(ev.source_store_id) || !g.has_node(ev.dest_store_id)) {
            const std::string& missing =
                g.has_node(ev.source_store_id) ? ev.dest_store_id : ev.source_store_id;
            out.push_back({ev, "'" + missing + "' is not a Data asset of the model", {}});
            continue;
        }
        if (g.has_edge(ev.source_store_id, ev.dest_store_id)) continue;
        FlowViolation v;
        v.event = ev;
        // Policies that mention both endpoints licensed only the other
        // direction; name them so the report points at the broken agreement.
        std::set<std::string> related;
        for (const auto& e : g.edges)
            if (e.source == ev.dest_store_id && e.dest == ev.source_store_id)
                related.insert(e.policy_id);
        v.related_policy_ids.assign(related.begin(), related.end());
        v.note = related.empty() ? "no policy agreement covers this transfer"
                                 : "transfer runs against the agreed direction";
        out.push_back(std::move(v));
    }
    return out;
}

std::string to_dot(const FlowGraph& graph) {
    std::string out = "digraph flows {\n";
    for (const auto& n : graph.nodes) out += "  \"" + n + "\";\n";
    for (const auto& e : graph.edges)
        out += "  \"" + e.source + "\" -> \"" + e.dest + "\" [label=\"" + e.policy_id + "\"];\n";
    out += "}\n";
    return out;
}

FlowLogParse parse_flow_log(std::string_view text) {
    FlowLogParse out;
    int lineno = 0;
    size_t pos = 0;
    long last_seq = -1;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                       : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::string kw1, kw2, src, arrow, dst;
        long seq = 0;
        if (!(is >> kw1)) continue;  // blank
        SourceSpan span{lineno, 1, static_cast<int>(line.size()) + 1};
        if (kw1 != "seq" || !(is >> seq >> kw2 >> src >> arrow >> dst) || kw2 != "flow" ||
            arrow != "->") {
            out.diagnostics.push_back(
                {dsl::Severity::Error, "expected 'seq <n> flow <SRC> -> <DST>'", span});
            continue;
        }
        std::string extra;
        if (is >> extra) {
            out.diagnostics.push_back(
                {dsl::Severity::Error, "unexpected trailing token '" + extra + "'", span});
            continue;
        }
        if (seq <= last_seq)
            out.diagnostics.push_back({dsl::Severity::Warning,
                                       "sequence number " + std::to_string(seq) + " not monotone",
                                       span});
        last_seq = seq;
        out.events.push_back({seq, src, dst});
    }
    return out;
}

std::string format_flow_log(const std::vector<FlowEvent>& events) {
    std::string out;
    for (const auto& e : events)
        out += "seq " + std::to_string(e.seq) + " flow " + e.source_store_id + " -> " +
               e.dest_store_id + "\n";
    return out;
}

}  // namespace tdm::flow
