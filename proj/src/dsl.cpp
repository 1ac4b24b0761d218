#include "tdm/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tdm::dsl {

namespace {

struct Token {
    std::string text;
    int col = 0;  // 1-based
};

std::vector<Token> lex_line(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

struct LineCursor {
    const std::vector<Token>& toks;
    int line;
    size_t pos = 0;
    std::vector<Diagnostic>* diags;
    bool failed = false;

    bool done() const { return pos >= toks.size(); }

    SourceSpan here() const {
        if (done()) {
            int end = toks.empty() ? 1 : toks.back().col + static_cast<int>(toks.back().text.size());
            return {line, end, end};
        }
        const Token& t = toks[pos];
        return {line, t.col, t.col + static_cast<int>(t.text.size())};
    }

    void error(const std::string& msg) {
        if (!failed) diags->push_back({Severity::Error, msg, here()});
        failed = true;
    }

    // Next token as-is, or fail.
    std::string next(const std::string& what) {
        if (failed) return "";
        if (done()) {
            error("expected " + what);
            return "";
        }
        return toks[pos++].text;
    }

    std::string identifier(const std::string& what) {
        std::string t = next(what);
        if (!failed && !is_valid_identifier(t)) error("invalid identifier '" + t + "'");
        return t;
    }

    // Identifier or the "*" wildcard.
    std::string selector(const std::string& what) {
        std::string t = next(what);
        if (!failed && t != kWildcard && !is_valid_identifier(t))
            error("invalid identifier '" + t + "'");
        return t;
    }

    void keyword(const std::string& kw) {
        if (failed) return;
        if (done() || toks[pos].text != kw) {
            error("expected '" + kw + "'");
            return;
        }
        ++pos;
    }

    bool peek_is(const std::string& kw) const { return !done() && toks[pos].text == kw; }

    bool accept(const std::string& kw) {
        if (peek_is(kw)) {
            ++pos;
            return true;
        }
        return false;
    }

    // Comma-separated identifier list; accepts "A,B" and "A, B".
    std::vector<std::string> id_list(const std::string& what) {
        std::string joined = next(what);
        if (failed) return {};
        while (!joined.empty() && joined.back() == ',' && !done()) joined += toks[pos++].text;
        std::vector<std::string> out;
        size_t start = 0;
        while (start <= joined.size()) {
            size_t comma = joined.find(',', start);
            std::string part = joined.substr(start, comma == std::string::npos ? std::string::npos
                                                                               : comma - start);
            if (part.empty())
                error("empty element in list");
            else if (!is_valid_identifier(part))
                error("invalid identifier '" + part + "'");
            out.push_back(part);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    void end_of_line() {
        if (!failed && !done()) error("unexpected trailing token '" + toks[pos].text + "'");
    }
};

SourceSpan line_span(const std::vector<Token>& toks, int line) {
    if (toks.empty()) return {line, 1, 1};
    return {line, toks.front().col, toks.back().col + static_cast<int>(toks.back().text.size())};
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ParseResult run() {
        std::vector<std::string> lines;
        std::string cur;
        for (char c : text_) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) lines.push_back(cur);

        for (size_t i = 0; i < lines.size(); ++i) {
            std::string& line = lines[i];
            if (!line.empty() && line.back() == '\r') line.pop_back();
            parse_line(line, static_cast<int>(i) + 1);
        }
        if (in_policy_) {
            result_.diagnostics.push_back(
                {Severity::Error, "unterminated policy body for '" + policy_.id + "'",
                 policy_.span});
        }

        // Fold structural analysis into the diagnostics so diagnostics() tells
        // the whole story. Skipped while syntax errors are present (their
        // declarations are incomplete).
        if (result_.ok()) {
            BuildResult built = build_model(result_.declarations);
            for (const auto& e : built.errors)
                result_.diagnostics.push_back({Severity::Error, e.message, e.span});
        }
        return std::move(result_);
    }

private:
    std::string_view text_;
    ParseResult result_;
    bool in_policy_ = false;
    PolicyDecl policy_;

    void diag(const SourceSpan& span, const std::string& msg) {
        result_.diagnostics.push_back({Severity::Error, msg, span});
    }

    void parse_line(const std::string& raw, int lineno) {
        std::vector<Token> toks = lex_line(raw);
        if (toks.empty()) return;
        LineCursor c{toks, lineno, 0, &result_.diagnostics};

        if (in_policy_) {
            parse_policy_line(c, toks);
            return;
        }

        std::string head = c.next("declaration");
        if (head == "model") {
            ModelDecl d{c.identifier("model name"), line_span(toks, lineno)};
            c.end_of_line();
            if (!c.failed) result_.declarations.emplace_back(std::move(d));
        } else if (head == "audit-store") {
            AuditStoreDecl d{c.identifier("store id"), line_span(toks, lineno)};
            c.end_of_line();
            if (!c.failed) result_.declarations.emplace_back(std::move(d));
        } else if (head == "domain") {
            DomainDecl d{c.identifier("domain id"), line_span(toks, lineno)};
            c.end_of_line();
            if (!c.failed) result_.declarations.emplace_back(std::move(d));
        } else if (head == "role") {
            RoleDecl d{c.identifier("role id"), line_span(toks, lineno)};
            c.end_of_line();
            if (!c.failed) result_.declarations.emplace_back(std::move(d));
        } else if (head == "entity") {
            parse_entity(c, toks);
        } else if (head == "agent") {
            parse_agent(c, toks);
        } else if (head == "asset") {
            parse_asset(c, toks);
        } else if (head == "control") {
            parse_control(c, toks);
        } else if (head == "store") {
            StoreDecl d;
            d.id = c.identifier("store id");
            c.keyword("in");
            d.domain = c.identifier("domain id");
            d.span = line_span(toks, lineno);
            c.end_of_line();
            if (!c.failed) result_.declarations.emplace_back(std::move(d));
        } else if (head == "policy") {
            parse_policy_header(c, toks);
        } else {
            c.pos = 0;
            c.error("unknown declaration '" + head + "'");
        }
    }

    void parse_entity(LineCursor& c, const std::vector<Token>& toks) {
        EntityDecl d;
        d.id = c.identifier("entity id");
        c.keyword(":");
        std::string type = c.next("entity type");
        if (!c.failed) {
            auto t = parse_entity_type(type);
            if (!t) {
                c.pos -= 1;
                c.error("unknown entity type '" + type +
                        "' (expected Person, Organization, System, Process, Resource, Agent)");
            } else {
                d.type = *t;
            }
        }
        if (c.accept("in")) d.domains = c.id_list("domain list");
        if (c.accept("role")) d.roles = c.id_list("role list");
        d.span = line_span(toks, c.line);
        c.end_of_line();
        if (!c.failed) result_.declarations.emplace_back(std::move(d));
    }

    void parse_agent(LineCursor& c, const std::vector<Token>& toks) {
        AgentDecl d;
        d.id = c.identifier("agent id");
        c.keyword("owner");
        d.owner_role = c.identifier("role id");
        if (c.accept("for")) d.acts_for = c.identifier("role id");
        if (c.accept("kind")) {
            std::string k = c.next("agent kind");
            if (!c.failed) {
                if (k == "management") {
                    d.kind = AgentKind::DomainManagementAgent;
                } else {
                    c.pos -= 1;
                    c.error("unknown agent kind '" + k + "' (expected management)");
                }
            }
        }
        d.span = line_span(toks, c.line);
        c.end_of_line();
        if (!c.failed) result_.declarations.emplace_back(std::move(d));
    }

    void parse_asset(LineCursor& c, const std::vector<Token>& toks) {
        AssetDecl d;
        d.id = c.identifier("asset id");
        c.keyword(":");
        std::string type = c.next("asset type");
        if (!c.failed) {
            auto t = parse_asset_type(type);
            if (!t) {
                c.pos -= 1;
                c.error("unknown asset type '" + type + "' (expected Data, Resource, Service)");
            } else {
                d.type = *t;
            }
        }
        c.keyword("owner");
        d.owner_role = c.identifier("role id");
        if (c.accept("provided-by")) d.provided_by = c.identifier("asset id");
        if (c.accept("state")) d.state = c.identifier("state label");
        if (c.accept("provisioned-by")) d.provisioned_by = c.identifier("agent id");
        d.span = line_span(toks, c.line);
        c.end_of_line();
        if (!c.failed) result_.declarations.emplace_back(std::move(d));
    }

    void parse_control(LineCursor& c, const std::vector<Token>& toks) {
        ControlDecl d;
        d.id = c.identifier("control id");
        c.keyword(":");
        std::string kind = c.next("control kind");
        if (!c.failed) {
            auto k = parse_control_kind(kind);
            if (!k) {
                c.pos -= 1;
                c.error("unknown control kind '" + kind + "' (expected pep, pdp, audit, management)");
            } else {
                d.kind = *k;
            }
        }
        c.keyword("in");
        d.domain = c.identifier("domain id");
        if (c.accept("central-store")) d.central_store = c.identifier("audit-store id");
        d.span = line_span(toks, c.line);
        c.end_of_line();
        if (!c.failed) result_.declarations.emplace_back(std::move(d));
    }

    void parse_policy_header(LineCursor& c, const std::vector<Token>& toks) {
        PolicyDecl d;
        d.id = c.identifier("policy id");
        c.keyword("by");
        d.establisher_role = c.identifier("role id");
        c.keyword("scope");
        d.scope_domain = c.identifier("domain id");
        c.keyword("{");
        d.span = line_span(toks, c.line);
        c.end_of_line();
        if (c.failed) return;
        policy_ = std::move(d);
        in_policy_ = true;
    }

    void parse_policy_line(LineCursor& c, const std::vector<Token>& toks) {
        if (c.peek_is("}")) {
            c.accept("}");
            parse_policy_close(c);
            return;
        }
        RuleDecl rd;
        rd.span = line_span(toks, c.line);
        std::string head = c.next("rule");
        if (head == "flow") {
            FlowRule f;
            f.source_asset_id = c.identifier("asset id");
            std::string arrow = c.next("'->' or '<->'");
            if (!c.failed) {
                if (arrow == "->") {
                    f.direction = FlowDirection::Uni;
                } else if (arrow == "<->") {
                    f.direction = FlowDirection::Bi;
                } else {
                    c.pos -= 1;
                    c.error("expected '->' or '<->', got '" + arrow + "'");
                }
            }
            f.dest_asset_id = c.identifier("asset id");
            rd.rule.body = f;
        } else if (head == "permit" || head == "deny" || head == "oblige") {
            ActionRule r;
            r.effect = head == "permit" ? RuleEffect::Permit
                       : head == "deny" ? RuleEffect::Deny
                                        : RuleEffect::Oblige;
            r.subject = c.selector("subject (role, entity, or *)");
            c.keyword("on");
            r.action_kind = c.identifier("action kind");
            c.keyword("target");
            r.target = c.selector("target asset or *");
            if (c.accept("if")) r.guard = c.identifier("guard label");
            rd.rule.body = r;
        } else {
            c.pos = 0;
            c.error("expected a rule (flow/permit/deny/oblige) or '}'");
        }
        c.end_of_line();
        if (!c.failed) policy_.rules.push_back(std::move(rd));
    }

    void parse_policy_close(LineCursor& c) {
        if (c.accept("published-by")) {
            policy_.published_by = c.identifier("agent id");
            if (c.accept("to")) policy_.published_to = c.identifier("store id");
        }
        if (c.accept("equivalent-to")) policy_.equivalent_to = c.id_list("policy list");
        if (c.accept("delivery")) policy_.is_delivery_policy = true;
        c.end_of_line();
        in_policy_ = false;
        if (!c.failed) result_.declarations.emplace_back(std::move(policy_));
        policy_ = PolicyDecl{};
    }
};

void append_list(std::string& out, const std::set<std::string>& items) {
    bool first = true;
    for (const auto& s : items) {
        if (!first) out += ",";
        out += s;
        first = false;
    }
}

}  // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

std::vector<Diagnostic> diagnostics(std::string_view text) { return parse(text).diagnostics; }

std::string serialize(const TrustDomainModel& m) {
    std::string out = "model " + m.name + "\n";
    if (!m.central_audit_store_id.empty()) out += "audit-store " + m.central_audit_store_id + "\n";
    for (const auto& [id, d] : m.domains) out += "domain " + id + "\n";
    for (const auto& [id, r] : m.roles) out += "role " + id + "\n";
    for (const auto& [id, e] : m.entities) {
        out += "entity " + id + " : " + to_string(e.entity_type);
        if (!e.memberships.empty()) {
            out += " in ";
            append_list(out, e.memberships);
        }
        if (!e.role_ids.empty()) {
            out += " role ";
            append_list(out, e.role_ids);
        }
        out += "\n";
    }
    for (const auto& [id, a] : m.agents) {
        out += "agent " + id + " owner " + a.owner_role_id;
        if (a.acts_on_behalf_of != a.owner_role_id) out += " for " + a.acts_on_behalf_of;
        if (a.kind == AgentKind::DomainManagementAgent) out += " kind management";
        out += "\n";
    }
    for (const auto& [id, a] : m.assets) {
        out += "asset " + id + " : " + to_string(a.asset_type) + " owner " + a.owner_role_id;
        if (a.provided_by) out += " provided-by " + *a.provided_by;
        if (a.state) out += " state " + *a.state;
        if (a.provisioned_by) out += " provisioned-by " + *a.provisioned_by;
        out += "\n";
    }
    for (const auto& [id, s] : m.policy_stores) out += "store " + id + " in " + s.domain_id + "\n";
    for (const auto& [id, c] : m.controls) {
        out += "control " + id + " : " + control_kind_keyword(c.kind) + " in " + c.domain_id;
        if (c.central_store_id) out += " central-store " + *c.central_store_id;
        out += "\n";
    }
    for (const auto& [id, p] : m.policies) {
        out += "policy " + id + " by " + p.establisher_role_id + " scope " + p.scope_domain_id +
               " {\n";
        for (const auto& r : p.rules) {
            if (r.is_flow()) {
                const FlowRule& f = r.flow();
                out += "  flow " + f.source_asset_id +
                       (f.direction == FlowDirection::Bi ? " <-> " : " -> ") + f.dest_asset_id +
                       "\n";
            } else {
                const ActionRule& a = r.action();
                out += "  " + to_string(a.effect) + " " + a.subject + " on " + a.action_kind +
                       " target " + a.target;
                if (!a.guard.empty()) out += " if " + a.guard;
                out += "\n";
            }
        }
        out += "}";
        if (p.published_by) {
            out += " published-by " + *p.published_by;
            if (p.published_to) out += " to " + *p.published_to;
        }
        if (!p.equivalent_to.empty()) {
            out += " equivalent-to ";
            append_list(out, p.equivalent_to);
        }
        if (p.is_delivery_policy) out += " delivery";
        out += "\n";
    }
    return out;
}

std::string to_string(const Diagnostic& d) {
    std::ostringstream os;
    os << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.span.line << ":"
       << d.span.col_begin << ": " << d.message;
    return os.str();
}

}  // namespace tdm::dsl
