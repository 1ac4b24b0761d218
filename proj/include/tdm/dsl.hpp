#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tdm/model.hpp"

namespace tdm::dsl {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
    bool operator==(const Diagnostic&) const = default;
};

struct ParseResult {
    std::vector<Declaration> declarations;
    std::vector<Diagnostic> diagnostics;

    bool ok() const {
        for (const auto& d : diagnostics)
            if (d.severity == Severity::Error) return false;
        return true;
    }
};

// Parses `.tdm` text. Never throws: every failure is a diagnostic with a
// 1-based line/column span. Structural problems (duplicate ids, dangling
// references, rule type errors) are folded into the diagnostics as well, so
// `ok()` means the declarations will build. Deterministic.
ParseResult parse(std::string_view text);

// Parse-and-discard convenience; same diagnostics as parse().
std::vector<Diagnostic> diagnostics(std::string_view text);

// Canonical form: LF line endings, header first, declarations sorted by kind
// then identifier, policy rules in declaration order. parse(serialize(m))
// rebuilds a structurally equal model.
std::string serialize(const TrustDomainModel& model);

std::string to_string(const Diagnostic& d);

}  // namespace tdm::dsl
