#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tdm/dsl.hpp"
#include "tdm/model.hpp"

namespace fixtures {

inline std::string path(const std::string& name) {
    return std::string(TDM_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string read(const std::string& name) { return read_file(path(name)); }

inline tdm::TrustDomainModel model(const std::string& name) {
    tdm::dsl::ParseResult pr = tdm::dsl::parse(read(name));
    if (!pr.ok()) {
        std::string msg = "fixture " + name + " has errors:";
        for (const auto& d : pr.diagnostics) msg += "\n  " + tdm::dsl::to_string(d);
        throw std::runtime_error(msg);
    }
    tdm::BuildResult built = tdm::build_model(pr.declarations);
    if (!built.ok()) throw std::runtime_error("fixture " + name + " failed to build");
    return std::move(*built.model);
}

}  // namespace fixtures
