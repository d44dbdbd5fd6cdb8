#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "lsmtune/io.hpp"

namespace lsmtune {

// Everything needed to reproduce a run byte for byte: the command, its
// resolved parameters (seeds included), and the output paths. No wall-clock
// state is recorded anywhere.
struct RunManifest {
    std::string command;
    std::string version = kToolVersion;
    nlohmann::json params;
    nlohmann::json outputs;

    nlohmann::json to_json() const {
        return {{"command", command},
                {"version", version},
                {"params", params},
                {"outputs", outputs}};
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.params = j.at("params");
        m.outputs = j.at("outputs");
        return m;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::invalid_argument("cannot write manifest: " + path);
        out << to_json().dump(2) << '\n';
    }

    static RunManifest load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open manifest: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

} // namespace lsmtune
