#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "softpneu/error.hpp"

namespace softpneu {

inline constexpr const char* kToolVersion = "0.1.0";

// Rolling FNV-1a/64 over everything a run consumed: flag strings, config
// bytes, trace bytes. Two runs with equal digests must produce identical
// artifacts.
class InputsDigest {
 public:
    void update(const void* data, std::size_t size) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }

    void update(const std::string& text) { update(text.data(), text.size()); }

    void update_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::Parse, path + ": cannot open file");
        char buf[4096];
        while (in.read(buf, sizeof buf) || in.gcount() > 0)
            update(buf, static_cast<std::size_t>(in.gcount()));
    }

    std::string hex() const {
        char out[17];
        std::snprintf(out, sizeof out, "%016llx",
                      static_cast<unsigned long long>(hash_));
        return out;
    }

 private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

struct RunManifest {
    std::string command;
    std::string inputs_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};

inline nlohmann::json manifest_json(const RunManifest& m) {
    return nlohmann::json{{"command", m.command},
                          {"version", kToolVersion},
                          {"seed", m.seed},
                          {"inputs_hash_fnv1a64", m.inputs_hash},
                          {"outputs", m.outputs}};
}

}  // namespace softpneu
