#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "c2o/observer.hpp"

namespace c2o {

inline constexpr const char* kToolVersion = "0.1.0";

uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// Everything needed to reproduce a run byte-identically (modulo timestamp);
// embedded in every JSON report.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command_line;
    TypeConfig config;
    std::vector<std::pair<std::string, std::string>> input_hashes; // path -> fnv1a64
    uint64_t seed = 0;
    std::string timestamp; // informational; excluded from reproducibility

    std::string to_json_fragment() const; // object, deterministic key order
};

} // namespace c2o
