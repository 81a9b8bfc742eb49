#include "c2o/manifest.hpp"

#include <nlohmann/json.hpp>

namespace c2o {

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string RunManifest::to_json_fragment() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["command_line"] = command_line;
    j["config"] = {{"int_width", config.int_width},
                   {"int_signed", config.int_signed},
                   {"real", config.float_name()}};
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, hash] : input_hashes)
        j["inputs"].push_back({{"path", path}, {"fnv1a64", hash}});
    j["seed"] = seed;
    j["timestamp"] = timestamp;
    return j.dump(2);
}

} // namespace c2o
