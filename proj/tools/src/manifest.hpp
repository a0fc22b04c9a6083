#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace copyguard::cli {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);  // Error(MissingInput)

// Paths are recorded by file name only so runs in different directories
// produce identical manifests.
struct Manifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;

    std::string to_json() const;
    void write(const std::filesystem::path& path) const;
};

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace copyguard::cli
