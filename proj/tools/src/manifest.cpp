#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "copyguard/common/error.hpp"

namespace copyguard::cli {

namespace {

struct Hasher {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

    Hasher() {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw Error(ErrorCode::InvariantViolation, "sha256 init failed");
    }
    void update(const void* p, std::size_t n) { EVP_DigestUpdate(ctx.get(), p, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 15]);
        }
        return out;
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Hasher h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::MissingInput, "cannot read " + path.string());
    Hasher h;
    std::array<char, 1 << 16> buf;
    while (f) {
        f.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    return h.hex();
}

std::string Manifest::to_json() const {
    using nlohmann::ordered_json;
    auto files = [](const std::vector<std::filesystem::path>& ps) {
        ordered_json a = ordered_json::array();
        for (const auto& p : ps)
            a.push_back(ordered_json{{"name", p.filename().string()}, {"sha256", file_sha256(p)}});
        return a;
    };
    ordered_json j;
    j["tool"] = "copyguard";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["config_sha256"] = sha256_hex(config.dump());
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["config"] = config;
    return j.dump(2) + "\n";
}

void Manifest::write(const std::filesystem::path& path) const {
    const auto text = to_json();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    f << text;
}

}  // namespace copyguard::cli
