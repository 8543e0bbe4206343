#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

namespace uma::claims {

constexpr std::size_t kSeedBytes = 32;
constexpr std::size_t kPublicKeyBytes = 32;
constexpr std::size_t kSecretKeyBytes = 64;

struct KeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ed25519 key pair. Key files hold the 32-byte seed, hex-encoded.
class SigningKey {
public:
    static SigningKey generate();
    static SigningKey from_seed_hex(std::string_view hex);
    static SigningKey load(const std::filesystem::path& path);
    void save_seed(const std::filesystem::path& path) const;

    std::string seed_hex() const;
    std::string public_key_hex() const;
    const std::array<std::uint8_t, kPublicKeyBytes>& public_key() const {
        return public_key_;
    }
    const std::array<std::uint8_t, kSecretKeyBytes>& secret_key() const {
        return secret_key_;
    }

private:
    SigningKey() = default;
    std::array<std::uint8_t, kSeedBytes> seed_{};
    std::array<std::uint8_t, kPublicKeyBytes> public_key_{};
    std::array<std::uint8_t, kSecretKeyBytes> secret_key_{};
};

/// Compact signed token: base64url(header) "." base64url(payload) "."
/// base64url(Ed25519 signature over "header.payload"). The header is
/// exactly `{"alg":"EdDSA"}`.
std::string encode_compact(const nlohmann::json& payload,
                           const SigningKey& key);

/// Decodes the payload without verifying; nullopt on malformed input.
std::optional<nlohmann::json> peek_payload(std::string_view token);

/// Verifies the signature and returns the payload; nullopt on
/// malformed input, wrong header, or bad signature.
std::optional<nlohmann::json> verify_compact(
    std::string_view token,
    const std::array<std::uint8_t, kPublicKeyBytes>& public_key);

}  // namespace uma::claims
