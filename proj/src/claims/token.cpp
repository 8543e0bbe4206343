#include "uma/claims/token.hpp"

#include <sodium.h>

#include <fstream>
#include <sstream>

#include "uma/base64url.hpp"

namespace uma::claims {

namespace {

constexpr std::string_view kHeader = R"({"alg":"EdDSA"})";

}  // namespace

SigningKey SigningKey::generate() {
    if (sodium_init() < 0) throw KeyError("libsodium init failed");
    SigningKey key;
    randombytes_buf(key.seed_.data(), key.seed_.size());
    crypto_sign_seed_keypair(key.public_key_.data(), key.secret_key_.data(),
                             key.seed_.data());
    return key;
}

SigningKey SigningKey::from_seed_hex(std::string_view hex) {
    if (sodium_init() < 0) throw KeyError("libsodium init failed");
    const auto seed = hex_decode(hex);
    if (!seed || seed->size() != kSeedBytes) {
        throw KeyError("seed must be 32 hex-encoded bytes");
    }
    SigningKey key;
    std::copy(seed->begin(), seed->end(), key.seed_.begin());
    crypto_sign_seed_keypair(key.public_key_.data(), key.secret_key_.data(),
                             key.seed_.data());
    return key;
}

SigningKey SigningKey::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw KeyError("cannot read key file " + path.string());
    std::string hex;
    in >> hex;
    return from_seed_hex(hex);
}

void SigningKey::save_seed(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw KeyError("cannot write key file " + path.string());
    out << seed_hex() << "\n";
}

std::string SigningKey::seed_hex() const {
    return hex_encode(seed_.data(), seed_.size());
}

std::string SigningKey::public_key_hex() const {
    return hex_encode(public_key_.data(), public_key_.size());
}

std::string encode_compact(const nlohmann::json& payload,
                           const SigningKey& key) {
    std::string signing_input = base64url_encode(kHeader);
    signing_input += '.';
    signing_input += base64url_encode(payload.dump());

    std::array<std::uint8_t, crypto_sign_BYTES> sig{};
    crypto_sign_detached(
        sig.data(), nullptr,
        reinterpret_cast<const std::uint8_t*>(signing_input.data()),
        signing_input.size(), key.secret_key().data());
    return signing_input + "." + base64url_encode(sig.data(), sig.size());
}

namespace {

struct TokenParts {
    std::string_view header_b64;
    std::string_view payload_b64;
    std::string_view signature_b64;
};

std::optional<TokenParts> split(std::string_view token) {
    const auto dot1 = token.find('.');
    if (dot1 == std::string_view::npos) return std::nullopt;
    const auto dot2 = token.find('.', dot1 + 1);
    if (dot2 == std::string_view::npos) return std::nullopt;
    if (token.find('.', dot2 + 1) != std::string_view::npos) {
        return std::nullopt;
    }
    return TokenParts{token.substr(0, dot1),
                      token.substr(dot1 + 1, dot2 - dot1 - 1),
                      token.substr(dot2 + 1)};
}

std::optional<nlohmann::json> decode_json(std::string_view b64) {
    const auto bytes = base64url_decode(b64);
    if (!bytes) return std::nullopt;
    auto parsed = nlohmann::json::parse(bytes->begin(), bytes->end(), nullptr,
                                        false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

}  // namespace

std::optional<nlohmann::json> peek_payload(std::string_view token) {
    const auto parts = split(token);
    if (!parts) return std::nullopt;
    return decode_json(parts->payload_b64);
}

std::optional<nlohmann::json> verify_compact(
    std::string_view token,
    const std::array<std::uint8_t, kPublicKeyBytes>& public_key) {
    const auto parts = split(token);
    if (!parts) return std::nullopt;

    const auto header_bytes = base64url_decode(parts->header_b64);
    if (!header_bytes ||
        std::string_view(
            reinterpret_cast<const char*>(header_bytes->data()),
            header_bytes->size()) != kHeader) {
        return std::nullopt;
    }
    const auto sig = base64url_decode(parts->signature_b64);
    if (!sig || sig->size() != crypto_sign_BYTES) return std::nullopt;

    const std::string_view signing_input =
        token.substr(0, parts->header_b64.size() + 1 +
                            parts->payload_b64.size());
    if (crypto_sign_verify_detached(
            sig->data(),
            reinterpret_cast<const std::uint8_t*>(signing_input.data()),
            signing_input.size(), public_key.data()) != 0) {
        return std::nullopt;
    }
    return decode_json(parts->payload_b64);
}

}  // namespace uma::claims
