#include "uma/claims/verifier.hpp"

#include <algorithm>
#include <fstream>

#include "uma/base64url.hpp"

namespace uma::claims {

void IssuerRegistry::add(
    const std::string& issuer,
    const std::array<std::uint8_t, kPublicKeyBytes>& key) {
    trusted_.insert_or_assign(issuer, key);
}

void IssuerRegistry::add_hex(const std::string& issuer,
                             std::string_view key_hex) {
    const auto bytes = uma::hex_decode(key_hex);
    if (!bytes || bytes->size() != kPublicKeyBytes) {
        throw KeyError("issuer " + issuer +
                       ": public key must be 32 hex-encoded bytes");
    }
    std::array<std::uint8_t, kPublicKeyBytes> key{};
    std::copy(bytes->begin(), bytes->end(), key.begin());
    add(issuer, key);
}

std::optional<std::array<std::uint8_t, kPublicKeyBytes>>
IssuerRegistry::find(const std::string& issuer) const {
    const auto it = trusted_.find(issuer);
    if (it == trusted_.end()) return std::nullopt;
    return it->second;
}

IssuerRegistry IssuerRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw KeyError("cannot read issuer registry " + path.string());
    nlohmann::json doc;
    in >> doc;
    IssuerRegistry registry;
    for (const auto& entry : doc) {
        registry.add_hex(entry.at("issuer").get<std::string>(),
                         entry.at("public_key_hex").get<std::string>());
    }
    return registry;
}

VerifiedClaims verify(const ClaimToken& token, const IssuerRegistry& registry,
                      Timestamp now) {
    if (token.format != kIdTokenFormat) {
        throw ClaimError(ClaimErrorCode::UnsupportedFormat,
                         "unsupported claim_token_format '" + token.format +
                             "'");
    }
    // The issuer is read from the unverified payload to select the key;
    // nothing is trusted until the signature checks out.
    const auto unverified = peek_payload(token.raw);
    if (!unverified || !unverified->is_object()) {
        throw ClaimError(ClaimErrorCode::BadSignature,
                         "malformed claim token");
    }
    const std::string issuer = unverified->value("iss", "");
    const auto key = registry.find(issuer);
    if (!key) {
        throw ClaimError(ClaimErrorCode::UnknownIssuer,
                         "issuer '" + issuer + "' is not registered");
    }
    const auto payload = verify_compact(token.raw, *key);
    if (!payload) {
        throw ClaimError(ClaimErrorCode::BadSignature,
                         "claim token signature verification failed");
    }
    if (!payload->contains("exp") || !payload->at("exp").is_number_integer() ||
        payload->at("exp").get<Timestamp>() <= now) {
        throw ClaimError(ClaimErrorCode::Expired, "claim token is expired");
    }
    const std::string webid = payload->value("webid", "");
    if (webid.empty()) {
        throw ClaimError(ClaimErrorCode::MissingWebid,
                         "claim token carries no webid");
    }

    VerifiedClaims claims;
    claims.webid = webid;
    claims.issuer = issuer;
    claims.verified_at = now;
    for (const auto& [name, value] : payload->items()) {
        if (name == "iss" || name == "exp" || name == "webid") continue;
        claims.context[name] =
            value.is_string() ? value.get<std::string>() : value.dump();
    }
    return claims;
}

ClaimToken mint_test_token(const std::string& webid,
                           const std::string& issuer, const SigningKey& key,
                           const std::map<std::string, std::string>& claims,
                           Timestamp exp) {
    nlohmann::json payload;
    payload["iss"] = issuer;
    payload["exp"] = exp;
    if (!webid.empty()) payload["webid"] = webid;
    for (const auto& [name, value] : claims) payload[name] = value;
    return ClaimToken{encode_compact(payload, key), kIdTokenFormat};
}

}  // namespace uma::claims
