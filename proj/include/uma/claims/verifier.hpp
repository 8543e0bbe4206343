#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "uma/claims/token.hpp"
#include "uma/time.hpp"

namespace uma::claims {

/// Format identifier for the compact signed id token understood here.
inline constexpr const char* kIdTokenFormat = "urn:uma-odrl:claims:idtoken";

struct ClaimToken {
    std::string raw;
    std::string format;
};

/// Claims the policy engine may trust; webid is only set after
/// signature and issuer-trust checks succeed.
struct VerifiedClaims {
    std::string webid;
    std::string issuer;
    std::map<std::string, std::string> context;  // e.g. purpose
    Timestamp verified_at = 0;
};

enum class ClaimErrorCode {
    UnsupportedFormat,
    UnknownIssuer,
    BadSignature,
    Expired,
    MissingWebid,
};

struct ClaimError : std::runtime_error {
    ClaimError(ClaimErrorCode code_, const std::string& what_)
        : std::runtime_error(what_), code(code_) {}
    ClaimErrorCode code;
};

/// Trusted issuers and their Ed25519 verification keys; immutable once
/// registered within a server run.
class IssuerRegistry {
public:
    void add(const std::string& issuer,
             const std::array<std::uint8_t, kPublicKeyBytes>& key);
    void add_hex(const std::string& issuer, std::string_view key_hex);

    std::optional<std::array<std::uint8_t, kPublicKeyBytes>> find(
        const std::string& issuer) const;

    /// JSON file: [{"issuer": ..., "public_key_hex": ...}, ...]
    static IssuerRegistry load(const std::filesystem::path& path);

private:
    std::map<std::string, std::array<std::uint8_t, kPublicKeyBytes>> trusted_;
};

/// Verifies a claim token per its declared format. For the id-token
/// format: signature against the registry key of the payload issuer,
/// `exp` strictly in the future, `webid` present. Extra payload claims
/// are copied into the context.
VerifiedClaims verify(const ClaimToken& token, const IssuerRegistry& registry,
                      Timestamp now);

/// Mints an id token for tests and the CLI; stands in for an external
/// identity provider. verify(mint(...)) round-trips the inputs.
ClaimToken mint_test_token(const std::string& webid,
                           const std::string& issuer, const SigningKey& key,
                           const std::map<std::string, std::string>& claims,
                           Timestamp exp);

}  // namespace uma::claims
