#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "uma/claims/token.hpp"
#include "uma/rs/resource_manager.hpp"
#include "uma/time.hpp"
#include "uma/wire.hpp"

namespace httplib {
class Server;
class Request;
class Response;
}  // namespace httplib

namespace uma::resource_server {

struct RSConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 0;  // 0 picks a free port
    std::string as_uri;   // AS issuer IRI; dereferenced at startup
    std::string rs_secret;
    std::string storage_root;
    std::vector<std::string> public_prefixes;  // GET-only bypass
    std::size_t max_body_bytes = 10 * 1024 * 1024;

    /// JSON config file; UMA_RS_LISTEN and UMA_RS_SECRET override.
    static RSConfig from_file(const std::filesystem::path& path);
};

struct RSConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for HTTP methods outside the CRUD surface.
struct MethodNotAllowed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Permissions an operation needs before it may run; `created_child`
/// carries the server-minted name for POST.
struct RequiredPermissions {
    std::vector<RequestedPermission> required;
    std::string created_child;
};

/// Outcome of the authorizer: either a verified party, or a challenge
/// carrying a fresh ticket for the 401 response.
struct AuthDecision {
    enum class Kind { Authorized, Challenge, AsUnreachable };
    Kind kind = Kind::Challenge;
    std::string webid;   // Authorized only
    std::string ticket;  // Challenge only
};

/// The UMA Resource Server: a hierarchical document store whose
/// authorizer validates RPTs locally and otherwise answers 401 with a
/// permission ticket and the AS location. It holds no policy state;
/// every authorization decision is delegated to the AS.
class ResourceServer {
public:
    explicit ResourceServer(RSConfig config);
    ~ResourceServer();
    ResourceServer(const ResourceServer&) = delete;

    /// Fetches the AS discovery document and verification key, then
    /// serves on a background thread. Throws when the AS is
    /// unreachable.
    void start();
    void stop();
    void run();

    int port() const { return port_; }
    std::string base_uri() const;
    ResourceManager& resources() { return *resources_; }

    /// Normative operation-to-permission mapping. Existence of `path`
    /// is consulted for PUT; POST mints the new child name.
    RequiredPermissions compute_required_permissions(
        const std::string& method, const std::string& path) const;

    /// Token validation and contingent ticket issuance.
    AuthDecision authorize(const std::string& authorization_header,
                           const std::vector<RequestedPermission>& required,
                           Timestamp now) const;

private:
    void install_routes();
    void handle(const httplib::Request& req, httplib::Response& res);
    bool fetch_as_metadata(std::string& error);
    std::string request_ticket(
        const std::vector<RequestedPermission>& required) const;

    RSConfig config_;
    std::unique_ptr<ResourceManager> resources_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    int port_ = 0;

    // Fetched from the AS at startup.
    std::string as_issuer_;
    std::string permission_endpoint_;
    std::array<std::uint8_t, claims::kPublicKeyBytes> as_key_{};
};

}  // namespace uma::resource_server
