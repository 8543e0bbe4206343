#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "uma/claims/verifier.hpp"
#include "uma/engine/engine.hpp"
#include "uma/odrl/store.hpp"
#include "uma/tickets/ticket_manager.hpp"

namespace httplib {
class Server;
class Request;
class Response;
}  // namespace httplib

namespace uma::auth_server {

inline constexpr const char* kUmaGrantType =
    "urn:ietf:params:oauth:grant-type:uma-ticket";

struct ASConfig {
    std::string issuer;  // advertised in discovery; must match reality
    std::string listen_host = "127.0.0.1";
    int listen_port = 0;  // 0 picks a free port
    std::string signing_key_path;
    std::int64_t rpt_ttl = 600;
    std::int64_t ticket_ttl = 300;
    std::string issuer_registry_path;
    std::string policy_store_path;
    std::string rs_secret;

    /// JSON config file; UMA_AS_LISTEN ("host:port") and
    /// UMA_AS_RS_SECRET environment variables override.
    static ASConfig from_file(const std::filesystem::path& path);
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Serializes granted permissions into a signed RPT. `granted` must be
/// non-empty; the token carries exactly the granted subset.
std::string sign_rpt(const engine::Decision& decision,
                     const std::string& webid, const std::string& issuer,
                     const claims::SigningKey& key, Timestamp now,
                     std::int64_t ttl);

/// The UMA Authorization Server: discovery, permission registration
/// for the RS, and the token endpoint issuing RPTs.
class AuthorizationServer {
public:
    AuthorizationServer(ASConfig config, claims::SigningKey key,
                        claims::IssuerRegistry registry,
                        odrl::PolicyStore policies);

    /// Builds everything from the config file paths.
    static std::unique_ptr<AuthorizationServer> from_config(ASConfig config);

    ~AuthorizationServer();
    AuthorizationServer(const AuthorizationServer&) = delete;

    /// Binds and serves on a background thread; returns once ready.
    void start();
    void stop();

    /// Serves on the calling thread until stop() is invoked.
    void run();

    int port() const { return port_; }
    std::string base_uri() const;

    odrl::PolicyStore& policies() { return policies_; }
    tickets::TicketManager& tickets() { return tickets_; }
    const claims::SigningKey& signing_key() const { return key_; }

private:
    void install_routes();
    void handle_token(const httplib::Request& req, httplib::Response& res);

    ASConfig config_;
    claims::SigningKey key_;
    claims::IssuerRegistry registry_;
    odrl::PolicyStore policies_;
    tickets::TicketManager tickets_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace uma::auth_server
