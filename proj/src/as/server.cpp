#include "uma/as/server.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>

#include "uma/base64url.hpp"

namespace uma::auth_server {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& description) {
    send_json(res, status,
              {{"error", code}, {"error_description", description}});
}

std::pair<std::string, int> split_listen(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        throw ConfigError("listen address must be host:port");
    }
    return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
}

}  // namespace

ASConfig ASConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    ASConfig config;
    config.issuer = doc.value("issuer", "");
    if (doc.contains("listen")) {
        std::tie(config.listen_host, config.listen_port) =
            split_listen(doc.at("listen").get<std::string>());
    }
    config.signing_key_path = doc.value("signing_key_path", "");
    config.rpt_ttl = doc.value("rpt_ttl", config.rpt_ttl);
    config.ticket_ttl = doc.value("ticket_ttl", config.ticket_ttl);
    config.issuer_registry_path = doc.value("issuer_registry_path", "");
    config.policy_store_path = doc.value("policy_store_path", "");
    config.rs_secret = doc.value("rs_secret", "");

    if (const char* listen = std::getenv("UMA_AS_LISTEN")) {
        std::tie(config.listen_host, config.listen_port) =
            split_listen(listen);
    }
    if (const char* secret = std::getenv("UMA_AS_RS_SECRET")) {
        config.rs_secret = secret;
    }
    if (config.issuer.empty()) throw ConfigError("config requires an issuer");
    if (config.rs_secret.empty()) {
        throw ConfigError("config requires rs_secret");
    }
    return config;
}

std::string sign_rpt(const engine::Decision& decision,
                     const std::string& webid, const std::string& issuer,
                     const claims::SigningKey& key, Timestamp now,
                     std::int64_t ttl) {
    std::vector<RequestedPermission> granted;
    for (const auto& [resource, action] : decision.granted) {
        granted.push_back({resource, {action}});
    }
    json payload;
    payload["iss"] = issuer;
    payload["sub"] = webid;
    payload["permissions"] = permissions_to_json(merge_permissions(granted));
    payload["iat"] = now;
    payload["exp"] = now + ttl;
    return claims::encode_compact(payload, key);
}

AuthorizationServer::AuthorizationServer(ASConfig config,
                                         claims::SigningKey key,
                                         claims::IssuerRegistry registry,
                                         odrl::PolicyStore policies)
    : config_(std::move(config)),
      key_(std::move(key)),
      registry_(std::move(registry)),
      policies_(std::move(policies)),
      tickets_(config_.ticket_ttl),
      http_(std::make_unique<httplib::Server>()) {
    install_routes();
}

std::unique_ptr<AuthorizationServer> AuthorizationServer::from_config(
    ASConfig config) {
    if (config.signing_key_path.empty()) {
        throw ConfigError("config requires signing_key_path");
    }
    auto key = claims::SigningKey::load(config.signing_key_path);
    claims::IssuerRegistry registry;
    if (!config.issuer_registry_path.empty()) {
        registry = claims::IssuerRegistry::load(config.issuer_registry_path);
    }
    odrl::PolicyStore policies;
    if (!config.policy_store_path.empty()) {
        policies = odrl::PolicyStore::open(config.policy_store_path);
    }
    return std::make_unique<AuthorizationServer>(
        std::move(config), std::move(key), std::move(registry),
        std::move(policies));
}

AuthorizationServer::~AuthorizationServer() { stop(); }

std::string AuthorizationServer::base_uri() const {
    return "http://" + config_.listen_host + ":" + std::to_string(port_);
}

void AuthorizationServer::install_routes() {
    http_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    http_->Get("/.well-known/uma2-configuration",
               [this](const httplib::Request&, httplib::Response& res) {
                   const std::string issuer = config_.issuer;
                   send_json(res, 200,
                             {{"issuer", issuer},
                              {"token_endpoint", issuer + "/token"},
                              {"permission_endpoint", issuer + "/permission"},
                              {"jwks_uri", issuer + "/keys"},
                              {"claim_token_formats_supported",
                               {claims::kIdTokenFormat}}});
               });

    http_->Get("/keys", [this](const httplib::Request&,
                               httplib::Response& res) {
        const auto& pk = key_.public_key();
        send_json(res, 200,
                  {{"keys",
                    {{{"kty", "OKP"},
                      {"crv", "Ed25519"},
                      {"alg", "EdDSA"},
                      {"use", "sig"},
                      {"x", base64url_encode(pk.data(), pk.size())}}}}});
    });

    http_->Post("/permission", [this](const httplib::Request& req,
                                      httplib::Response& res) {
        const std::string auth = req.get_header_value("Authorization");
        if (auth != "Bearer " + config_.rs_secret) {
            send_error(res, 401, "invalid_token",
                       "permission registration requires the RS secret");
            return;
        }
        const Timestamp now = now_utc();
        tickets_.purge(now);
        try {
            auto requested =
                permissions_from_json(json::parse(req.body));
            if (requested.empty()) {
                send_error(res, 400, "invalid_request",
                           "permission list must be non-empty");
                return;
            }
            const auto ticket = tickets_.issue(std::move(requested), now);
            send_json(res, 201, {{"ticket", ticket.ticket}});
        } catch (const std::exception& e) {
            send_error(res, 400, "invalid_request", e.what());
        }
    });

    http_->Post("/token", [this](const httplib::Request& req,
                                 httplib::Response& res) {
        handle_token(req, res);
    });
}

// The token endpoint runs the four-step pipeline: parse, determine the
// requested permissions, verify the claims, assess authorization.
void AuthorizationServer::handle_token(const httplib::Request& req,
                                       httplib::Response& res) {
    const Timestamp now = now_utc();

    // Step 1: parse. Bodies are accepted form-encoded or as JSON.
    std::string grant_type, ticket, claim_token, claim_token_format;
    std::optional<json> permissions_field;
    const std::string content_type = req.get_header_value("Content-Type");
    if (content_type.find("application/json") != std::string::npos) {
        const auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            send_error(res, 400, "invalid_grant", "malformed JSON body");
            return;
        }
        grant_type = body.value("grant_type", "");
        ticket = body.value("ticket", "");
        claim_token = body.value("claim_token", "");
        claim_token_format = body.value("claim_token_format", "");
        if (body.contains("permissions")) {
            permissions_field = body.at("permissions");
        }
    } else {
        grant_type = req.get_param_value("grant_type");
        ticket = req.get_param_value("ticket");
        claim_token = req.get_param_value("claim_token");
        claim_token_format = req.get_param_value("claim_token_format");
        if (req.has_param("permissions")) {
            const auto parsed = json::parse(
                req.get_param_value("permissions"), nullptr, false);
            if (parsed.is_discarded()) {
                send_error(res, 400, "invalid_grant",
                           "permissions must be a JSON array");
                return;
            }
            permissions_field = parsed;
        }
    }

    if (grant_type != kUmaGrantType) {
        send_error(res, 400, "invalid_grant",
                   std::string("grant_type must be ") + kUmaGrantType);
        return;
    }
    if (ticket.empty() == !permissions_field.has_value()) {
        send_error(res, 400, "invalid_grant",
                   "exactly one of ticket and permissions is required");
        return;
    }

    // Step 2: determine the requested permissions.
    std::vector<RequestedPermission> requested;
    if (!ticket.empty()) {
        try {
            requested = tickets_.resolve(ticket, now);
        } catch (const tickets::TicketError& e) {
            send_error(res, 400, "invalid_grant", e.what());
            return;
        }
    } else {
        try {
            requested = permissions_from_json(*permissions_field);
        } catch (const WireError& e) {
            send_error(res, 400, "invalid_grant", e.what());
            return;
        }
        if (requested.empty()) {
            send_error(res, 400, "invalid_grant",
                       "permissions must be non-empty");
            return;
        }
    }

    // Step 3: verify the claims. Any failure yields need_info with a
    // fresh ticket bound to the same permissions, so the client can
    // retry with credentials.
    const auto need_info = [&](const std::string& description) {
        const auto fresh = tickets_.issue(requested, now);
        send_json(res, 403,
                  {{"error", "need_info"},
                   {"error_description", description},
                   {"ticket", fresh.ticket}});
    };
    if (claim_token.empty()) {
        need_info("claims are required to assess this request");
        return;
    }
    claims::VerifiedClaims verified;
    try {
        verified = claims::verify({claim_token, claim_token_format},
                                  registry_, now);
    } catch (const claims::ClaimError& e) {
        need_info(e.what());
        return;
    }

    // Step 4: assess authorization.
    engine::StateOfTheWorld sotw;
    sotw.current_time = now;
    engine::Decision decision;
    try {
        decision = engine::grant(policies_, verified, requested, sotw);
    } catch (const engine::EmptyRequest& e) {
        send_error(res, 400, "invalid_grant", e.what());
        return;
    }
    if (decision.granted.empty()) {
        send_error(res, 403, "request_denied",
                   "policy evaluation granted no permissions");
        return;
    }
    const std::string rpt = sign_rpt(decision, verified.webid, config_.issuer,
                                     key_, now, config_.rpt_ttl);
    send_json(res, 200, {{"access_token", rpt}, {"token_type", "Bearer"}});
}

void AuthorizationServer::start() {
    if (config_.listen_port == 0) {
        port_ = http_->bind_to_any_port(config_.listen_host);
    } else {
        if (!http_->bind_to_port(config_.listen_host, config_.listen_port)) {
            throw ConfigError("cannot bind " + config_.listen_host + ":" +
                              std::to_string(config_.listen_port));
        }
        port_ = config_.listen_port;
    }
    if (port_ <= 0) {
        throw ConfigError("cannot bind " + config_.listen_host);
    }
    // An unset issuer defaults to the bound address, which keeps
    // ephemeral-port test setups self-consistent.
    if (config_.issuer.empty()) config_.issuer = base_uri();
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void AuthorizationServer::run() {
    start();
    thread_.join();
}

void AuthorizationServer::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace uma::auth_server
