#include "uma/rs/server.hpp"

#include <httplib.h>
#include <sodium.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "uma/base64url.hpp"
#include "uma/iri.hpp"

namespace uma::resource_server {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::pair<std::string, int> split_listen(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        throw RSConfigError("listen address must be host:port");
    }
    return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
}

// "http://host:port/path" -> ("http://host:port", "/path")
std::pair<std::string, std::string> split_origin(const std::string& uri) {
    const auto scheme_end = uri.find("://");
    if (scheme_end == std::string::npos) return {uri, "/"};
    const auto path_start = uri.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {uri, "/"};
    return {uri.substr(0, path_start), uri.substr(path_start)};
}

std::string mint_uuid() {
    std::uint8_t bytes[16];
    randombytes_buf(bytes, sizeof(bytes));
    bytes[6] = static_cast<std::uint8_t>((bytes[6] & 0x0f) | 0x40);
    bytes[8] = static_cast<std::uint8_t>((bytes[8] & 0x3f) | 0x80);
    char out[37];
    std::snprintf(out, sizeof(out),
                  "%02x%02x%02x%02x-%02x%02x-%02x%02x-%02x%02x-"
                  "%02x%02x%02x%02x%02x%02x",
                  bytes[0], bytes[1], bytes[2], bytes[3], bytes[4], bytes[5],
                  bytes[6], bytes[7], bytes[8], bytes[9], bytes[10],
                  bytes[11], bytes[12], bytes[13], bytes[14], bytes[15]);
    return out;
}

}  // namespace

RSConfig RSConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RSConfigError("cannot read config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw RSConfigError("config " + path.string() + ": " + e.what());
    }
    RSConfig config;
    if (doc.contains("listen")) {
        std::tie(config.listen_host, config.listen_port) =
            split_listen(doc.at("listen").get<std::string>());
    }
    config.as_uri = doc.value("as_uri", "");
    config.rs_secret = doc.value("rs_secret", "");
    config.storage_root = doc.value("storage_root", "");
    config.max_body_bytes = doc.value("max_body_bytes", config.max_body_bytes);
    for (const auto& prefix : doc.value("public_prefixes", json::array())) {
        config.public_prefixes.push_back(prefix.get<std::string>());
    }
    if (const char* listen = std::getenv("UMA_RS_LISTEN")) {
        std::tie(config.listen_host, config.listen_port) =
            split_listen(listen);
    }
    if (const char* secret = std::getenv("UMA_RS_SECRET")) {
        config.rs_secret = secret;
    }
    if (config.as_uri.empty()) throw RSConfigError("config requires as_uri");
    if (config.rs_secret.empty()) {
        throw RSConfigError("config requires rs_secret");
    }
    if (config.storage_root.empty()) {
        throw RSConfigError("config requires storage_root");
    }
    return config;
}

ResourceServer::ResourceServer(RSConfig config)
    : config_(std::move(config)),
      resources_(std::make_unique<ResourceManager>(config_.storage_root)),
      http_(std::make_unique<httplib::Server>()) {
    install_routes();
}

ResourceServer::~ResourceServer() { stop(); }

std::string ResourceServer::base_uri() const {
    return "http://" + config_.listen_host + ":" + std::to_string(port_);
}

bool ResourceServer::fetch_as_metadata(std::string& error) {
    httplib::Client client(config_.as_uri);
    client.set_connection_timeout(5);
    const auto discovery = client.Get("/.well-known/uma2-configuration");
    if (!discovery || discovery->status != 200) {
        error = "cannot fetch AS discovery document from " + config_.as_uri;
        return false;
    }
    const auto doc = json::parse(discovery->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("issuer") ||
        !doc.contains("permission_endpoint") || !doc.contains("jwks_uri")) {
        error = "malformed AS discovery document";
        return false;
    }
    as_issuer_ = doc.at("issuer").get<std::string>();
    permission_endpoint_ = doc.at("permission_endpoint").get<std::string>();

    const auto [jwks_origin, jwks_path] =
        split_origin(doc.at("jwks_uri").get<std::string>());
    httplib::Client jwks_client(jwks_origin);
    const auto jwks = jwks_client.Get(jwks_path);
    if (!jwks || jwks->status != 200) {
        error = "cannot fetch AS verification key";
        return false;
    }
    const auto keys = json::parse(jwks->body, nullptr, false);
    if (keys.is_discarded() || keys.value("keys", json::array()).empty()) {
        error = "AS JWKS carries no keys";
        return false;
    }
    const auto x = base64url_decode(
        keys.at("keys").at(0).value("x", std::string{}));
    if (!x || x->size() != claims::kPublicKeyBytes) {
        error = "AS JWKS key is not a 32-byte Ed25519 key";
        return false;
    }
    std::copy(x->begin(), x->end(), as_key_.begin());
    return true;
}

std::string ResourceServer::request_ticket(
    const std::vector<RequestedPermission>& required) const {
    const auto [origin, path] = split_origin(permission_endpoint_);
    httplib::Client client(origin);
    client.set_connection_timeout(5);
    httplib::Headers headers = {
        {"Authorization", "Bearer " + config_.rs_secret}};
    const auto res = client.Post(path, headers,
                                 permissions_to_json(required).dump(),
                                 "application/json");
    if (!res || res->status != 201) return {};
    const auto body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) return {};
    return body.value("ticket", std::string{});
}

RequiredPermissions ResourceServer::compute_required_permissions(
    const std::string& method, const std::string& path) const {
    RequiredPermissions out;
    if (method == "GET" || method == "HEAD") {
        out.required = {{path, {"read"}}};
    } else if (method == "PUT") {
        if (resources_->exists(path)) {
            out.required = {{path, {"modify"}}};
        } else {
            out.required = {{path, {"create"}},
                            {parent_of(path), {"modify"}}};
        }
    } else if (method == "PATCH") {
        out.required = {{path, {"modify"}}};
    } else if (method == "POST") {
        if (path.back() == '/') {
            out.created_child = path + mint_uuid();
            out.required = {{path, {"modify"}},
                            {out.created_child, {"create"}}};
        } else {
            out.required = {{path, {"modify"}}};
        }
    } else if (method == "DELETE") {
        out.required = {{path, {"delete"}}, {parent_of(path), {"modify"}}};
    } else {
        throw MethodNotAllowed("method " + method + " is not supported");
    }
    return out;
}

AuthDecision ResourceServer::authorize(
    const std::string& authorization_header,
    const std::vector<RequestedPermission>& required, Timestamp now) const {
    if (authorization_header.starts_with("Bearer ")) {
        const std::string rpt = authorization_header.substr(7);
        const auto payload = claims::verify_compact(rpt, as_key_);
        if (payload && payload->is_object() && payload->contains("exp") &&
            payload->at("exp").is_number_integer() &&
            payload->at("exp").get<Timestamp>() > now) {
            try {
                const auto held = permissions_from_json(
                    payload->value("permissions", json::array()));
                if (permissions_cover(held, required)) {
                    AuthDecision decision;
                    decision.kind = AuthDecision::Kind::Authorized;
                    decision.webid = payload->value("sub", std::string{});
                    return decision;
                }
            } catch (const WireError&) {
                // fall through to the challenge
            }
        }
    }
    AuthDecision decision;
    decision.ticket = request_ticket(required);
    decision.kind = decision.ticket.empty()
                        ? AuthDecision::Kind::AsUnreachable
                        : AuthDecision::Kind::Challenge;
    return decision;
}

void ResourceServer::install_routes() {
    http_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });
    const auto handler = [this](const httplib::Request& req,
                                httplib::Response& res) {
        handle(req, res);
    };
    const char* pattern = R"(/.*)";
    http_->Get(pattern, handler);
    http_->Put(pattern, handler);
    http_->Post(pattern, handler);
    http_->Patch(pattern, handler);
    http_->Delete(pattern, handler);
    http_->Options(pattern, [this](const httplib::Request& req,
                                   httplib::Response& res) {
        handle(req, res);
    });
}

void ResourceServer::handle(const httplib::Request& req,
                            httplib::Response& res) {
    const auto path = normalize_resource_path(req.path);
    if (!path) {
        send_json(res, 400, {{"error", "invalid_path"}});
        return;
    }
    RequiredPermissions needed;
    try {
        needed = compute_required_permissions(req.method, *path);
    } catch (const MethodNotAllowed& e) {
        send_json(res, 405, {{"error", "method_not_allowed"},
                             {"error_description", e.what()}});
        return;
    }
    if (req.body.size() > config_.max_body_bytes) {
        send_json(res, 413, {{"error", "payload_too_large"}});
        return;
    }

    const bool public_read =
        (req.method == "GET" || req.method == "HEAD") &&
        std::any_of(config_.public_prefixes.begin(),
                    config_.public_prefixes.end(), [&](const auto& prefix) {
                        return path->starts_with(prefix);
                    });
    if (!public_read) {
        const auto decision = authorize(req.get_header_value("Authorization"),
                                        needed.required, now_utc());
        if (decision.kind == AuthDecision::Kind::AsUnreachable) {
            send_json(res, 502, {{"error", "as_unreachable"}});
            return;
        }
        if (decision.kind == AuthDecision::Kind::Challenge) {
            // Unauthorized requests never learn whether the path
            // exists; a ticket is issued either way.
            res.status = 401;
            res.set_header("WWW-Authenticate",
                           "UMA realm=\"rs\", as_uri=\"" + as_issuer_ +
                               "\", ticket=\"" + decision.ticket + "\"");
            send_json(res, 401, {{"error", "unauthorized"}});
            return;
        }
    }

    try {
        if (req.method == "GET" || req.method == "HEAD") {
            const auto resource = resources_->read(*path);
            res.status = 200;
            if (resource.is_container) {
                json members = json::array();
                for (const auto& member : resource.members) {
                    members.push_back(member);
                }
                res.set_content(req.method == "HEAD" ? "" : members.dump(),
                                "application/json");
            } else {
                res.set_content(req.method == "HEAD" ? "" : resource.body,
                                resource.content_type);
            }
        } else if (req.method == "PUT") {
            const std::string content_type =
                req.get_header_value("Content-Type").empty()
                    ? "application/octet-stream"
                    : req.get_header_value("Content-Type");
            const bool created =
                path->back() == '/'
                    ? resources_->create_container(*path)
                    : resources_->write(*path, req.body, content_type);
            res.status = created ? 201 : 204;
        } else if (req.method == "PATCH") {
            // Full-body replace; the document must already exist.
            if (path->back() == '/') {
                throw ResourceConflict("cannot PATCH a container");
            }
            if (!resources_->exists(*path)) {
                throw ResourceNotFound("no document at " + *path);
            }
            const std::string content_type =
                req.get_header_value("Content-Type").empty()
                    ? "application/octet-stream"
                    : req.get_header_value("Content-Type");
            resources_->write(*path, req.body, content_type);
            res.status = 204;
        } else if (req.method == "POST") {
            if (path->back() != '/') {
                if (!resources_->exists(*path)) {
                    throw ResourceNotFound("no container at " + *path);
                }
                throw ResourceConflict("POST target must be a container");
            }
            if (!resources_->exists(*path)) {
                throw ResourceNotFound("no container at " + *path);
            }
            const std::string content_type =
                req.get_header_value("Content-Type").empty()
                    ? "application/octet-stream"
                    : req.get_header_value("Content-Type");
            resources_->write(needed.created_child, req.body, content_type);
            res.status = 201;
            res.set_header("Location", needed.created_child);
        } else if (req.method == "DELETE") {
            if (*path == "/") {
                throw ResourceConflict("the root container cannot be removed");
            }
            resources_->remove(*path);
            res.status = 204;
        }
    } catch (const ResourceNotFound& e) {
        send_json(res, 404, {{"error", "not_found"},
                             {"error_description", e.what()}});
    } catch (const ResourceConflict& e) {
        send_json(res, 409, {{"error", "conflict"},
                             {"error_description", e.what()}});
    } catch (const StorageError& e) {
        send_json(res, 500, {{"error", "storage_error"},
                             {"error_description", e.what()}});
    }
}

void ResourceServer::start() {
    std::string error;
    if (!fetch_as_metadata(error)) {
        throw RSConfigError(error);
    }
    if (config_.listen_port == 0) {
        port_ = http_->bind_to_any_port(config_.listen_host);
    } else {
        if (!http_->bind_to_port(config_.listen_host, config_.listen_port)) {
            throw RSConfigError("cannot bind " + config_.listen_host + ":" +
                                std::to_string(config_.listen_port));
        }
        port_ = config_.listen_port;
    }
    if (port_ <= 0) {
        throw RSConfigError("cannot bind " + config_.listen_host);
    }
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void ResourceServer::run() {
    start();
    thread_.join();
}

void ResourceServer::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace uma::resource_server
