#include "uma/flow/flow.hpp"

#include <httplib.h>

#include <regex>
#include <sstream>

#include "uma/claims/verifier.hpp"

namespace uma::flow {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {url, "/"};
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string summarize(const std::string& method, const std::string& target) {
    return method + " " + target;
}

std::string summarize_response(const httplib::Result& res) {
    if (!res) return "network error";
    std::string out = std::to_string(res->status);
    if (!res->body.empty() && res->body.size() <= 200) {
        out += " " + res->body;
    }
    return out;
}

httplib::Result send(httplib::Client& client, const std::string& method,
                     const std::string& path, const httplib::Headers& headers,
                     const std::string& body,
                     const std::string& content_type) {
    if (method == "GET") return client.Get(path, headers);
    if (method == "HEAD") return client.Head(path, headers);
    if (method == "PUT") return client.Put(path, headers, body, content_type);
    if (method == "POST") {
        return client.Post(path, headers, body, content_type);
    }
    if (method == "PATCH") {
        return client.Patch(path, headers, body, content_type);
    }
    if (method == "DELETE") return client.Delete(path, headers);
    return client.Get(path, headers);
}

struct WwwAuthenticate {
    std::string as_uri;
    std::string ticket;
};

std::optional<WwwAuthenticate> parse_www_authenticate(
    const std::string& header) {
    static const std::regex pattern(
        R"re(UMA realm="([^"]*)", as_uri="([^"]*)", ticket="([^"]*)")re");
    std::smatch match;
    if (!std::regex_search(header, match, pattern)) return std::nullopt;
    return WwwAuthenticate{match[2], match[3]};
}

std::string discover_token_endpoint(const std::string& as_uri,
                                    std::string& error) {
    httplib::Client client(as_uri);
    client.set_connection_timeout(5);
    const auto res = client.Get("/.well-known/uma2-configuration");
    if (!res || res->status != 200) {
        error = "cannot fetch AS discovery document from " + as_uri;
        return {};
    }
    const auto doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("token_endpoint")) {
        error = "malformed AS discovery document";
        return {};
    }
    return doc.at("token_endpoint").get<std::string>();
}

}  // namespace

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Granted: return "Granted";
        case Outcome::NeedInfo: return "NeedInfo";
        case Outcome::Denied: return "Denied";
        case Outcome::Error: return "Error";
    }
    return "Error";
}

int exit_code(Outcome outcome) {
    switch (outcome) {
        case Outcome::Granted: return 0;
        case Outcome::NeedInfo: return 3;
        case Outcome::Denied: return 4;
        case Outcome::Error: return 5;
    }
    return 5;
}

std::vector<RequestedPermission> permissions_for(const std::string& method,
                                                 const std::string& path) {
    std::string parent = path == "/" ? std::string("/") : path;
    if (parent.back() == '/') parent.pop_back();
    const auto slash = parent.rfind('/');
    parent = slash == std::string::npos ? "/" : parent.substr(0, slash + 1);

    if (method == "GET" || method == "HEAD") return {{path, {"read"}}};
    if (method == "PUT" || method == "PATCH") return {{path, {"modify"}}};
    if (method == "POST") return {{path, {"modify"}}};
    if (method == "DELETE") {
        return {{path, {"delete"}}, {parent, {"modify"}}};
    }
    return {{path, {"read"}}};
}

FlowTranscript run_request(const RequestOptions& options) {
    FlowTranscript transcript;
    const auto target = parse_url(options.url);
    httplib::Client rs_client(target.origin);
    rs_client.set_connection_timeout(5);

    std::string as_uri = options.as_uri;
    std::string ticket;
    json token_request;
    token_request["grant_type"] =
        "urn:ietf:params:oauth:grant-type:uma-ticket";

    if (options.direct) {
        if (as_uri.empty()) {
            transcript.error = "direct mode requires the AS URI";
            return transcript;
        }
        token_request["permissions"] =
            permissions_to_json(permissions_for(options.method, target.path));
    } else {
        // RS-attempt: expected to fail with 401 + ticket when the
        // resource is protected.
        auto attempt = send(rs_client, options.method, target.path, {},
                            options.body, options.content_type);
        transcript.steps.push_back({"RS-attempt",
                                    summarize(options.method, options.url),
                                    summarize_response(attempt)});
        if (!attempt) {
            transcript.error = "resource server unreachable";
            return transcript;
        }
        if (attempt->status < 300) {
            transcript.outcome = Outcome::Granted;
            transcript.final_status = attempt->status;
            transcript.final_body = attempt->body;
            return transcript;
        }
        if (attempt->status != 401) {
            transcript.error = "unexpected RS status " +
                               std::to_string(attempt->status);
            return transcript;
        }
        const auto challenge = parse_www_authenticate(
            attempt->get_header_value("WWW-Authenticate"));
        if (!challenge) {
            transcript.error = "401 without a UMA WWW-Authenticate header";
            return transcript;
        }
        as_uri = challenge->as_uri;
        ticket = challenge->ticket;
        token_request["ticket"] = ticket;
    }

    if (!options.claim_token.empty()) {
        token_request["claim_token"] = options.claim_token;
        token_request["claim_token_format"] =
            options.claim_token_format.empty() ? claims::kIdTokenFormat
                                               : options.claim_token_format;
    }

    std::string error;
    const std::string token_endpoint = discover_token_endpoint(as_uri, error);
    if (token_endpoint.empty()) {
        transcript.error = error;
        return transcript;
    }
    const auto token_target = parse_url(token_endpoint);
    httplib::Client as_client(token_target.origin);
    as_client.set_connection_timeout(5);
    auto token_response =
        as_client.Post(token_target.path, token_request.dump(),
                       "application/json");
    transcript.steps.push_back({"AS-token",
                                summarize("POST", token_endpoint),
                                summarize_response(token_response)});
    if (!token_response) {
        transcript.error = "authorization server unreachable";
        return transcript;
    }
    const auto token_body = json::parse(token_response->body, nullptr, false);
    if (token_response->status != 200) {
        const std::string code =
            token_body.is_object() ? token_body.value("error", "") : "";
        if (code == "need_info") {
            transcript.outcome = Outcome::NeedInfo;
            transcript.need_info_ticket =
                token_body.value("ticket", std::string{});
        } else if (code == "request_denied") {
            transcript.outcome = Outcome::Denied;
        } else {
            transcript.error = "token endpoint error: " +
                               (code.empty() ? std::to_string(
                                                   token_response->status)
                                             : code);
        }
        return transcript;
    }
    if (!token_body.is_object() || !token_body.contains("access_token")) {
        transcript.error = "token response carries no access_token";
        return transcript;
    }
    transcript.rpt = token_body.at("access_token").get<std::string>();

    // RS-retry with the RPT.
    const httplib::Headers auth = {
        {"Authorization", "Bearer " + transcript.rpt}};
    auto retry = send(rs_client, options.method, target.path, auth,
                      options.body, options.content_type);
    transcript.steps.push_back({"RS-retry",
                                summarize(options.method, options.url),
                                summarize_response(retry)});
    if (!retry) {
        transcript.error = "resource server unreachable on retry";
        return transcript;
    }
    transcript.final_status = retry->status;
    transcript.final_body = retry->body;
    transcript.outcome =
        retry->status < 300 ? Outcome::Granted : Outcome::Denied;
    return transcript;
}

nlohmann::ordered_json transcript_to_json(const FlowTranscript& transcript) {
    nlohmann::ordered_json out;
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const auto& step : transcript.steps) {
        steps.push_back({{"step", step.label},
                         {"request", step.request},
                         {"response", step.response}});
    }
    out["steps"] = std::move(steps);
    out["outcome"] = to_string(transcript.outcome);
    if (!transcript.rpt.empty()) out["access_token"] = transcript.rpt;
    if (!transcript.need_info_ticket.empty()) {
        out["ticket"] = transcript.need_info_ticket;
    }
    if (transcript.final_status != 0) {
        out["final_status"] = transcript.final_status;
    }
    if (!transcript.error.empty()) out["error"] = transcript.error;
    return out;
}

std::string transcript_to_text(const FlowTranscript& transcript) {
    std::ostringstream out;
    for (const auto& step : transcript.steps) {
        out << step.label << ": " << step.request << " -> " << step.response
            << "\n";
    }
    out << "outcome: " << to_string(transcript.outcome) << "\n";
    if (!transcript.need_info_ticket.empty()) {
        out << "ticket: " << transcript.need_info_ticket << "\n";
    }
    if (!transcript.error.empty()) {
        out << "error: " << transcript.error << "\n";
    }
    return out.str();
}

}  // namespace uma::flow
