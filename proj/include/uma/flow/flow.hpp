#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "uma/wire.hpp"

namespace uma::flow {

enum class Outcome { Granted, NeedInfo, Denied, Error };

std::string to_string(Outcome outcome);

struct Step {
    std::string label;  // RS-attempt, AS-token, RS-retry
    std::string request;
    std::string response;
};

struct FlowTranscript {
    std::vector<Step> steps;  // in protocol order
    Outcome outcome = Outcome::Error;
    std::string rpt;                // when a token was issued
    std::string need_info_ticket;   // when the AS asked for claims
    int final_status = 0;           // last RS response, when reached
    std::string final_body;
    std::string error;              // Outcome::Error detail
};

struct RequestOptions {
    std::string method = "GET";
    std::string url;  // full RS resource URL
    std::string body;
    std::string content_type = "application/octet-stream";
    std::string claim_token;         // empty: no claims supplied
    std::string claim_token_format;  // defaults to the id-token format
    bool direct = false;     // skip the RS attempt; needs as_uri
    std::string as_uri;      // required in direct mode
};

/// Client-side permission mapping for direct mode, mirroring the RS
/// operation table for existing resources.
std::vector<RequestedPermission> permissions_for(const std::string& method,
                                                 const std::string& path);

/// Drives the full grant flow as the requesting party's client:
/// attempt, token exchange, retry with the RPT. Every ticket used
/// originates from an RS 401 or a need_info response.
FlowTranscript run_request(const RequestOptions& options);

nlohmann::ordered_json transcript_to_json(const FlowTranscript& transcript);
std::string transcript_to_text(const FlowTranscript& transcript);

/// Exit-code contract: 0 Granted, 3 NeedInfo, 4 Denied, 5 Error.
int exit_code(Outcome outcome);

}  // namespace uma::flow
