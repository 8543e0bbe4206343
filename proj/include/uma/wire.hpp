#pragma once

#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace uma {

/// (resource identifier, access-right set) tuple — the currency
/// exchanged between RS, ticket, token, and engine.
struct RequestedPermission {
    std::string resource;
    std::set<std::string> access_rights;

    bool operator==(const RequestedPermission&) const = default;
};

struct WireError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// UMA wire encoding: [{"resource_id": ..., "resource_scopes": [...]}].
nlohmann::json permissions_to_json(
    const std::vector<RequestedPermission>& perms);

/// Parses the wire encoding; throws WireError on malformed or empty
/// entries (empty resource_id or empty scope list).
std::vector<RequestedPermission> permissions_from_json(
    const nlohmann::json& body);

/// Merges duplicate resources and normalizes resource IRIs; the result
/// has one entry per distinct resource, sorted.
std::vector<RequestedPermission> merge_permissions(
    const std::vector<RequestedPermission>& perms);

/// Set inclusion per resource: every required (resource, right) pair is
/// present in `held`. Resources are compared after IRI normalization.
bool permissions_cover(const std::vector<RequestedPermission>& held,
                       const std::vector<RequestedPermission>& required);

}  // namespace uma
