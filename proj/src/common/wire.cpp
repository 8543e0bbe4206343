#include "uma/wire.hpp"

#include <algorithm>
#include <map>

#include "uma/iri.hpp"

namespace uma {

nlohmann::json permissions_to_json(
    const std::vector<RequestedPermission>& perms) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : perms) {
        nlohmann::json scopes = nlohmann::json::array();
        for (const auto& s : p.access_rights) scopes.push_back(s);
        out.push_back({{"resource_id", p.resource},
                       {"resource_scopes", std::move(scopes)}});
    }
    return out;
}

std::vector<RequestedPermission> permissions_from_json(
    const nlohmann::json& body) {
    if (!body.is_array()) {
        throw WireError("permissions must be a JSON array");
    }
    std::vector<RequestedPermission> out;
    for (const auto& entry : body) {
        if (!entry.is_object() || !entry.contains("resource_id") ||
            !entry.contains("resource_scopes")) {
            throw WireError(
                "permission entry requires resource_id and resource_scopes");
        }
        RequestedPermission p;
        p.resource = entry.at("resource_id").get<std::string>();
        for (const auto& s : entry.at("resource_scopes")) {
            p.access_rights.insert(s.get<std::string>());
        }
        if (p.resource.empty()) throw WireError("empty resource_id");
        if (p.access_rights.empty()) throw WireError("empty resource_scopes");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RequestedPermission> merge_permissions(
    const std::vector<RequestedPermission>& perms) {
    std::map<std::string, std::set<std::string>> merged;
    for (const auto& p : perms) {
        auto& rights = merged[normalize_iri(p.resource)];
        rights.insert(p.access_rights.begin(), p.access_rights.end());
    }
    std::vector<RequestedPermission> out;
    out.reserve(merged.size());
    for (auto& [resource, rights] : merged) {
        out.push_back({resource, std::move(rights)});
    }
    return out;
}

bool permissions_cover(const std::vector<RequestedPermission>& held,
                       const std::vector<RequestedPermission>& required) {
    const auto have = merge_permissions(held);
    for (const auto& req : merge_permissions(required)) {
        const auto it = std::find_if(
            have.begin(), have.end(),
            [&](const auto& h) { return h.resource == req.resource; });
        if (it == have.end()) return false;
        if (!std::includes(it->access_rights.begin(), it->access_rights.end(),
                           req.access_rights.begin(),
                           req.access_rights.end())) {
            return false;
        }
    }
    return true;
}

}  // namespace uma
