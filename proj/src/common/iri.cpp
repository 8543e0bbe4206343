#include "uma/iri.hpp"

#include <algorithm>
#include <cctype>

namespace uma {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

}  // namespace

std::string normalize_iri(std::string_view iri) {
    const auto scheme_end = iri.find("://");
    if (scheme_end == std::string_view::npos) return std::string(iri);
    const std::string scheme = to_lower(iri.substr(0, scheme_end));
    std::string_view rest = iri.substr(scheme_end + 3);
    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    std::string_view tail = authority_end == std::string_view::npos
                                ? std::string_view{}
                                : rest.substr(authority_end);

    std::string_view userinfo;
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
        userinfo = authority.substr(0, at + 1);
        authority = authority.substr(at + 1);
    }
    std::string_view host = authority;
    std::string_view port;
    // Bracketed IPv6 hosts carry colons; the port is after the bracket.
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos &&
        authority.find(']') == std::string_view::npos) {
        host = authority.substr(0, colon);
        port = authority.substr(colon + 1);
    } else if (const auto bracket = authority.find(']');
               bracket != std::string_view::npos &&
               bracket + 1 < authority.size() &&
               authority[bracket + 1] == ':') {
        host = authority.substr(0, bracket + 1);
        port = authority.substr(bracket + 2);
    }

    const bool default_port = (scheme == "http" && port == "80") ||
                              (scheme == "https" && port == "443");

    std::string out = scheme;
    out += "://";
    out += userinfo;
    out += to_lower(host);
    if (!port.empty() && !default_port) {
        out += ':';
        out += port;
    }
    out += tail;
    return out;
}

bool iri_equal(std::string_view a, std::string_view b) {
    return normalize_iri(a) == normalize_iri(b);
}

}  // namespace uma
