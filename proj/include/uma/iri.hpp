#pragma once

#include <string>
#include <string_view>

namespace uma {

/// RFC 3986 normalization limited to scheme/host case folding and
/// default-port removal (http:80, https:443). Percent-encoding and
/// path segments are left untouched. Inputs without a scheme
/// (e.g. bare paths) are returned unchanged.
std::string normalize_iri(std::string_view iri);

/// True when both IRIs are equal after normalization.
bool iri_equal(std::string_view a, std::string_view b);

}  // namespace uma
