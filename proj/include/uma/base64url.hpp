#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uma {

/// base64url without padding (RFC 4648 §5).
std::string base64url_encode(const std::uint8_t* data, std::size_t len);
std::string base64url_encode(std::string_view data);
std::optional<std::vector<std::uint8_t>> base64url_decode(std::string_view in);

std::string hex_encode(const std::uint8_t* data, std::size_t len);
std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view in);

}  // namespace uma
