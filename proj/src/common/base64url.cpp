#include "uma/base64url.hpp"

#include <sodium.h>

namespace uma {

std::string base64url_encode(const std::uint8_t* data, std::size_t len) {
    std::string out(sodium_base64_encoded_len(
                        len, sodium_base64_VARIANT_URLSAFE_NO_PADDING),
                    '\0');
    sodium_bin2base64(out.data(), out.size(), data, len,
                      sodium_base64_VARIANT_URLSAFE_NO_PADDING);
    out.resize(out.find('\0'));
    return out;
}

std::string base64url_encode(std::string_view data) {
    return base64url_encode(reinterpret_cast<const std::uint8_t*>(data.data()),
                            data.size());
}

std::optional<std::vector<std::uint8_t>> base64url_decode(
    std::string_view in) {
    std::vector<std::uint8_t> out(in.size() * 3 / 4 + 4);
    std::size_t actual = 0;
    if (sodium_base642bin(out.data(), out.size(), in.data(), in.size(),
                          nullptr, &actual, nullptr,
                          sodium_base64_VARIANT_URLSAFE_NO_PADDING) != 0) {
        return std::nullopt;
    }
    out.resize(actual);
    return out;
}

std::string hex_encode(const std::uint8_t* data, std::size_t len) {
    std::string out(len * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data, len);
    out.resize(len * 2);
    return out;
}

std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view in) {
    std::vector<std::uint8_t> out(in.size() / 2 + 1);
    std::size_t actual = 0;
    if (sodium_hex2bin(out.data(), out.size(), in.data(), in.size(), " \t\r\n",
                       &actual, nullptr) != 0) {
        return std::nullopt;
    }
    out.resize(actual);
    return out;
}

}  // namespace uma
