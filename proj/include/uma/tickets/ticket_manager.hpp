#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "uma/time.hpp"
#include "uma/wire.hpp"

namespace uma::tickets {

struct PermissionTicket {
    std::string ticket;  // opaque, URL-safe, 256 bits of entropy
    std::vector<RequestedPermission> requested;
    Timestamp issued_at = 0;
    Timestamp expires_at = 0;
    bool consumed = false;
};

struct TicketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyRequest : TicketError {
    using TicketError::TicketError;
};
struct UnknownTicket : TicketError {
    using TicketError::TicketError;
};
struct ExpiredTicket : TicketError {
    using TicketError::TicketError;
};
struct ConsumedTicket : TicketError {
    using TicketError::TicketError;
};

/// Issues, resolves, and expires single-use permission tickets.
/// Internally synchronized; resolve's consume step is atomic, so under
/// concurrent resolves of one ticket exactly one caller succeeds.
class TicketManager {
public:
    explicit TicketManager(std::int64_t ttl_seconds = 300)
        : ttl_(ttl_seconds) {}

    PermissionTicket issue(std::vector<RequestedPermission> requested,
                           Timestamp now);

    /// Returns the stored permissions and marks the ticket consumed.
    std::vector<RequestedPermission> resolve(const std::string& ticket,
                                             Timestamp now);

    /// Removes expired and consumed tickets; returns how many.
    std::size_t purge(Timestamp now);

    std::size_t size() const;
    std::int64_t ttl_seconds() const { return ttl_; }

private:
    std::int64_t ttl_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, PermissionTicket> tickets_;
};

}  // namespace uma::tickets
