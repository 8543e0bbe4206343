#include "uma/tickets/ticket_manager.hpp"

#include <sodium.h>

#include "uma/base64url.hpp"

namespace uma::tickets {

namespace {

std::string random_handle() {
    std::uint8_t bytes[32];
    randombytes_buf(bytes, sizeof(bytes));
    return base64url_encode(bytes, sizeof(bytes));
}

}  // namespace

PermissionTicket TicketManager::issue(
    std::vector<RequestedPermission> requested, Timestamp now) {
    if (requested.empty()) {
        throw EmptyRequest("cannot issue a ticket for zero permissions");
    }
    PermissionTicket ticket;
    ticket.requested = std::move(requested);
    ticket.issued_at = now;
    ticket.expires_at = now + ttl_;
    std::lock_guard lock(mutex_);
    do {
        ticket.ticket = random_handle();
    } while (tickets_.contains(ticket.ticket));
    tickets_.emplace(ticket.ticket, ticket);
    return ticket;
}

std::vector<RequestedPermission> TicketManager::resolve(
    const std::string& ticket, Timestamp now) {
    std::lock_guard lock(mutex_);
    const auto it = tickets_.find(ticket);
    if (it == tickets_.end()) {
        throw UnknownTicket("no such ticket");
    }
    if (now > it->second.expires_at) {
        throw ExpiredTicket("ticket expired");
    }
    if (it->second.consumed) {
        throw ConsumedTicket("ticket already used");
    }
    it->second.consumed = true;
    return it->second.requested;
}

std::size_t TicketManager::purge(Timestamp now) {
    std::lock_guard lock(mutex_);
    std::size_t removed = 0;
    for (auto it = tickets_.begin(); it != tickets_.end();) {
        if (it->second.consumed || now > it->second.expires_at) {
            it = tickets_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::size_t TicketManager::size() const {
    std::lock_guard lock(mutex_);
    return tickets_.size();
}

}  // namespace uma::tickets
