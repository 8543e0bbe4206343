#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "uma/tickets/ticket_manager.hpp"

using namespace uma::tickets;
using uma::RequestedPermission;

namespace {
const std::vector<RequestedPermission> kReadA = {{"/docs/a", {"read"}}};
constexpr uma::Timestamp kT0 = 1750000000;
}  // namespace

TEST_CASE("issue applies the default ttl") {
    TicketManager manager;
    const auto ticket = manager.issue(kReadA, kT0);
    CHECK(ticket.expires_at == kT0 + 300);
    CHECK(ticket.issued_at == kT0);
    CHECK(!ticket.consumed);
    CHECK(ticket.ticket.size() >= 43);  // 256 bits, base64url
}

TEST_CASE("issuing for zero permissions fails") {
    TicketManager manager;
    CHECK_THROWS_AS(manager.issue({}, kT0), EmptyRequest);
}

TEST_CASE("identical requests yield distinct ticket strings") {
    TicketManager manager;
    const auto a = manager.issue(kReadA, kT0);
    const auto b = manager.issue(kReadA, kT0);
    CHECK(a.ticket != b.ticket);
}

TEST_CASE("resolve returns the stored permissions once") {
    TicketManager manager;
    const auto ticket = manager.issue(kReadA, kT0);
    CHECK(manager.resolve(ticket.ticket, kT0 + 10) == kReadA);
    CHECK_THROWS_AS(manager.resolve(ticket.ticket, kT0 + 11), ConsumedTicket);
}

TEST_CASE("expiry is strict past the ttl boundary") {
    TicketManager manager;
    const auto ticket = manager.issue(kReadA, kT0);
    SUBCASE("at the boundary the ticket still resolves") {
        CHECK_NOTHROW(manager.resolve(ticket.ticket, kT0 + 300));
    }
    SUBCASE("one second past the boundary it is expired") {
        CHECK_THROWS_AS(manager.resolve(ticket.ticket, kT0 + 301),
                        ExpiredTicket);
    }
}

TEST_CASE("unknown tickets are rejected") {
    TicketManager manager;
    CHECK_THROWS_AS(manager.resolve("nope", kT0), UnknownTicket);
}

TEST_CASE("purge removes expired and consumed tickets only") {
    TicketManager manager;
    CHECK(manager.purge(kT0) == 0);

    const auto live = manager.issue(kReadA, kT0 + 200);
    const auto consumed = manager.issue(kReadA, kT0);
    manager.resolve(consumed.ticket, kT0 + 1);
    manager.issue(kReadA, kT0 - 1000);
    manager.issue(kReadA, kT0 - 1000);
    manager.issue(kReadA, kT0 - 1000);

    CHECK(manager.purge(kT0 + 250) == 4);  // 3 expired + 1 consumed
    CHECK(manager.size() == 1);
    CHECK_NOTHROW(manager.resolve(live.ticket, kT0 + 260));
}

TEST_CASE("an expired ticket never resolves, purged or not") {
    TicketManager manager;
    const auto ticket = manager.issue(kReadA, kT0);
    CHECK_THROWS_AS(manager.resolve(ticket.ticket, kT0 + 9999),
                    ExpiredTicket);
}

TEST_CASE("64-way concurrent resolve succeeds exactly once") {
    TicketManager manager;
    const auto ticket = manager.issue(kReadA, kT0);
    std::atomic<int> successes{0};
    std::atomic<int> consumed_errors{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 64; ++i) {
        threads.emplace_back([&] {
            try {
                manager.resolve(ticket.ticket, kT0 + 1);
                ++successes;
            } catch (const ConsumedTicket&) {
                ++consumed_errors;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(successes == 1);
    CHECK(consumed_errors == 63);
}
