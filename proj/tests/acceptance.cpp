// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Runs a loopback AS + RS pair in-process and exercises
// the CLI binary for the end-to-end flow.

#include <httplib.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

#include "harness.hpp"
#include "support.hpp"
#include "uma/engine/engine.hpp"
#include "uma/flow/flow.hpp"

using namespace harness;
using nlohmann::json;
using uma::RequestedPermission;

namespace {

int checks_failed = 0;

bool check(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "    check failed: " << what << "\n";
        ++checks_failed;
    }
    return ok;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string golden(const std::string& name) {
    return slurp(std::filesystem::path(UMA_GOLDEN_DIR) / name);
}

std::string substitute(std::string text, const std::string& placeholder,
                       const std::string& value) {
    for (auto at = text.find(placeholder); at != std::string::npos;
         at = text.find(placeholder, at + value.size())) {
        text.replace(at, placeholder.size(), value);
    }
    return text;
}

std::string trim(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
    }
    return text;
}

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    const std::string command =
        std::string(UMA_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.stdout_text.append(buffer, got);
    }
    const int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string mint_rpt(const TestWorld& world, const json& permissions,
                     std::int64_t lifetime = 600) {
    json payload;
    payload["iss"] = world.as->base_uri();
    payload["sub"] = kAlice;
    payload["permissions"] = permissions;
    payload["iat"] = uma::now_utc();
    payload["exp"] = uma::now_utc() + lifetime;
    return uma::claims::encode_compact(payload, world.as->signing_key());
}

json permissions_json(const std::vector<RequestedPermission>& permissions) {
    return uma::permissions_to_json(permissions);
}

httplib::Result post_token(httplib::Client& client, const json& body) {
    return client.Post("/token", body.dump(), "application/json");
}

json direct_token_request(const TestWorld& world, const json& permissions,
                          const std::string& claim_token) {
    json body;
    body["grant_type"] = uma::auth_server::kUmaGrantType;
    body["permissions"] = permissions;
    if (!claim_token.empty()) {
        body["claim_token"] = claim_token;
        body["claim_token_format"] = uma::claims::kIdTokenFormat;
    }
    return body;
}

uma::claims::VerifiedClaims claims_for(const testsupport::WorldRequest& req) {
    uma::claims::VerifiedClaims claims;
    claims.webid = req.webid;
    if (req.purpose) claims.context["purpose"] = *req.purpose;
    return claims;
}

uma::odrl::PolicyStore store_of(const std::vector<uma::odrl::Policy>& list) {
    uma::odrl::PolicyStore store;
    for (const auto& policy : list) store.put(policy);
    return store;
}

void reset_policies(TestWorld& world,
                    const std::vector<uma::odrl::Policy>& next) {
    for (const auto& uid : world.as->policies().list()) {
        world.as->policies().remove(uid);
    }
    for (const auto& policy : next) world.as->policies().put(policy);
}

// ---- criterion 1 --------------------------------------------------

bool end_to_end_grant_flow() {
    TestWorld world;
    world.as->policies().put(
        permit("https://policies.example/e2e", "/docs/a", "read", kAlice));
    world.rs->resources().create_container("/docs/");
    world.rs->resources().write("/docs/a", "hello world", "text/plain");

    const std::string url = world.rs->base_uri() + "/docs/a";
    const auto cli = run_cli("request GET " + url + " --claim-token '" +
                             world.claim_token() + "' --json");
    if (!check(cli.exit_code == 0, "CLI exit code 0")) return false;
    const auto transcript = json::parse(cli.stdout_text, nullptr, false);
    if (!check(!transcript.is_discarded(), "transcript parses")) return false;

    auto expected = json::parse(substitute(
        substitute(golden("transcript.json"), "{{URL}}", url), "{{AS}}",
        world.as->base_uri()));
    bool ok = check(transcript.at("steps").size() == 3, "three steps");
    for (std::size_t i = 0; ok && i < 3; ++i) {
        const auto& want = expected.at("steps").at(i);
        const auto& got = transcript.at("steps").at(i);
        ok &= check(got.at("step") == want.at("step"), "step label");
        ok &= check(got.at("request") == want.at("request"), "step request");
        const auto status = std::to_string(want.at("status").get<int>());
        ok &= check(got.at("response").get<std::string>().rfind(status, 0) ==
                        0,
                    "step status " + status);
    }
    ok &= check(transcript.at("outcome") == expected.at("outcome"),
                "outcome Granted");
    ok &= check(transcript.at("final_status") == expected.at("final_status"),
                "final status 200");
    const auto rpt = transcript.value("access_token", std::string{});
    const auto payload =
        uma::claims::verify_compact(rpt, world.as->signing_key().public_key());
    ok &= check(payload.has_value(), "RPT verifies against the AS key");
    if (payload) {
        ok &= check(payload->at("permissions") ==
                        json::array({{{"resource_id", "/docs/a"},
                                      {"resource_scopes", {"read"}}}}),
                    "RPT carries the read grant");
    }
    return ok;
}

// ---- criterion 2 --------------------------------------------------

bool default_deny() {
    TestWorld world(false);
    httplib::Client client(world.as->base_uri());
    testsupport::Rng rng(1202);
    int grants = 0;
    for (int i = 0; i < 100; ++i) {
        const auto req = testsupport::random_world_request(rng);
        std::map<std::string, std::string> extra;
        if (req.purpose) extra["purpose"] = *req.purpose;
        const auto res = post_token(
            client, direct_token_request(world,
                                         permissions_json(req.requested),
                                         world.claim_token(req.webid, extra)));
        if (!res) return check(false, "token endpoint reachable");
        if (res->status == 200) ++grants;
        if (!check(res->status == 403, "status 403")) return false;
        if (!check(json::parse(res->body).at("error") == "request_denied",
                   "request_denied")) {
            return false;
        }
    }
    return check(grants == 0, "zero grants over 100 requests");
}

// ---- criterion 3 --------------------------------------------------

bool prohibition_overrides() {
    TestWorld world(false);
    world.as->policies().put(
        permit("https://policies.example/allow", "/docs/a", "read", kAlice));
    world.as->policies().put(
        prohibit("https://policies.example/deny", "/docs/a", "read"));
    httplib::Client client(world.as->base_uri());
    const json requested = json::array(
        {{{"resource_id", "/docs/a"}, {"resource_scopes", {"read"}}}});

    auto res = post_token(client, direct_token_request(world, requested,
                                                       world.claim_token()));
    bool ok = check(res && res->status == 403, "denied with both rules");
    ok &= check(res && json::parse(res->body).at("error") == "request_denied",
                "request_denied with both rules");

    world.as->policies().remove("https://policies.example/deny");
    res = post_token(client, direct_token_request(world, requested,
                                                  world.claim_token()));
    ok &= check(res && res->status == 200,
                "granted once the prohibition is removed");
    return ok;
}

// ---- criterion 4 --------------------------------------------------

bool oracle_equivalence() {
    testsupport::Rng rng(42424);
    for (int i = 0; i < 1000; ++i) {
        const auto policies = testsupport::random_small_store(rng);
        const auto req = testsupport::random_world_request(rng);
        const auto store = store_of(policies);
        uma::engine::StateOfTheWorld sotw;
        sotw.current_time = req.now;
        const auto decision = uma::engine::grant(store, claims_for(req),
                                                 req.requested, sotw);
        for (const auto& permission : req.requested) {
            for (const auto& action : permission.access_rights) {
                const auto naive = testsupport::naive_decide(
                    policies, req.webid, req.purpose, permission.resource,
                    action, req.now);
                const bool granted = decision.granted.count(
                                         {permission.resource, action}) > 0;
                if (!check(granted == naive.granted,
                           "case " + std::to_string(i) + ": grant parity on " +
                               permission.resource + " " + action)) {
                    return false;
                }
                if (granted) continue;
                const auto denied = std::find_if(
                    decision.denied.begin(), decision.denied.end(),
                    [&](const auto& d) {
                        return d.resource == permission.resource &&
                               d.action == action;
                    });
                if (!check(denied != decision.denied.end(),
                           "denied entry present")) {
                    return false;
                }
                const auto want_reason =
                    naive.prohibition
                        ? uma::engine::DenyReason::ProhibitionOverride
                        : uma::engine::DenyReason::NoActiveRule;
                if (!check(denied->reason == want_reason,
                           "case " + std::to_string(i) + ": reason parity")) {
                    return false;
                }
            }
        }
    }
    return true;
}

// ---- criterion 5 --------------------------------------------------

bool temporal_boundaries() {
    static constexpr uma::Timestamp bound = 1750000000;
    const auto granted_at = [](uma::odrl::ConstraintOperator op,
                               uma::Timestamp now) {
        auto policy = permit("https://policies.example/time", "/a", "read");
        uma::odrl::Constraint c;
        c.left_operand = uma::odrl::LeftOperand::DateTime;
        c.op = op;
        c.right_operand.emplace_back(bound);
        policy.rules[0].constraints.push_back(c);
        const auto store = store_of({policy});
        uma::claims::VerifiedClaims claims;
        claims.webid = kAlice;
        uma::engine::StateOfTheWorld sotw;
        sotw.current_time = now;
        const auto decision = uma::engine::grant(
            store, claims, {{"/a", {"read"}}}, sotw);
        return decision.granted.count({"/a", "read"}) > 0;
    };
    using Op = uma::odrl::ConstraintOperator;
    bool ok = check(granted_at(Op::Lt, bound - 1), "lt grants below bound");
    ok &= check(!granted_at(Op::Lt, bound), "lt denies at the bound");
    ok &= check(!granted_at(Op::Lt, bound + 1), "lt denies above bound");
    ok &= check(!granted_at(Op::Gt, bound - 1), "gt denies below bound");
    ok &= check(!granted_at(Op::Gt, bound), "gt denies at the bound");
    ok &= check(granted_at(Op::Gt, bound + 1), "gt grants above bound");
    return ok;
}

// ---- criterion 6 --------------------------------------------------

bool hierarchy_blindness() {
    const auto store = store_of(
        {permit("https://policies.example/container", "/c/", "read")});
    uma::claims::VerifiedClaims claims;
    claims.webid = kAlice;
    uma::engine::StateOfTheWorld sotw;
    sotw.current_time = 1750000000;
    const auto container = uma::engine::grant(store, claims,
                                              {{"/c/", {"read"}}}, sotw);
    const auto child = uma::engine::grant(store, claims, {{"/c/x", {"read"}}},
                                          sotw);
    bool ok = check(container.granted.count({"/c/", "read"}) == 1,
                    "rule on /c/ grants read on /c/");
    ok &= check(child.granted.empty(),
                "rule on /c/ grants nothing for /c/x");
    ok &= check(!child.denied.empty() &&
                    child.denied[0].reason ==
                        uma::engine::DenyReason::NoActiveRule,
                "child denial is NoActiveRule");
    return ok;
}

// ---- criterion 7 --------------------------------------------------

bool direct_mode_equivalence() {
    TestWorld world;
    testsupport::Rng rng(777);
    const std::vector<std::string> docs = {"/a", "/b", "/c/x"};
    const std::vector<std::string> methods = {"GET", "PUT", "DELETE"};

    for (int i = 0; i < 100; ++i) {
        reset_policies(world, testsupport::random_small_store(rng));
        auto& resources = world.rs->resources();
        if (!resources.exists("/c/")) resources.create_container("/c/");
        for (const auto& doc : docs) {
            if (!resources.exists(doc)) {
                resources.write(doc, "seed", "text/plain");
            }
        }

        const auto method = testsupport::choose(rng, methods);
        const auto path = method == "GET" && testsupport::pick(rng, 0, 3) == 0
                              ? std::string("/c/")
                              : testsupport::choose(rng, docs);
        const auto who = testsupport::pick(rng, 0, 1) == 0 ? kAlice : kBob;
        std::map<std::string, std::string> extra;
        if (testsupport::pick(rng, 0, 1) == 0) {
            extra["purpose"] =
                testsupport::pick(rng, 0, 1) == 0 ? "research" : "marketing";
        }
        const auto claim_token = world.claim_token(who, extra);

        uma::flow::RequestOptions ticket_mode;
        ticket_mode.method = method;
        ticket_mode.url = world.rs->base_uri() + path;
        ticket_mode.claim_token = claim_token;
        ticket_mode.body = "update";
        ticket_mode.content_type = "text/plain";
        const auto via_ticket = uma::flow::run_request(ticket_mode);

        auto direct = ticket_mode;
        direct.direct = true;
        direct.as_uri = world.as->base_uri();
        const auto via_direct = uma::flow::run_request(direct);

        const auto perms_of = [](const std::string& rpt) {
            if (rpt.empty()) return json::array();
            const auto payload = uma::claims::peek_payload(rpt);
            return payload ? payload->value("permissions", json::array())
                           : json::array();
        };
        if (!check(perms_of(via_ticket.rpt) == perms_of(via_direct.rpt),
                   "case " + std::to_string(i) + ": " + method + " " + path +
                       " RPT permission sets match")) {
            return false;
        }
    }
    return true;
}

// ---- criterion 8 --------------------------------------------------

bool ticket_lifecycle() {
    bool ok = true;
    {
        uma::tickets::TicketManager manager;
        const auto ticket = manager.issue({{"/a", {"read"}}}, 1750000000);
        std::atomic<int> successes{0};
        std::vector<std::thread> threads;
        for (int i = 0; i < 64; ++i) {
            threads.emplace_back([&] {
                try {
                    manager.resolve(ticket.ticket, 1750000001);
                    ++successes;
                } catch (const uma::tickets::TicketError&) {
                }
            });
        }
        for (auto& t : threads) t.join();
        ok &= check(successes == 1, "64-way resolve succeeds exactly once");
    }
    {
        uma::tickets::TicketManager manager;
        const auto at_bound = manager.issue({{"/a", {"read"}}}, 1750000000);
        try {
            manager.resolve(at_bound.ticket, 1750000300);
        } catch (const uma::tickets::TicketError&) {
            ok &= check(false, "ticket alive at the ttl boundary");
        }
        const auto past_bound = manager.issue({{"/a", {"read"}}}, 1750000000);
        bool expired = false;
        try {
            manager.resolve(past_bound.ticket, 1750000301);
        } catch (const uma::tickets::ExpiredTicket&) {
            expired = true;
        }
        ok &= check(expired, "ticket expired one second past the ttl");
    }
    {
        TestWorld world;
        world.rs->resources().create_container("/c/");
        world.rs->resources().write("/c/x", "x", "text/plain");
        httplib::Client rs(world.rs->base_uri());

        const auto challenge = rs.Delete("/c/x");
        static const std::regex pattern(R"re(ticket="([^"]*)")re");
        std::smatch match;
        const auto header = challenge->get_header_value("WWW-Authenticate");
        if (!check(std::regex_search(header, match, pattern),
                   "401 carries a ticket")) {
            return false;
        }
        const auto required = world.as->tickets().resolve(match[1],
                                                          uma::now_utc());
        const std::vector<RequestedPermission> expected = {
            {"/c/x", {"delete"}}, {"/c/", {"modify"}}};
        ok &= check(required == expected,
                    "401 ticket binds exactly the required permissions");

        // need_info re-issues a ticket for the same permission set.
        httplib::Client as(world.as->base_uri());
        const auto res = post_token(
            as, direct_token_request(world, permissions_json(expected), ""));
        ok &= check(res && res->status == 403, "need_info status");
        const auto body = json::parse(res->body);
        ok &= check(body.at("error") == "need_info", "need_info error code");
        const auto fresh = world.as->tickets().resolve(
            body.at("ticket").get<std::string>(), uma::now_utc());
        ok &= check(fresh == expected,
                    "need_info ticket binds the same permissions");
    }
    return ok;
}

// ---- criterion 9 --------------------------------------------------

bool token_scope_soundness() {
    TestWorld world;
    world.as->policies().put(
        permit("https://policies.example/fuzz", "/never", "read"));
    auto& resources = world.rs->resources();
    resources.create_container("/c/");
    resources.write("/c/x", "x", "text/plain");
    const std::vector<std::string> docs = {"/f0", "/f1", "/f2", "/c/x"};
    for (const auto& doc : docs) resources.write(doc, "seed", "text/plain");

    httplib::Client client(world.rs->base_uri());
    client.set_keep_alive(true);
    testsupport::Rng rng(90909);
    const std::vector<std::string> methods = {"GET", "PUT", "PATCH"};
    enum Category { None, Valid, UnderScoped, ExpiredTok, Forged, Tampered };
    const auto rogue = uma::claims::SigningKey::generate();

    int valid_successes = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto method = testsupport::choose(rng, methods);
        const auto path = method == "GET" && testsupport::pick(rng, 0, 4) == 0
                              ? std::string("/c/")
                              : testsupport::choose(rng, docs);
        const auto required =
            world.rs->compute_required_permissions(method, path).required;
        const auto category =
            static_cast<Category>(testsupport::pick(rng, 0, 5));

        httplib::Headers headers;
        switch (category) {
            case None:
                break;
            case Valid:
                headers = {{"Authorization",
                            "Bearer " + mint_rpt(world,
                                                 permissions_json(required))}};
                break;
            case UnderScoped: {
                auto held = required;
                if (testsupport::pick(rng, 0, 1) == 0) {
                    held[0].resource = "/somewhere/else";
                } else {
                    held[0].access_rights = {"unrelated"};
                }
                headers = {{"Authorization",
                            "Bearer " + mint_rpt(world,
                                                 permissions_json(held))}};
                break;
            }
            case ExpiredTok:
                headers = {{"Authorization",
                            "Bearer " + mint_rpt(world,
                                                 permissions_json(required),
                                                 -10)}};
                break;
            case Forged: {
                json payload = {{"sub", kAlice},
                                {"permissions", permissions_json(required)},
                                {"exp", uma::now_utc() + 600}};
                headers = {{"Authorization",
                            "Bearer " + uma::claims::encode_compact(payload,
                                                                    rogue)}};
                break;
            }
            case Tampered: {
                auto rpt = mint_rpt(world, permissions_json(required));
                const auto dot = rpt.find('.');
                rpt[dot + 2] = rpt[dot + 2] == 'A' ? 'B' : 'A';
                headers = {{"Authorization", "Bearer " + rpt}};
                break;
            }
        }

        httplib::Result res;
        if (method == "GET") {
            res = client.Get(path, headers);
        } else if (method == "PUT") {
            res = client.Put(path, headers, "fuzz", "text/plain");
        } else {
            res = client.Patch(path, headers, "fuzz", "text/plain");
        }
        if (!check(static_cast<bool>(res), "RS reachable")) return false;
        const bool success = res->status >= 200 && res->status < 300;
        if (success && category != Valid) {
            return check(false,
                         "iteration " + std::to_string(i) +
                             ": 2xx without a valid covering token (" +
                             method + " " + path + ", category " +
                             std::to_string(category) + ")");
        }
        if (success) ++valid_successes;
    }
    return check(valid_successes > 0, "valid tokens do succeed");
}

// ---- criterion 10 -------------------------------------------------

bool wire_format_goldens() {
    TestWorld world;
    world.as->policies().put(
        permit("https://policies.example/gold", "/docs/a", "read"));
    world.rs->resources().create_container("/docs/");
    world.rs->resources().write("/docs/a", "hello", "text/plain");

    bool ok = true;
    const auto as_base = world.as->base_uri();
    httplib::Client as(as_base);
    httplib::Client rs(world.rs->base_uri());

    // Discovery document.
    const auto discovery = as.Get("/.well-known/uma2-configuration");
    ok &= check(discovery && discovery->status == 200, "discovery fetch");
    const auto expected_discovery =
        json::parse(substitute(golden("discovery.json"), "{{AS}}", as_base))
            .dump();
    ok &= check(discovery->body == expected_discovery,
                "discovery document byte-matches");

    // WWW-Authenticate header.
    const auto challenge = rs.Get("/docs/a");
    ok &= check(challenge && challenge->status == 401, "challenge status");
    const auto header = challenge->get_header_value("WWW-Authenticate");
    static const std::regex pattern(R"re(ticket="([^"]*)")re");
    std::smatch match;
    ok &= check(std::regex_search(header, match, pattern),
                "header carries a ticket");
    const std::string ticket = match[1];
    ok &= check(header == trim(substitute(
                              substitute(golden("www_authenticate.txt"),
                                         "{{AS}}", as_base),
                              "{{TICKET}}", ticket)),
                "WWW-Authenticate byte-matches");

    // Token request and response bodies.
    const auto claim_token = world.claim_token();
    const auto request_body =
        json::parse(substitute(substitute(golden("token_request.json"),
                                          "{{TICKET}}", ticket),
                               "{{CLAIM_TOKEN}}", claim_token))
            .dump();
    const auto token_res =
        as.Post("/token", request_body, "application/json");
    ok &= check(token_res && token_res->status == 200,
                "golden token request is wire-valid");
    const auto rpt = json::parse(token_res->body)
                         .value("access_token", std::string{});
    ok &= check(token_res->body ==
                    json::parse(substitute(golden("token_response.json"),
                                           "{{RPT}}", rpt))
                        .dump(),
                "token response byte-matches");

    // Compact token encodings: fixed header segment, verified signature.
    const auto header_segment = trim(golden("token_header.txt"));
    ok &= check(rpt.substr(0, rpt.find('.')) == header_segment,
                "RPT header segment byte-matches");
    ok &= check(claim_token.substr(0, claim_token.find('.')) ==
                    header_segment,
                "claim token header segment byte-matches");
    ok &= check(uma::claims::verify_compact(
                    rpt, world.as->signing_key().public_key())
                    .has_value(),
                "RPT signature verifies");
    ok &= check(uma::claims::verify_compact(claim_token,
                                            world.issuer_key.public_key())
                    .has_value(),
                "claim token signature verifies");
    return ok;
}

struct Criterion {
    const char* name;
    bool (*run)();
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 end-to-end grant flow", end_to_end_grant_flow},
        {"2 default-deny on an empty store", default_deny},
        {"3 prohibition overrides permission", prohibition_overrides},
        {"4 oracle equivalence (1000 cases)", oracle_equivalence},
        {"5 strict temporal boundaries", temporal_boundaries},
        {"6 hierarchy blindness", hierarchy_blindness},
        {"7 direct-mode equivalence (100 cases)", direct_mode_equivalence},
        {"8 ticket lifecycle", ticket_lifecycle},
        {"9 token-scope soundness fuzz (10000 cases)", token_scope_soundness},
        {"10 wire-format goldens", wire_format_goldens},
    };
    int failures = 0;
    for (const auto& criterion : criteria) {
        bool passed = false;
        try {
            passed = criterion.run();
        } catch (const std::exception& e) {
            std::cerr << "    exception: " << e.what() << "\n";
        }
        std::cout << (passed ? "PASS" : "FAIL") << " criterion "
                  << criterion.name << "\n";
        if (!passed) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
