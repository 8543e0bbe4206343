#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "uma/as/server.hpp"
#include "uma/claims/verifier.hpp"
#include "uma/engine/engine.hpp"
#include "uma/flow/flow.hpp"
#include "uma/odrl/store.hpp"
#include "uma/rs/server.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNotFound = 4;

std::map<std::string, std::string> parse_claims(
    const std::vector<std::string>& pairs) {
    std::map<std::string, std::string> out;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--claim", "expected name=value");
        }
        out[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return out;
}

int cmd_serve_as(const std::string& config_path) {
    try {
        auto config = uma::auth_server::ASConfig::from_file(config_path);
        auto server = uma::auth_server::AuthorizationServer::from_config(
            std::move(config));
        server->run();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "serve-as: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_serve_rs(const std::string& config_path) {
    try {
        auto config = uma::resource_server::RSConfig::from_file(config_path);
        uma::resource_server::ResourceServer server(std::move(config));
        server.run();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "serve-rs: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UMA grant flow driver: authorization server, resource "
                 "server, and requesting-party client"};
    app.require_subcommand(1);

    // serve-as / serve-rs
    std::string as_config_path, rs_config_path;
    auto* serve_as = app.add_subcommand(
        "serve-as", "Run the authorization server");
    serve_as->add_option("--config", as_config_path, "JSON config file")
        ->required();
    auto* serve_rs =
        app.add_subcommand("serve-rs", "Run the resource server");
    serve_rs->add_option("--config", rs_config_path, "JSON config file")
        ->required();

    // keygen
    std::string key_out;
    auto* keygen =
        app.add_subcommand("keygen", "Generate an Ed25519 signing key");
    keygen->add_option("--out", key_out, "Seed file to write")->required();

    // mint-token
    std::string mint_key_path, mint_webid, mint_issuer;
    std::vector<std::string> mint_claims;
    std::int64_t mint_exp_in = 3600;
    bool mint_decode = false;
    auto* mint = app.add_subcommand(
        "mint-token", "Mint a signed identity claim token");
    mint->add_option("--key", mint_key_path, "Issuer signing key file")
        ->required();
    mint->add_option("--webid", mint_webid, "Subject WebID");
    mint->add_option("--issuer", mint_issuer, "Issuer IRI")->required();
    mint->add_option("--claim", mint_claims,
                     "Extra claim as name=value (repeatable)");
    mint->add_option("--exp-in", mint_exp_in, "Lifetime in seconds");
    mint->add_flag("--decode", mint_decode,
                   "Also print the decoded payload");

    // policy
    std::string policy_store_path, policy_file, policy_uid;
    auto* policy = app.add_subcommand("policy", "Manage a policy store");
    policy->require_subcommand(1);
    auto* policy_add = policy->add_subcommand("add", "Add a policy file");
    auto* policy_list = policy->add_subcommand("list", "List policy uids");
    auto* policy_remove =
        policy->add_subcommand("remove", "Remove a policy by uid");
    for (auto* sub : {policy_add, policy_list, policy_remove}) {
        sub->add_option("--store", policy_store_path, "Policy directory")
            ->required();
    }
    policy_add->add_option("--file", policy_file, "Policy document")
        ->required();
    policy_remove->add_option("--uid", policy_uid, "Policy uid")->required();

    // request
    std::string req_method = "GET", req_url, req_body, req_content_type =
        "application/octet-stream";
    std::string req_claim_token, req_webid_key, req_webid, req_issuer;
    std::vector<std::string> req_claims;
    std::string req_as_uri, req_explain_store;
    bool req_direct = false, req_json = false, req_explain = false;
    auto* request = app.add_subcommand(
        "request", "Run the grant flow against a protected resource");
    request->add_option("method", req_method, "HTTP method")->required();
    request->add_option("url", req_url, "Resource URL")->required();
    request->add_option("--body", req_body, "Request body");
    request->add_option("--content-type", req_content_type, "Body type");
    request->add_option("--claim-token", req_claim_token,
                        "Pre-minted claim token");
    request->add_option("--webid-key", req_webid_key,
                        "Signing key used to mint a claim token locally");
    request->add_option("--webid", req_webid, "WebID for --webid-key");
    request->add_option("--issuer", req_issuer, "Issuer for --webid-key");
    request->add_option("--claim", req_claims,
                        "Extra claim as name=value (repeatable)");
    request->add_flag("--direct", req_direct,
                      "Skip the RS attempt and post permissions directly");
    request->add_option("--as", req_as_uri, "AS URI (direct mode)");
    request->add_flag("--explain", req_explain,
                      "Print local compliance reports (co-located AS only)");
    request->add_option("--policy-store", req_explain_store,
                        "Policy directory for --explain");
    request->add_flag("--json", req_json, "JSON transcript output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_as) return cmd_serve_as(as_config_path);
        if (*serve_rs) return cmd_serve_rs(rs_config_path);

        if (*keygen) {
            const auto key = uma::claims::SigningKey::generate();
            key.save_seed(key_out);
            std::cout << key.public_key_hex() << "\n";
            return 0;
        }

        if (*mint) {
            uma::claims::SigningKey key = [&] {
                try {
                    return uma::claims::SigningKey::load(mint_key_path);
                } catch (const uma::claims::KeyError& e) {
                    std::cerr << "mint-token: " << e.what() << "\n";
                    std::exit(kExitConfig);
                }
            }();
            const auto token = uma::claims::mint_test_token(
                mint_webid, mint_issuer, key, parse_claims(mint_claims),
                uma::now_utc() + mint_exp_in);
            std::cout << token.raw << "\n";
            if (mint_decode) {
                const auto payload = uma::claims::peek_payload(token.raw);
                if (payload) std::cout << payload->dump(2) << "\n";
            }
            return 0;
        }

        if (*policy) {
            auto store = uma::odrl::PolicyStore::open(policy_store_path);
            if (*policy_add) {
                std::ifstream in(policy_file, std::ios::binary);
                if (!in) {
                    std::cerr << "policy add: cannot read " << policy_file
                              << "\n";
                    return kExitConfig;
                }
                std::ostringstream buf;
                buf << in.rdbuf();
                try {
                    auto parsed = uma::odrl::parse_policy(buf.str());
                    store.put(parsed);
                    std::cout << parsed.uid << "\n";
                } catch (const uma::odrl::ParseError& e) {
                    std::cerr << "policy add: parse error at " << e.locus
                              << ": " << e.what() << "\n";
                    return 1;
                } catch (const uma::odrl::ValidationError& e) {
                    std::cerr << "policy add: " << e.what() << "\n";
                    return 1;
                }
            } else if (*policy_list) {
                for (const auto& uid : store.list()) {
                    std::cout << uid << "\n";
                }
            } else if (*policy_remove) {
                try {
                    store.remove(policy_uid);
                } catch (const uma::odrl::NotFound& e) {
                    std::cerr << "policy remove: " << e.what() << "\n";
                    return kExitNotFound;
                }
            }
            return 0;
        }

        if (*request) {
            uma::flow::RequestOptions options;
            options.method = req_method;
            options.url = req_url;
            options.body = req_body;
            options.content_type = req_content_type;
            options.direct = req_direct;
            options.as_uri = req_as_uri;
            if (!req_claim_token.empty()) {
                options.claim_token = req_claim_token;
            } else if (!req_webid_key.empty()) {
                if (req_webid.empty() || req_issuer.empty()) {
                    std::cerr << "request: --webid-key needs --webid and "
                                 "--issuer\n";
                    return kExitConfig;
                }
                uma::claims::SigningKey key = [&] {
                    try {
                        return uma::claims::SigningKey::load(req_webid_key);
                    } catch (const uma::claims::KeyError& e) {
                        std::cerr << "request: " << e.what() << "\n";
                        std::exit(kExitConfig);
                    }
                }();
                options.claim_token =
                    uma::claims::mint_test_token(req_webid, req_issuer, key,
                                                 parse_claims(req_claims),
                                                 uma::now_utc() + 3600)
                        .raw;
            }
            const auto transcript = uma::flow::run_request(options);
            if (req_json) {
                std::cout << uma::flow::transcript_to_json(transcript).dump(2)
                          << "\n";
            } else {
                std::cout << uma::flow::transcript_to_text(transcript);
            }

            // Local-only explainability: evaluate against a co-located
            // policy store; the AS itself stays opaque over the wire.
            if (req_explain && !req_explain_store.empty()) {
                const auto store =
                    uma::odrl::PolicyStore::load(req_explain_store);
                uma::claims::VerifiedClaims local_claims;
                if (const auto payload =
                        uma::claims::peek_payload(options.claim_token)) {
                    local_claims.webid = payload->value("webid", "");
                    for (const auto& [name, value] : payload->items()) {
                        if (name == "iss" || name == "exp" ||
                            name == "webid") {
                            continue;
                        }
                        local_claims.context[name] =
                            value.is_string() ? value.get<std::string>()
                                              : value.dump();
                    }
                }
                const auto target_path =
                    req_url.substr(req_url.find('/', req_url.find("://") + 3));
                uma::engine::StateOfTheWorld sotw;
                sotw.current_time = uma::now_utc();
                const auto snapshot = store.snapshot();
                for (const auto& request_item : uma::engine::build_requests(
                         local_claims,
                         uma::flow::permissions_for(req_method,
                                                    target_path))) {
                    std::cout << uma::engine::report_to_json(
                                     uma::engine::evaluate(snapshot,
                                                           request_item,
                                                           sotw))
                                     .dump(2)
                              << "\n";
                }
            }
            return uma::flow::exit_code(transcript.outcome);
        }
    } catch (const std::exception& e) {
        std::cerr << "uma-odrl: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
