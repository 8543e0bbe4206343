#pragma once

// Shared fixtures for the test suites: deterministic random generators
// for policies and requests, and a deliberately naive reference
// evaluator kept independent of the engine under test.

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "uma/odrl/model.hpp"
#include "uma/wire.hpp"

namespace testsupport {

using uma::odrl::Constraint;
using uma::odrl::ConstraintOperator;
using uma::odrl::LeftOperand;
using uma::odrl::Policy;
using uma::odrl::PolicyType;
using uma::odrl::Rule;
using uma::odrl::RuleKind;

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& values) {
    return values[static_cast<std::size_t>(
        pick(rng, 0, static_cast<int>(values.size()) - 1))];
}

// --- Generator for arbitrary valid policies (round-trip property) ---

inline Constraint random_constraint(Rng& rng) {
    Constraint c;
    if (pick(rng, 0, 1) == 0) {
        c.left_operand = LeftOperand::DateTime;
        const std::vector<ConstraintOperator> ops = {
            ConstraintOperator::Eq,   ConstraintOperator::Neq,
            ConstraintOperator::Lt,   ConstraintOperator::Lteq,
            ConstraintOperator::Gt,   ConstraintOperator::Gteq,
            ConstraintOperator::IsAnyOf};
        c.op = choose(rng, ops);
        const int count =
            c.op == ConstraintOperator::IsAnyOf ? pick(rng, 1, 3) : 1;
        for (int i = 0; i < count; ++i) {
            c.right_operand.emplace_back(
                uma::Timestamp{1700000000 + pick(rng, 0, 1000000) * 60});
        }
    } else {
        c.left_operand = LeftOperand::Purpose;
        const std::vector<ConstraintOperator> ops = {
            ConstraintOperator::Eq, ConstraintOperator::Neq,
            ConstraintOperator::IsAnyOf};
        c.op = choose(rng, ops);
        const std::vector<std::string> purposes = {
            "https://purpose.example/research",
            "https://purpose.example/marketing",
            "https://purpose.example/care"};
        const int count =
            c.op == ConstraintOperator::IsAnyOf ? pick(rng, 1, 3) : 1;
        for (int i = 0; i < count; ++i) {
            c.right_operand.emplace_back(choose(rng, purposes));
        }
    }
    return c;
}

inline Policy random_policy(Rng& rng, int index) {
    Policy p;
    p.uid = "https://policies.example/p" + std::to_string(index) + "-" +
            std::to_string(pick(rng, 0, 999999));
    p.policy_type = static_cast<PolicyType>(pick(rng, 0, 2));
    const std::vector<std::string> targets = {
        "https://rs.example/docs/a", "https://rs.example/docs/b", "/c/",
        "/c/x", "/docs/a"};
    const std::vector<std::string> actions = {"read", "modify", "create",
                                              "delete"};
    const std::vector<std::string> parties = {"https://alice.example/id",
                                              "https://bob.example/id"};
    const int rule_count = pick(rng, 1, 4);
    for (int i = 0; i < rule_count; ++i) {
        Rule r;
        r.uid = p.uid + "#rule" + std::to_string(i);
        r.kind = pick(rng, 0, 3) == 0 ? RuleKind::Prohibition
                                      : RuleKind::Permission;
        r.target = choose(rng, targets);
        r.action = choose(rng, actions);
        if (pick(rng, 0, 1) == 0) r.assignee = choose(rng, parties);
        if (pick(rng, 0, 2) == 0) r.assigner = "https://owner.example/id";
        const int constraint_count = pick(rng, 0, 2);
        for (int j = 0; j < constraint_count; ++j) {
            r.constraints.push_back(random_constraint(rng));
        }
        p.rules.push_back(std::move(r));
    }
    return p;
}

// --- Small closed world for oracle-equivalence runs ---

struct WorldRequest {
    std::string webid;
    std::optional<std::string> purpose;
    std::vector<uma::RequestedPermission> requested;
    uma::Timestamp now = 0;
};

inline std::vector<Policy> random_small_store(Rng& rng) {
    const std::vector<std::string> targets = {"/a", "/b", "/c/", "/c/x"};
    const std::vector<std::string> actions = {"read", "modify", "delete"};
    const std::vector<std::string> parties = {"https://alice.example/id",
                                              "https://bob.example/id"};
    const std::vector<std::string> purposes = {"research", "marketing"};
    const uma::Timestamp base = 1750000000;

    std::vector<Policy> store;
    const int rule_total = pick(rng, 0, 6);
    int made = 0;
    int policy_index = 0;
    while (made < rule_total) {
        Policy p;
        p.uid = "https://policies.example/small-" +
                std::to_string(policy_index++);
        const int rules_here = std::min(rule_total - made, pick(rng, 1, 3));
        for (int i = 0; i < rules_here; ++i, ++made) {
            Rule r;
            r.uid = p.uid + "#r" + std::to_string(i);
            r.kind = pick(rng, 0, 2) == 0 ? RuleKind::Prohibition
                                          : RuleKind::Permission;
            r.target = choose(rng, targets);
            r.action = choose(rng, actions);
            if (pick(rng, 0, 1) == 0) r.assignee = choose(rng, parties);
            if (pick(rng, 0, 2) == 0) {
                Constraint c;
                if (pick(rng, 0, 1) == 0) {
                    c.left_operand = LeftOperand::DateTime;
                    const std::vector<ConstraintOperator> ops = {
                        ConstraintOperator::Lt, ConstraintOperator::Lteq,
                        ConstraintOperator::Gt, ConstraintOperator::Gteq,
                        ConstraintOperator::Eq};
                    c.op = choose(rng, ops);
                    c.right_operand.emplace_back(
                        uma::Timestamp{base + pick(rng, -5, 5) * 60});
                } else {
                    c.left_operand = LeftOperand::Purpose;
                    c.op = pick(rng, 0, 1) == 0 ? ConstraintOperator::Eq
                                                : ConstraintOperator::IsAnyOf;
                    const int count =
                        c.op == ConstraintOperator::IsAnyOf ? 2 : 1;
                    for (int j = 0; j < count; ++j) {
                        c.right_operand.emplace_back(choose(rng, purposes));
                    }
                }
                r.constraints.push_back(std::move(c));
            }
            p.rules.push_back(std::move(r));
        }
        store.push_back(std::move(p));
    }
    return store;
}

inline WorldRequest random_world_request(Rng& rng) {
    const std::vector<std::string> targets = {"/a", "/b", "/c/", "/c/x"};
    const std::vector<std::string> actions = {"read", "modify", "delete"};
    const std::vector<std::string> parties = {"https://alice.example/id",
                                              "https://bob.example/id"};
    WorldRequest req;
    req.webid = choose(rng, parties);
    if (pick(rng, 0, 1) == 0) {
        req.purpose = pick(rng, 0, 1) == 0 ? "research" : "marketing";
    }
    const int perm_count = pick(rng, 1, 2);
    for (int i = 0; i < perm_count; ++i) {
        uma::RequestedPermission p;
        p.resource = choose(rng, targets);
        const int right_count = pick(rng, 1, 2);
        for (int j = 0; j < right_count; ++j) {
            p.access_rights.insert(choose(rng, actions));
        }
        req.requested.push_back(std::move(p));
    }
    req.now = 1750000000 + pick(rng, -6, 6) * 60;
    return req;
}

// --- Naive reference evaluator -------------------------------------
// Enumerates every rule and applies the premise table directly; no
// reports, no normalization, no shared code with the engine.

inline bool naive_constraint_holds(const Constraint& c,
                                   const std::optional<std::string>& purpose,
                                   uma::Timestamp now) {
    if (c.left_operand == LeftOperand::DateTime) {
        if (c.op == ConstraintOperator::IsAnyOf) {
            for (const auto& v : c.right_operand) {
                if (std::holds_alternative<uma::Timestamp>(v) &&
                    std::get<uma::Timestamp>(v) == now) {
                    return true;
                }
            }
            return false;
        }
        const auto bound = std::get<uma::Timestamp>(c.right_operand.at(0));
        switch (c.op) {
            case ConstraintOperator::Eq: return now == bound;
            case ConstraintOperator::Neq: return now != bound;
            case ConstraintOperator::Lt: return now < bound;
            case ConstraintOperator::Lteq: return now <= bound;
            case ConstraintOperator::Gt: return now > bound;
            case ConstraintOperator::Gteq: return now >= bound;
            default: return false;
        }
    }
    if (!purpose) return false;
    if (c.op == ConstraintOperator::Eq) {
        return std::get<std::string>(c.right_operand.at(0)) == *purpose;
    }
    if (c.op == ConstraintOperator::Neq) {
        return std::get<std::string>(c.right_operand.at(0)) != *purpose;
    }
    for (const auto& v : c.right_operand) {
        if (std::get<std::string>(v) == *purpose) return true;
    }
    return false;
}

struct NaiveOutcome {
    bool granted = false;
    bool prohibition = false;  // reason, when denied
};

inline NaiveOutcome naive_decide(const std::vector<Policy>& store,
                                 const std::string& webid,
                                 const std::optional<std::string>& purpose,
                                 const std::string& resource,
                                 const std::string& action,
                                 uma::Timestamp now) {
    bool active_permission = false;
    bool active_prohibition = false;
    for (const auto& policy : store) {
        for (const auto& rule : policy.rules) {
            if (rule.target != resource) continue;
            if (rule.action != action) continue;
            if (rule.assignee && *rule.assignee != webid) continue;
            bool ok = true;
            for (const auto& c : rule.constraints) {
                if (!naive_constraint_holds(c, purpose, now)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (rule.kind == RuleKind::Permission) active_permission = true;
            if (rule.kind == RuleKind::Prohibition) active_prohibition = true;
        }
    }
    NaiveOutcome out;
    out.granted = active_permission && !active_prohibition;
    out.prohibition = active_prohibition;
    return out;
}

}  // namespace testsupport
