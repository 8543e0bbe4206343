#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "uma/time.hpp"

namespace uma::odrl {

enum class PolicyType { Set, Offer, Agreement };
enum class RuleKind { Permission, Prohibition };
enum class LeftOperand { DateTime, Purpose };
enum class ConstraintOperator { Eq, Neq, Lt, Lteq, Gt, Gteq, IsAnyOf };

std::string to_string(PolicyType t);
std::string to_string(RuleKind k);
std::string to_string(LeftOperand op);
std::string to_string(ConstraintOperator op);

/// A right operand is a timestamp (dateTime constraints), a single
/// IRI/string, or a list of either (isAnyOf).
using OperandValue = std::variant<Timestamp, std::string>;

struct Constraint {
    LeftOperand left_operand;
    ConstraintOperator op;
    std::vector<OperandValue> right_operand;  // singleton unless isAnyOf

    bool operator==(const Constraint&) const = default;
};

struct Rule {
    std::string uid;
    RuleKind kind;
    std::string target;  // resource identifier
    std::string action;  // access right
    std::optional<std::string> assignee;
    std::optional<std::string> assigner;
    std::vector<Constraint> constraints;

    bool operator==(const Rule&) const = default;
};

struct Policy {
    std::string uid;
    PolicyType policy_type = PolicyType::Set;
    std::vector<Rule> rules;  // at least one
};

/// Semantic equality: rule order is immaterial.
bool operator==(const Policy& a, const Policy& b);

/// Malformed document: bad JSON, unknown field, wrong value shape.
/// `locus` names the offending field or position.
struct ParseError : std::runtime_error {
    ParseError(std::string locus_, const std::string& what_)
        : std::runtime_error(locus_ + ": " + what_), locus(std::move(locus_)) {}
    std::string locus;
};

/// Well-formed document violating a model invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the fixed-context ODRL JSON serialization. Unknown fields
/// are rejected, not ignored. Rules without an explicit uid get a
/// stable derived one (`<policy uid>#r<N>` in document order).
Policy parse_policy(std::string_view document);

/// Checks every model invariant; throws ValidationError on the first
/// violation.
void validate(const Policy& policy);

/// Canonical serialization: fixed key order, rules sorted by uid,
/// absent optionals omitted, timestamps rendered as UTC. Byte equality
/// of outputs implies semantic equality of policies.
std::string serialize_policy(const Policy& policy);

nlohmann::ordered_json policy_to_json(const Policy& policy);

}  // namespace uma::odrl
