#include "uma/odrl/model.hpp"

#include <algorithm>

namespace uma::odrl {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* kPolicyKeys[] = {"uid", "type", "permission", "prohibition"};
const char* kRuleKeys[] = {"uid",      "target",   "action",
                           "assignee", "assigner", "constraint"};
const char* kConstraintKeys[] = {"leftOperand", "operator", "rightOperand"};

template <std::size_t N>
void reject_unknown_fields(const json& obj, const char* (&known)[N],
                           const std::string& locus) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(std::begin(known), std::end(known), key) ==
            std::end(known)) {
            throw ParseError(locus + "." + key, "unknown field");
        }
    }
}

std::string get_string(const json& obj, const char* key,
                       const std::string& locus) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(locus + "." + key, "missing field");
    if (!it->is_string()) {
        throw ParseError(locus + "." + key, "expected a string");
    }
    return it->get<std::string>();
}

PolicyType parse_policy_type(const std::string& s, const std::string& locus) {
    if (s == "Set") return PolicyType::Set;
    if (s == "Offer") return PolicyType::Offer;
    if (s == "Agreement") return PolicyType::Agreement;
    throw ParseError(locus, "unknown policy type '" + s + "'");
}

LeftOperand parse_left_operand(const std::string& s,
                               const std::string& locus) {
    if (s == "dateTime") return LeftOperand::DateTime;
    if (s == "purpose") return LeftOperand::Purpose;
    throw ParseError(locus, "unsupported leftOperand '" + s + "'");
}

ConstraintOperator parse_operator(const std::string& s,
                                  const std::string& locus) {
    if (s == "eq") return ConstraintOperator::Eq;
    if (s == "neq") return ConstraintOperator::Neq;
    if (s == "lt") return ConstraintOperator::Lt;
    if (s == "lteq") return ConstraintOperator::Lteq;
    if (s == "gt") return ConstraintOperator::Gt;
    if (s == "gteq") return ConstraintOperator::Gteq;
    if (s == "isAnyOf") return ConstraintOperator::IsAnyOf;
    throw ParseError(locus, "unsupported operator '" + s + "'");
}

OperandValue parse_operand_value(const json& value, LeftOperand left,
                                 const std::string& locus) {
    if (!value.is_string()) {
        throw ParseError(locus, "rightOperand values must be strings");
    }
    const auto s = value.get<std::string>();
    if (left == LeftOperand::DateTime) {
        const auto ts = parse_rfc3339(s);
        if (!ts) throw ParseError(locus, "not an RFC 3339 timestamp: " + s);
        return *ts;
    }
    return s;
}

Constraint parse_constraint(const json& obj, const std::string& locus) {
    if (!obj.is_object()) throw ParseError(locus, "expected an object");
    reject_unknown_fields(obj, kConstraintKeys, locus);
    Constraint c;
    c.left_operand =
        parse_left_operand(get_string(obj, "leftOperand", locus), locus);
    c.op = parse_operator(get_string(obj, "operator", locus), locus);
    const auto it = obj.find("rightOperand");
    if (it == obj.end()) {
        throw ParseError(locus + ".rightOperand", "missing field");
    }
    if (it->is_array()) {
        for (const auto& v : *it) {
            c.right_operand.push_back(parse_operand_value(
                v, c.left_operand, locus + ".rightOperand"));
        }
    } else {
        c.right_operand.push_back(parse_operand_value(
            *it, c.left_operand, locus + ".rightOperand"));
    }
    return c;
}

Rule parse_rule(const json& obj, RuleKind kind, const std::string& policy_uid,
                std::size_t index, const std::string& locus) {
    if (!obj.is_object()) throw ParseError(locus, "expected an object");
    reject_unknown_fields(obj, kRuleKeys, locus);
    Rule r;
    r.kind = kind;
    r.uid = obj.contains("uid") ? get_string(obj, "uid", locus)
                                : policy_uid + "#r" + std::to_string(index);
    r.target = get_string(obj, "target", locus);
    r.action = get_string(obj, "action", locus);
    if (obj.contains("assignee")) {
        r.assignee = get_string(obj, "assignee", locus);
    }
    if (obj.contains("assigner")) {
        r.assigner = get_string(obj, "assigner", locus);
    }
    if (const auto it = obj.find("constraint"); it != obj.end()) {
        if (!it->is_array()) {
            throw ParseError(locus + ".constraint", "expected an array");
        }
        std::size_t i = 0;
        for (const auto& c : *it) {
            r.constraints.push_back(parse_constraint(
                c, locus + ".constraint[" + std::to_string(i++) + "]"));
        }
    }
    return r;
}

ordered_json operand_to_json(const OperandValue& v) {
    if (std::holds_alternative<Timestamp>(v)) {
        return format_rfc3339(std::get<Timestamp>(v));
    }
    return std::get<std::string>(v);
}

ordered_json rule_to_json(const Rule& r) {
    ordered_json out;
    out["uid"] = r.uid;
    out["target"] = r.target;
    out["action"] = r.action;
    if (r.assignee) out["assignee"] = *r.assignee;
    if (r.assigner) out["assigner"] = *r.assigner;
    if (!r.constraints.empty()) {
        ordered_json cs = ordered_json::array();
        for (const auto& c : r.constraints) {
            ordered_json cj;
            cj["leftOperand"] = to_string(c.left_operand);
            cj["operator"] = to_string(c.op);
            if (c.op == ConstraintOperator::IsAnyOf) {
                ordered_json vals = ordered_json::array();
                for (const auto& v : c.right_operand) {
                    vals.push_back(operand_to_json(v));
                }
                cj["rightOperand"] = std::move(vals);
            } else {
                cj["rightOperand"] = operand_to_json(c.right_operand.empty()
                                                         ? OperandValue{""}
                                                         : c.right_operand[0]);
            }
            cs.push_back(std::move(cj));
        }
        out["constraint"] = std::move(cs);
    }
    return out;
}

}  // namespace

std::string to_string(PolicyType t) {
    switch (t) {
        case PolicyType::Set: return "Set";
        case PolicyType::Offer: return "Offer";
        case PolicyType::Agreement: return "Agreement";
    }
    return "Set";
}

std::string to_string(RuleKind k) {
    return k == RuleKind::Permission ? "Permission" : "Prohibition";
}

std::string to_string(LeftOperand op) {
    return op == LeftOperand::DateTime ? "dateTime" : "purpose";
}

std::string to_string(ConstraintOperator op) {
    switch (op) {
        case ConstraintOperator::Eq: return "eq";
        case ConstraintOperator::Neq: return "neq";
        case ConstraintOperator::Lt: return "lt";
        case ConstraintOperator::Lteq: return "lteq";
        case ConstraintOperator::Gt: return "gt";
        case ConstraintOperator::Gteq: return "gteq";
        case ConstraintOperator::IsAnyOf: return "isAnyOf";
    }
    return "eq";
}

Policy parse_policy(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "policy must be an object");
    reject_unknown_fields(doc, kPolicyKeys, "$");

    Policy p;
    p.uid = get_string(doc, "uid", "$");
    if (doc.contains("type")) {
        p.policy_type = parse_policy_type(get_string(doc, "type", "$"), "$.type");
    }
    std::size_t index = 0;
    for (const auto [key, kind] :
         {std::pair{"permission", RuleKind::Permission},
          std::pair{"prohibition", RuleKind::Prohibition}}) {
        const auto it = doc.find(key);
        if (it == doc.end()) continue;
        if (!it->is_array()) {
            throw ParseError(std::string("$.") + key, "expected an array");
        }
        std::size_t i = 0;
        for (const auto& rule : *it) {
            p.rules.push_back(
                parse_rule(rule, kind, p.uid, index++,
                           std::string("$.") + key + "[" +
                               std::to_string(i++) + "]"));
        }
    }
    validate(p);
    return p;
}

void validate(const Policy& policy) {
    if (policy.uid.empty()) {
        throw ValidationError("policy uid must be non-empty");
    }
    if (policy.rules.empty()) {
        throw ValidationError("policy requires at least one rule");
    }
    for (const auto& r : policy.rules) {
        if (r.uid.empty()) throw ValidationError("rule uid must be non-empty");
        if (r.target.empty()) {
            throw ValidationError("rule " + r.uid + ": target must be non-empty");
        }
        if (r.action.empty()) {
            throw ValidationError("rule " + r.uid + ": action must be non-empty");
        }
        for (const auto& c : r.constraints) {
            const bool ordering = c.op == ConstraintOperator::Lt ||
                                  c.op == ConstraintOperator::Lteq ||
                                  c.op == ConstraintOperator::Gt ||
                                  c.op == ConstraintOperator::Gteq;
            if (ordering && (c.left_operand != LeftOperand::DateTime ||
                             c.right_operand.size() != 1 ||
                             !std::holds_alternative<Timestamp>(
                                 c.right_operand[0]))) {
                throw ValidationError(
                    "rule " + r.uid +
                    ": ordering operators require a dateTime operand");
            }
            if (c.op == ConstraintOperator::IsAnyOf &&
                c.right_operand.empty()) {
                throw ValidationError(
                    "rule " + r.uid +
                    ": isAnyOf requires a non-empty operand list");
            }
            if (c.op != ConstraintOperator::IsAnyOf &&
                c.right_operand.size() != 1) {
                throw ValidationError(
                    "rule " + r.uid +
                    ": operator takes exactly one rightOperand");
            }
        }
    }
}

nlohmann::ordered_json policy_to_json(const Policy& policy) {
    ordered_json out;
    out["uid"] = policy.uid;
    out["type"] = to_string(policy.policy_type);
    for (const auto [key, kind] :
         {std::pair{"permission", RuleKind::Permission},
          std::pair{"prohibition", RuleKind::Prohibition}}) {
        std::vector<const Rule*> rules;
        for (const auto& r : policy.rules) {
            if (r.kind == kind) rules.push_back(&r);
        }
        if (rules.empty()) continue;
        std::sort(rules.begin(), rules.end(),
                  [](const Rule* a, const Rule* b) { return a->uid < b->uid; });
        ordered_json arr = ordered_json::array();
        for (const Rule* r : rules) arr.push_back(rule_to_json(*r));
        out[key] = std::move(arr);
    }
    return out;
}

std::string serialize_policy(const Policy& policy) {
    validate(policy);
    return policy_to_json(policy).dump(2) + "\n";
}

bool operator==(const Policy& a, const Policy& b) {
    return policy_to_json(a) == policy_to_json(b);
}

}  // namespace uma::odrl
