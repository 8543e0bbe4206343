#include "uma/engine/engine.hpp"

#include <algorithm>

#include "uma/iri.hpp"

namespace uma::engine {

using odrl::Constraint;
using odrl::ConstraintOperator;
using odrl::LeftOperand;
using odrl::Policy;
using odrl::Rule;
using odrl::RuleKind;

namespace {

std::string operand_repr(const odrl::OperandValue& v) {
    if (std::holds_alternative<Timestamp>(v)) {
        return format_rfc3339(std::get<Timestamp>(v));
    }
    return std::get<std::string>(v);
}

bool compare_times(Timestamp lhs, ConstraintOperator op, Timestamp rhs) {
    switch (op) {
        case ConstraintOperator::Eq: return lhs == rhs;
        case ConstraintOperator::Neq: return lhs != rhs;
        case ConstraintOperator::Lt: return lhs < rhs;
        case ConstraintOperator::Lteq: return lhs <= rhs;
        case ConstraintOperator::Gt: return lhs > rhs;
        case ConstraintOperator::Gteq: return lhs >= rhs;
        case ConstraintOperator::IsAnyOf: return false;  // handled by caller
    }
    return false;
}

PremiseReport check_constraint(const Constraint& c,
                               const EvaluationRequest& request,
                               const StateOfTheWorld& sotw) {
    PremiseReport premise;
    premise.kind = PremiseKind::ConstraintCheck;

    if (c.left_operand == LeftOperand::DateTime) {
        const Timestamp current = sotw.current_time;
        if (c.op == ConstraintOperator::IsAnyOf) {
            premise.satisfied = std::any_of(
                c.right_operand.begin(), c.right_operand.end(),
                [&](const auto& v) {
                    return std::holds_alternative<Timestamp>(v) &&
                           std::get<Timestamp>(v) == current;
                });
        } else if (!c.right_operand.empty() &&
                   std::holds_alternative<Timestamp>(c.right_operand[0])) {
            premise.satisfied = compare_times(
                current, c.op, std::get<Timestamp>(c.right_operand[0]));
        }
        premise.detail = "dateTime " + format_rfc3339(current) + " " +
                         odrl::to_string(c.op) + " " +
                         (c.right_operand.empty()
                              ? "<none>"
                              : operand_repr(c.right_operand[0]));
        return premise;
    }

    // purpose: resolved from the request context; missing claim fails
    // closed.
    const auto it = request.context.find("purpose");
    if (it == request.context.end()) {
        premise.detail = "purpose <unresolved> " + odrl::to_string(c.op);
        premise.satisfied = false;
        return premise;
    }
    const std::string& value = it->second;
    switch (c.op) {
        case ConstraintOperator::Eq:
            premise.satisfied = !c.right_operand.empty() &&
                                operand_repr(c.right_operand[0]) == value;
            break;
        case ConstraintOperator::Neq:
            premise.satisfied = !c.right_operand.empty() &&
                                operand_repr(c.right_operand[0]) != value;
            break;
        case ConstraintOperator::IsAnyOf:
            premise.satisfied = std::any_of(
                c.right_operand.begin(), c.right_operand.end(),
                [&](const auto& v) { return operand_repr(v) == value; });
            break;
        default:
            premise.satisfied = false;  // ordering undefined for purpose
            break;
    }
    premise.detail = "purpose " + value + " " + odrl::to_string(c.op);
    return premise;
}

RuleReport evaluate_rule(const Rule& rule, const EvaluationRequest& request,
                         const StateOfTheWorld& sotw) {
    RuleReport report;
    report.rule_uid = rule.uid;
    report.kind = rule.kind;

    report.premises.push_back(
        {PremiseKind::TargetMatch, rule.target + " = " + request.target,
         iri_equal(rule.target, request.target)});
    report.premises.push_back(
        {PremiseKind::ActionMatch, rule.action + " = " + request.action,
         iri_equal(rule.action, request.action)});
    const bool party_ok =
        !rule.assignee || iri_equal(*rule.assignee, request.requesting_party);
    report.premises.push_back(
        {PremiseKind::PartyMatch,
         (rule.assignee ? *rule.assignee : std::string("<any>")) + " = " +
             request.requesting_party,
         party_ok});
    for (const auto& c : rule.constraints) {
        report.premises.push_back(check_constraint(c, request, sotw));
    }
    report.active = std::all_of(report.premises.begin(), report.premises.end(),
                                [](const auto& p) { return p.satisfied; });
    return report;
}

}  // namespace

std::vector<EvaluationRequest> build_requests(
    const claims::VerifiedClaims& claims,
    const std::vector<RequestedPermission>& requested) {
    if (requested.empty()) {
        throw EmptyRequest("no permissions requested");
    }
    std::vector<EvaluationRequest> out;
    for (const auto& permission : requested) {
        for (const auto& action : permission.access_rights) {
            EvaluationRequest req;
            req.requesting_party = claims.webid;
            req.target = permission.resource;
            req.action = action;
            req.context = claims.context;
            out.push_back(std::move(req));
        }
    }
    return out;
}

ComplianceReport evaluate(const std::vector<Policy>& policies,
                          const EvaluationRequest& request,
                          const StateOfTheWorld& sotw) {
    ComplianceReport report;
    report.request = request;
    for (const auto& policy : policies) {
        for (const auto& rule : policy.rules) {
            // Exact target equality only: a rule for a container never
            // covers its members.
            if (!iri_equal(rule.target, request.target)) continue;
            report.rule_reports.push_back(evaluate_rule(rule, request, sotw));
        }
    }
    std::stable_sort(report.rule_reports.begin(), report.rule_reports.end(),
                     [](const RuleReport& a, const RuleReport& b) {
                         return a.rule_uid < b.rule_uid;
                     });
    return report;
}

Decision resolve(const std::vector<ComplianceReport>& reports,
                 const ResolutionConfig& config) {
    Decision decision;
    for (const auto& report : reports) {
        bool active_permission = false;
        bool active_prohibition = false;
        for (const auto& rule_report : report.rule_reports) {
            if (!rule_report.active) continue;  // inactive reports ignored
            (rule_report.kind == RuleKind::Permission ? active_permission
                                                      : active_prohibition) =
                true;
        }
        const auto& req = report.request;
        if (active_prohibition && config.prohibition_overrides) {
            decision.denied.push_back(
                {req.target, req.action, DenyReason::ProhibitionOverride});
        } else if (active_permission) {
            decision.granted.insert({req.target, req.action});
        } else {
            decision.denied.push_back(
                {req.target, req.action, DenyReason::NoActiveRule});
        }
    }
    return decision;
}

Decision grant(const odrl::PolicyStore& policies,
               const claims::VerifiedClaims& claims,
               const std::vector<RequestedPermission>& requested,
               const StateOfTheWorld& sotw, const ResolutionConfig& config) {
    const auto snapshot = policies.snapshot();
    std::vector<ComplianceReport> reports;
    for (const auto& request : build_requests(claims, requested)) {
        reports.push_back(evaluate(snapshot, request, sotw));
    }
    return resolve(reports, config);
}

nlohmann::ordered_json report_to_json(const ComplianceReport& report) {
    nlohmann::ordered_json out;
    out["request"] = {{"requestingParty", report.request.requesting_party},
                      {"target", report.request.target},
                      {"action", report.request.action},
                      {"context", report.request.context}};
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& rule_report : report.rule_reports) {
        nlohmann::ordered_json premises = nlohmann::ordered_json::array();
        for (const auto& premise : rule_report.premises) {
            premises.push_back({{"kind", to_string(premise.kind)},
                                {"detail", premise.detail},
                                {"status", premise.satisfied ? "Satisfied"
                                                             : "Unsatisfied"}});
        }
        rules.push_back(
            {{"rule", rule_report.rule_uid},
             {"kind", rule_report.kind == RuleKind::Permission
                          ? "PermissionReport"
                          : "ProhibitionReport"},
             {"premises", std::move(premises)},
             {"activation", rule_report.active ? "Active" : "Inactive"}});
    }
    out["ruleReports"] = std::move(rules);
    return out;
}

std::string to_string(PremiseKind kind) {
    switch (kind) {
        case PremiseKind::TargetMatch: return "TargetMatch";
        case PremiseKind::ActionMatch: return "ActionMatch";
        case PremiseKind::PartyMatch: return "PartyMatch";
        case PremiseKind::ConstraintCheck: return "ConstraintCheck";
    }
    return "ConstraintCheck";
}

std::string to_string(DenyReason reason) {
    return reason == DenyReason::NoActiveRule ? "NoActiveRule"
                                              : "ProhibitionOverride";
}

}  // namespace uma::engine
