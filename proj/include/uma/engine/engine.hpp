#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "uma/claims/verifier.hpp"
#include "uma/odrl/model.hpp"
#include "uma/odrl/store.hpp"
#include "uma/time.hpp"
#include "uma/wire.hpp"

namespace uma::engine {

/// One (target, action) pair under evaluation, linked to the verified
/// requesting party and its claim context.
struct EvaluationRequest {
    std::string requesting_party;  // verified WebID
    std::string target;
    std::string action;
    std::map<std::string, std::string> context;  // e.g. purpose

    bool operator==(const EvaluationRequest&) const = default;
};

/// Contextual facts for evaluation. The current time is injected;
/// the engine never reads a wall clock.
struct StateOfTheWorld {
    Timestamp current_time = 0;
    std::map<std::string, std::string> facts;
};

enum class PremiseKind { TargetMatch, ActionMatch, PartyMatch, ConstraintCheck };

struct PremiseReport {
    PremiseKind kind;
    std::string detail;  // operands compared
    bool satisfied = false;
};

struct RuleReport {
    std::string rule_uid;
    odrl::RuleKind kind;
    std::vector<PremiseReport> premises;
    bool active = false;  // all premises satisfied
};

struct ComplianceReport {
    EvaluationRequest request;
    std::vector<RuleReport> rule_reports;  // ordered by rule uid
};

enum class DenyReason { NoActiveRule, ProhibitionOverride };

struct DeniedPermission {
    std::string resource;
    std::string action;
    DenyReason reason;

    bool operator==(const DeniedPermission&) const = default;
};

struct Decision {
    std::set<std::pair<std::string, std::string>> granted;
    std::vector<DeniedPermission> denied;

    bool operator==(const Decision&) const = default;
};

struct ResolutionConfig {
    // Prohibition-overrides-permission composes with default-deny by
    // default; the flag exists for experimentation only.
    bool prohibition_overrides = true;
};

struct EmptyRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Expands each RequestedPermission into one EvaluationRequest per
/// access right, carrying the verified WebID and claim context
/// verbatim. Throws EmptyRequest when `requested` is empty.
std::vector<EvaluationRequest> build_requests(
    const claims::VerifiedClaims& claims,
    const std::vector<RequestedPermission>& requested);

/// Evaluates one request against every rule whose target equals the
/// request target (exact IRI equality after normalization; container
/// hierarchy is deliberately invisible here). Pure and deterministic;
/// unknown operands yield unsatisfied constraint checks, never errors.
ComplianceReport evaluate(const std::vector<odrl::Policy>& policies,
                          const EvaluationRequest& request,
                          const StateOfTheWorld& sotw);

/// Resolves reports into a decision: a (resource, action) is granted
/// iff its report holds at least one active Permission report and no
/// active Prohibition report; otherwise denied with a reason.
Decision resolve(const std::vector<ComplianceReport>& reports,
                 const ResolutionConfig& config = {});

/// build_requests → evaluate per request → resolve.
Decision grant(const odrl::PolicyStore& policies,
               const claims::VerifiedClaims& claims,
               const std::vector<RequestedPermission>& requested,
               const StateOfTheWorld& sotw,
               const ResolutionConfig& config = {});

/// Canonical JSON export of a compliance report (stable ordering).
nlohmann::ordered_json report_to_json(const ComplianceReport& report);

std::string to_string(PremiseKind kind);
std::string to_string(DenyReason reason);

}  // namespace uma::engine
