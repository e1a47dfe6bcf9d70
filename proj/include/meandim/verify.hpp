#pragma once

#include <optional>
#include <string>
#include <vector>

#include "meandim/certs.hpp"
#include "meandim/complex.hpp"
#include "meandim/symdyn.hpp"

namespace meandim {

/// Re-discharges a structural record from its serialized data alone.
/// nullopt for names without a checker.
std::optional<bool> check_structural(const DischargeRecord& r);

/// Report for ocap_limit (n empty) or ocap_finite_N.
json ocap_report(const Sft& s, const CylinderSet& a, std::optional<std::int64_t> n);
/// Report for sbp_cover_refine.
json sbp_report(const Sft& s, const std::vector<CylinderSet>& cover, const Rational& delta);
/// dim K'(A_i) for the dimension buckets of K.
json bucket_report(const SimplicialComplex& k, int m);

/// Rebuilds an artifact from its descriptor, replaying sampled records at their
/// recorded seeds. nullopt when the descriptor kind is not rebuildable.
std::optional<json> rebuild_artifact(const json& artifact);

struct VerifyResult {
    int exit_code = 0;
    std::string obligation;  // first failing obligation
    std::string message;
    json detail = nullptr;
};

/// Accepts a certificate, an obligation report, or a set of either.
VerifyResult verify_artifact(const json& artifact);

}  // namespace meandim
