#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meandim/rational.hpp"
#include "meandim/rng.hpp"

namespace meandim {

using json = nlohmann::json;
using Point = Vec;
using PointMap = std::function<Point(const Point&)>;
using PointMetric = std::function<Rational(const Point&, const Point&)>;

/// l_inf distance of equal-length vectors.
Rational linf_distance(const Point& a, const Point& b);

/// A metric space the certificates talk about. Points are rational vectors;
/// `metric` returns an upper bound for the distance that is exact whenever the
/// space is finite-dimensional (window metrics add their tail bound).
struct MetricSpaceHandle {
    std::string kind;
    json descriptor;
    PointMetric metric;
    std::function<Point(Rng&)> sampler;
    /// Optional: pairs likely to share an image (used by fiber checks).
    std::function<std::pair<Point, Point>(Rng&)> pair_sampler;
    std::size_t point_size = 0;
};

/// A single point; used for the one-point factor in product identities.
MetricSpaceHandle one_point_space();

enum class ObligationKind { structural, sampled };
enum class ObligationStatus { discharged, sampled_only, failed };

std::string to_string(ObligationKind k);
std::string to_string(ObligationStatus s);

struct DischargeRecord {
    std::string name;
    ObligationKind kind = ObligationKind::structural;
    ObligationStatus status = ObligationStatus::discharged;
    json data = json::object();
    json witness = nullptr;

    json to_json() const;
    static DischargeRecord from_json(const json& j);
    bool ok() const { return status != ObligationStatus::failed; }
};

DischargeRecord structural(std::string name, bool holds, json data, json witness = nullptr);

/// Evaluable map with exact premises; asserts widim_epsilon(domain) <= target_dim
/// once every obligation is discharged.
struct EpsEmbeddingCertificate {
    MetricSpaceHandle domain;
    std::int64_t target_dim = 0;
    Rational epsilon = 1;
    std::optional<Rational> dim_bound;
    PointMap evaluator;
    PointMetric target_metric;
    std::size_t target_size = 0;
    std::vector<DischargeRecord> obligations;
    std::vector<std::int64_t> factor_dims;

    bool all_discharged() const;
    const DischargeRecord* find(const std::string& name) const;
    json to_json() const;
};

/// Identity map on `space` into itself; target_dim must be supplied by the caller
/// who knows a bound for the space (used for toy and test certificates).
EpsEmbeddingCertificate identity_certificate(MetricSpaceHandle space, std::int64_t target_dim, Rational epsilon);

/// f x g on the max-product metric. Factor lists are flattened so the
/// construction is associative.
EpsEmbeddingCertificate product_certificate(const EpsEmbeddingCertificate& c1, const EpsEmbeddingCertificate& c2);

/// Evidence that phi: new_domain -> c.domain does not decrease distances.
struct NondecreasingWitness {
    ObligationKind kind = ObligationKind::structural;
    /// Structural: one of "identity", "isometric_slice", "coordinate_inclusion",
    /// "window_projection" (the latter needs a window_tail_bound record).
    std::string name;
    json data = json::object();
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

EpsEmbeddingCertificate pullback_certificate(const EpsEmbeddingCertificate& c, MetricSpaceHandle new_domain,
                                             PointMap phi, const NondecreasingWitness& witness);

struct ChainBlock {
    EpsEmbeddingCertificate cert;
    std::int64_t length = 1;  // N_i
};

/// Certificate for (fiber, d_N) through x -> (x, T^{N_{i_1}} x, ...). `shift`
/// applies T^s to a domain point. With `a`, also checks dim_i < a N_i on every
/// block and the resulting total < a (N + max N_i).
EpsEmbeddingCertificate chain_fiber_certificate(MetricSpaceHandle domain,
                                                std::function<Point(const Point&, std::int64_t)> shift,
                                                const std::vector<ChainBlock>& blocks,
                                                const std::vector<std::size_t>& itinerary, std::int64_t n,
                                                std::optional<Rational> a = std::nullopt);

struct FiberCheckOptions {
    Rational epsilon;
    std::optional<Rational> eta;  // default epsilon / 100
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
};

/// Sampled necessary condition for an epsilon-embedding: every sampled pair
/// whose images are within eta must be closer than epsilon in the domain.
DischargeRecord sample_fiber_check(const PointMap& evaluator, const PointMetric& target_metric,
                                   const MetricSpaceHandle& domain, const FiberCheckOptions& opts);

/// Runs sample_fiber_check on a certificate and appends the record.
void attach_fiber_check(EpsEmbeddingCertificate& c, std::size_t trials, std::uint64_t seed,
                        std::optional<Rational> eta = std::nullopt);

}  // namespace meandim
