#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meandim/certs.hpp"
#include "meandim/gromov.hpp"
#include "meandim/symdyn.hpp"

namespace meandim {

struct Inequality {
    std::string name;
    bool holds = true;
    bool fatal = true;
    json data = json::object();
};

/// Parameters of the counterexample factor map. The block length is 2^k, so
/// L = 2^k - 1 and L' = 2^k + 1.
struct CounterexampleParams {
    Rational delta;
    Rational eps;
    int m = 0;
    int k = 0;
    int M = 0;
    /// Keep going when m/L < delta/2 fails (the inequality is still reported).
    bool allow_density_violation = false;
    std::uint64_t seed = 0;

    std::int64_t block() const { return std::int64_t{1} << k; }
    std::int64_t L() const { return block() - 1; }
    std::int64_t L_prime() const { return block() + 1; }
    /// Inner scale of the block maps.
    Rational scale() const { return eps / 4; }
    /// Σ_{|n|>=M} 2^{-|n|}.
    Rational tail() const { return pow2(2 - M); }

    /// Smallest m, k and M satisfying every inequality.
    static CounterexampleParams derive(const Rational& delta, const Rational& eps, std::uint64_t seed = 0);
    /// Fixed odometer level; m and M derived.
    static CounterexampleParams with_level(const Rational& delta, const Rational& eps, int k,
                                           bool allow_density_violation, std::uint64_t seed = 0);

    std::vector<Inequality> inequalities() const;
    /// Throws PreconditionError naming the first fatal inequality that fails.
    void validate() const;
    json to_json() const;
    static CounterexampleParams from_json(const json& j);
};

/// Smallest M with tail < eps/2 and (3 - tail) * scale + tail < eps.
int window_margin(const Rational& eps, const Rational& scale);

/// A point of [0,1]^Z x Z on a finite window; z enters only through r = z mod 2^k.
struct SamplePoint {
    Window x;
    std::int64_t r = 0;
    std::uint64_t seed = 0;
};

/// pi(x, z) = (f(x, z), z) restricted to the full blocks inside the window.
struct Image {
    Window p;
    std::int64_t r = 0;
};

struct FactorMapInstance {
    CounterexampleParams params;
    OdometerTower tower{0};
    PaddedBlockMap block;

    /// [-M - L', N + M + L'): enough coordinates for every quantity at horizon N.
    std::pair<std::int64_t, std::int64_t> horizon(std::int64_t n) const;
    /// f on every block [a, a + 2^k) contained in the window.
    Window eval_f(const Window& x, std::int64_t r) const;
    Image pi(const SamplePoint& s) const;
    /// Random point on the horizon window: coordinates in {0, 1/64, ..., 1}.
    SamplePoint sample(std::int64_t n, std::uint64_t seed) const;
};

FactorMapInstance build_counterexample(const CounterexampleParams& params);

struct NonzeroReport {
    std::int64_t N = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::int64_t max_count = 0;
    std::int64_t block_bound = 0;  // (ceil(N / 2^k) + 1)(m - 1)
    Rational density_bound;          // delta N / 2 + 2m
    std::int64_t image_dim = 0;    // coordinate-subspace hull of f(X) on [0, N)
    json witness = nullptr;
    std::vector<DischargeRecord> obligations;

    bool ok() const;
    json to_json(const CounterexampleParams& p) const;
};

/// Number of nonzero entries of f(x, z)|_[0,N).
std::int64_t nonzero_count(const FactorMapInstance& inst, const SamplePoint& s, std::int64_t n);
/// max_r Σ_blocks |[a, a + m - 1) ∩ [0, N)|.
std::int64_t image_dimension(const CounterexampleParams& p, std::int64_t n);

NonzeroReport nonzero_count_check(const FactorMapInstance& inst, std::size_t samples, std::int64_t n,
                                  std::uint64_t seed);

/// Certificate for (pi^{-1}(y), d_N) where y = pi(base): projection onto
/// [a_0, a_{k+1}) followed by the product of the block fiber certificates.
EpsEmbeddingCertificate fiber_dimension_certificate(const FactorMapInstance& inst, const Image& y,
                                                    const SamplePoint& base, std::int64_t n);
/// Same, with y = pi(base).
EpsEmbeddingCertificate fiber_dimension_certificate(const FactorMapInstance& inst, const SamplePoint& base,
                                                    std::int64_t n);

struct MdimRow {
    Rational eps;
    std::int64_t N = 0;
    std::int64_t fiber_dim = 0;  // sup over y of the certified fiber dimension
    std::int64_t image_dim = 0;
    int m = 0;
    int M = 0;
    std::int64_t L_prime = 0;
    Rational delta;

    Rational fiber_ratio() const { return make_rational(fiber_dim, N); }
    Rational image_ratio() const { return make_rational(image_dim, N); }
    /// 1/m + (2M + 2L') / (m N).
    Rational fiber_ratio_bound() const;
};

/// Certified fiber dimension at horizon N, uniform over y.
std::int64_t uniform_fiber_dimension(const CounterexampleParams& p, std::int64_t n);

/// One row per (eps, N); delta, k and the density flag come from `base`.
std::vector<MdimRow> mdim_report(const CounterexampleParams& base, const std::vector<Rational>& eps_list,
                                 const std::vector<std::int64_t>& n_list);
/// pi_1 x ... x pi_j with eps_n = 1/n and delta_n = delta / 2^n: row (1/n, N)
/// carries pi_n's fiber bound and the image bound of the whole product.
std::vector<MdimRow> mdim_report_stacked(const Rational& delta, int j, const std::vector<std::int64_t>& n_list);

std::string mdim_csv(const std::vector<MdimRow>& rows);

/// Zero-dimensional base Y (an SFT) and X = Y x [0,1]^Z with the max of the two
/// weighted metrics. W_i = E_i and rho = 1 exactly on their union.
struct SbpEmbeddingInstance {
    Sft base = Sft::full_shift(1);
    std::vector<CylinderSet> cover;   // V_i (may be empty when pieces are given)
    std::vector<CylinderSet> pieces;  // E_i
    std::vector<CylinderSet> w;       // W_i
    CylinderSet complement;           // Y minus the union of the E_i
    OcapLimit complement_ocap;
    Rational delta;
    Rational eps;
    int M = 0;  // window margin of the fiber maps
    std::int64_t N = 1;
    std::vector<EpsEmbeddingCertificate> fiber_certs;  // f_i
    std::optional<EpsEmbeddingCertificate> global_cert;  // g
};

/// (y, u) -> (y|_W, u|_W) with W = [-M, N + M): an eps-embedding of (X, d_N)
/// into a disjoint union of |W|-cubes.
EpsEmbeddingCertificate window_certificate(const Sft& base, std::int64_t n, const Rational& eps);

/// Instance from a cover, peeled by sbp_cover_refine.
SbpEmbeddingInstance sbp_instance(const Sft& base, const std::vector<CylinderSet>& cover, const Rational& delta,
                                  const Rational& eps, std::int64_t n);
/// Instance from explicit disjoint pieces E_i (the complement may be nonempty).
SbpEmbeddingInstance sbp_instance_from_pieces(const Sft& base, const std::vector<CylinderSet>& pieces,
                                              const Rational& delta, const Rational& eps, std::int64_t n);

/// F_n(x) = (f'(T^{kN} x), g'(T^{kN} x))_{0<=k<n} into (K' x L')^n.
EpsEmbeddingCertificate wedge_cone_embedding(const SbpEmbeddingInstance& inst, std::int64_t n_iter);

}  // namespace meandim
