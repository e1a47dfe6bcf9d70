#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "meandim/certs.hpp"
#include "meandim/complex.hpp"
#include "meandim/geometry.hpp"
#include "meandim/kuhn.hpp"

namespace meandim {

/// A PL map K -> Δ^{m-1} sending each vertex block A_i to e_i, together with
/// what its fiber certificates need: the retraction onto K(A_i) and a sampler
/// for exact fiber points.
class BucketMap {
public:
    virtual ~BucketMap() = default;

    virtual int m() const = 0;
    virtual std::size_t ambient_dim() const = 0;
    /// f(x) as barycentric coordinates t_1..t_m.
    virtual Vec simplex_coords(const Vec& x) const = 0;
    /// g(x) = Σ_{u∈A_i} x_u u / Σ_{u∈A_i} x_u (bucket is 1-based).
    virtual Vec retract(const Vec& x, int bucket) const = 0;
    /// A point of f^{-1}(t), or nothing when the fiber is empty.
    virtual std::optional<Vec> sample_fiber(const Vec& t, Rng& rng) const = 0;
    /// Two fiber points with the same retraction onto `bucket`.
    virtual std::optional<std::pair<Vec, Vec>> sample_local_pair(const Vec& t, int bucket, Rng& rng) const = 0;
    /// dim K(A_i).
    virtual std::int64_t bucket_dim(int bucket) const = 0;
    /// Upper bound for the star mesh of the complex f is simplicial on.
    virtual Distance mesh() const = 0;
    /// Which complex `mesh` was measured on.
    virtual std::string mesh_source() const = 0;
    /// dim K when the blocks are dimension buckets of a subdivision of K.
    virtual std::optional<int> bucketed_source_dim() const = 0;
};

/// Materialized partition map on a realized complex.
class PartitionMap : public BucketMap {
public:
    PartitionMap(std::shared_ptr<const GeometricComplex> complex, VertexPartition partition, Rational eps,
                 std::optional<int> bucketed_source_dim = std::nullopt);

    int m() const override { return static_cast<int>(partition_.size()); }
    std::size_t ambient_dim() const override { return complex_->ambient_dim(); }
    Vec simplex_coords(const Vec& x) const override;
    Vec retract(const Vec& x, int bucket) const override;
    std::optional<Vec> sample_fiber(const Vec& t, Rng& rng) const override;
    std::optional<std::pair<Vec, Vec>> sample_local_pair(const Vec& t, int bucket, Rng& rng) const override;
    std::int64_t bucket_dim(int bucket) const override { return bucket_dims_.at(static_cast<std::size_t>(bucket - 1)); }
    Distance mesh() const override { return mesh_; }
    std::string mesh_source() const override { return "complex"; }
    std::optional<int> bucketed_source_dim() const override { return source_dim_; }

    const GeometricComplex& complex() const { return *complex_; }
    const VertexPartition& partition() const { return partition_; }
    /// Block index (0-based) of a vertex.
    int block_of(int vertex) const;
    /// The vertex map into the realized Δ^{m-1}.
    SimplicialMap simplicial_map() const;

private:
    struct Split;
    const std::vector<std::size_t>& candidates(const Vec& t) const;
    std::optional<Split> draw(const Vec& t, Rng& rng) const;
    Vec point_of(const Split& s) const;

    std::shared_ptr<const GeometricComplex> complex_;
    VertexPartition partition_;
    Rational eps_;
    Distance mesh_;
    std::vector<int> block_;  // by vertex position
    std::vector<std::int64_t> bucket_dims_;
    std::vector<Simplex> facets_;
    std::vector<std::vector<int>> facet_blocks_;  // block of each facet vertex
    std::vector<std::vector<char>> facet_meets_;  // facet touches block i
    mutable std::mutex cache_mutex_;
    mutable std::map<std::vector<char>, std::vector<std::size_t>> candidate_cache_;  // by support of t
    std::optional<int> source_dim_;
};

/// f(A_i) = e_i on G. Requires max_star_mesh(G) < eps; otherwise throws a
/// PreconditionError whose witness names the offending star.
std::shared_ptr<const PartitionMap> partition_map(std::shared_ptr<const GeometricComplex> g, VertexPartition p,
                                                  const Rational& eps);

struct BucketWidthMap {
    MeshRefinement refinement;  // K after subdivide_to_mesh
    std::shared_ptr<const GeometricComplex> subdivision;  // K'
    std::shared_ptr<const PartitionMap> map;
    int dim_k = 0;
};

/// subdivide_to_mesh, one more barycentric subdivision, dimension buckets,
/// partition map.
BucketWidthMap bucket_width_map(std::shared_ptr<const GeometricComplex> g, int m, const Rational& eps);

/// The same construction on the Kuhn triangulation of [0,1]^n, evaluated in
/// closed form: locate in K, sort weights into a flag, sum flag weights per
/// dimension bucket. Nothing is materialized, so large n is fine.
class KuhnBucketMap : public BucketMap {
public:
    KuhnBucketMap(int n, int grid, int m);

    int m() const override { return m_; }
    std::size_t ambient_dim() const override { return static_cast<std::size_t>(n_); }
    Vec simplex_coords(const Vec& x) const override;
    Vec retract(const Vec& x, int bucket) const override;
    std::optional<Vec> sample_fiber(const Vec& t, Rng& rng) const override;
    std::optional<std::pair<Vec, Vec>> sample_local_pair(const Vec& t, int bucket, Rng& rng) const override;
    std::int64_t bucket_dim(int bucket) const override;
    Distance mesh() const override;
    std::string mesh_source() const override { return "kuhn_cube"; }
    std::optional<int> bucketed_source_dim() const override { return n_; }

    int n() const { return n_; }
    int grid() const { return grid_; }

    /// Flag weights: for each flag position j = 0..n, the weight μ_j and the
    /// coordinate sum (in grid units) of the j+1 vertices of Δ_j. The
    /// barycenter of Δ_j is sums[j] / ((j+1) * grid).
    struct Flag {
        std::vector<Rational> mu;
        std::vector<GridPoint> sums;
    };
    Flag flag_of(const Vec& x) const;

private:
    struct Draw;
    std::optional<Draw> draw(const Vec& t, Rng& rng) const;
    Vec point_of(const Draw& d) const;

    int n_, grid_, m_;
    std::vector<std::vector<int>> positions_;  // flag positions j per bucket
};

/// Radial homeomorphism Δ^{m-1} -> [0,1]^{m-1}: chart t -> (t_2..t_m), then
/// the ray from the barycenter is stretched onto the ray from the cube centre.
Vec cube_homeo(const Vec& t);
Vec cube_homeo_inverse(const Vec& p);

/// F = cube_homeo ∘ f for the bucket map of the Kuhn-triangulated n-cube at
/// `scale`. The grid is floor(2/scale)+1, so the Kuhn star mesh 2/g < scale.
struct CubeWidthMap {
    int n = 0;
    int m = 0;
    Rational scale;
    int grid = 0;
    bool implicit = false;
    std::shared_ptr<const BucketMap> inner;

    Vec eval(const Vec& x) const;
    json descriptor() const;
};

int cube_grid_for(const Rational& scale);

/// Materialized (implicit = false) needs n <= 4 and a triangulation within the
/// simplex budget; implicit works for any n.
CubeWidthMap cube_width_map(int n, int m, const Rational& scale, bool implicit = false,
                            std::size_t simplex_budget = 2'000'000);

/// G_n(x) = (F_n(x), 0, ..., 0) with n-m+1 trailing zeros.
struct PaddedBlockMap {
    CubeWidthMap cube;
    Vec eval(const Vec& x) const;
    int n() const { return cube.n; }
    int m() const { return cube.m; }
};

PaddedBlockMap padded_block_map(int n, int m, const Rational& scale);

/// Certificate for f^{-1}(t) through the retraction onto the smallest bucket
/// with t_i > 0.
EpsEmbeddingCertificate bucket_fiber_certificate(std::shared_ptr<const BucketMap> f, const Vec& t,
                                                 const Rational& eps, json descriptor);

/// Certificate for F^{-1}(p) at the map's scale. Points outside [0,1]^{m-1}
/// get an empty-fiber certificate.
EpsEmbeddingCertificate cube_fiber_certificate(const CubeWidthMap& f, const Vec& p);

/// Certificate for G_n^{-1}(p); empty unless the padded coordinates are 0.
EpsEmbeddingCertificate block_fiber_certificate(const PaddedBlockMap& g, const Vec& p);

/// Certificate of a map with empty fiber (target_dim 0).
EpsEmbeddingCertificate empty_fiber_certificate(const Rational& eps, json descriptor, std::size_t ambient,
                                                const std::string& reason);

}  // namespace meandim
