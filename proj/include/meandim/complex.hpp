#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace meandim {

/// A simplex as a strictly increasing list of vertex ids.
using Simplex = std::vector<int>;

/// Finite abstract simplicial complex stored as its full, downward-closed
/// simplex family. Vertex ids are arbitrary (not necessarily dense) integers;
/// every vertex carries a display label.
///
/// Simplices are kept sorted by (size, lexicographic) so faces of one
/// dimension are contiguous and lookups are binary searches.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /// Builds the downward closure of `maximal`. Every id in `vertices` becomes a
    /// 0-simplex even if it appears in no listed simplex. Labels default to the id.
    static SimplicialComplex from_simplices(std::vector<int> vertices, const std::vector<Simplex>& generators,
                                            std::vector<std::string> labels = {});

    /// Convenience for dense ids 0..count-1.
    static SimplicialComplex from_simplices(int count, const std::vector<Simplex>& generators);

    bool empty() const { return vertices_.empty(); }
    const std::vector<int>& vertices() const { return vertices_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int vertex) const;
    std::optional<int> find_label(const std::string& label) const;
    bool has_vertex(int v) const;

    const std::vector<Simplex>& simplices() const { return simplices_; }
    std::size_t simplex_count() const { return simplices_.size(); }
    bool contains(const Simplex& s) const;
    /// Position of `s` in simplices(), if present.
    std::optional<std::size_t> index_of(const Simplex& s) const;

    /// max(|s|) - 1; -1 for the empty complex.
    int dimension() const;

    std::vector<Simplex> maximal_simplices() const;

    /// Whether every nonempty subset of every simplex is present and every
    /// vertex of a simplex is listed. Holds by construction; exposed for tests.
    bool is_downward_closed() const;

    /// Whether every simplex of *this is a simplex of `other` (by vertex id).
    bool is_subcomplex_of(const SimplicialComplex& other) const;

    friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b)
    {
        return a.vertices_ == b.vertices_ && a.simplices_ == b.simplices_;
    }

private:
    std::vector<int> vertices_;
    std::vector<std::string> labels_;
    std::vector<Simplex> simplices_;
};

/// Strict simplex order used for storage: by size, then lexicographically.
bool simplex_less(const Simplex& a, const Simplex& b);

/// K' together with the simplex of K that each new vertex is the barycenter of.
/// Vertex i of `complex` corresponds to `source[i]`; ids are dense and follow
/// the storage order of K's simplices, so identities are canonical.
struct BarycentricSubdivision {
    SimplicialComplex complex;
    std::vector<Simplex> source;
};

BarycentricSubdivision barycentric_subdivide(const SimplicialComplex& k);

/// K(A): all simplices of K whose vertices lie in A. Vertex ids are preserved.
SimplicialComplex full_subcomplex(const SimplicialComplex& k, const std::vector<int>& a);

struct ConeResult {
    SimplicialComplex complex;
    int apex;
};

/// C(K): one new apex joined to every simplex. The apex id is max id + 1.
ConeResult cone(const SimplicialComplex& k);

/// C(K_1) ∪_* ... ∪_* C(K_m) with the apexes identified. Vertices of K_i are
/// renumbered consecutively in input order; the shared apex gets id 0.
ConeResult wedge_cones(const std::vector<SimplicialComplex>& ks);

/// Partition A_1..A_m of a vertex set (blocks may be empty).
struct VertexPartition {
    std::vector<std::vector<int>> blocks;

    std::size_t size() const { return blocks.size(); }
    /// Disjoint and exhaustive over k's vertices.
    bool is_partition_of(const SimplicialComplex& k) const;
};

/// Bucket (1-based) of a simplex of dimension j when dim K = dim_k is split
/// into m ranges: 1 if j <= dim_k/m, else i with (i-1)dim_k/m < j <= i dim_k/m.
int dimension_bucket(std::int64_t j, std::int64_t dim_k, std::int64_t m);

/// Chain-length bound on dim K'(A_i): (number of integers j in [0, dim_k]
/// falling in bucket i) - 1. Exact for complexes with simplices of every
/// dimension up to dim_k (e.g. any pure complex).
std::int64_t bucket_dimension_bound(std::int64_t dim_k, std::int64_t m, std::int64_t bucket);

/// Partition of V(K') by source-simplex dimension bucket.
VertexPartition dimension_buckets(const BarycentricSubdivision& sd, int dim_k, int m);

}  // namespace meandim

namespace meandim {

struct BucketedSubdivision {
    BarycentricSubdivision subdivision;
    VertexPartition partition;
};

/// Subdivides K and buckets V(K') in one step.
BucketedSubdivision dimension_buckets(const SimplicialComplex& k, int m);

}  // namespace meandim
