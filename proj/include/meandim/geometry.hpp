#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meandim/complex.hpp"
#include "meandim/rational.hpp"

namespace meandim {

enum class Norm { l_inf, l_1, l_2 };

std::string to_string(Norm n);
Norm parse_norm(const std::string& s);

/// Exact norm value. l_1 and l_inf distances are rational; l_2 distances are
/// carried by their square so comparisons stay exact.
class Distance {
public:
    Distance() = default;
    static Distance between(Norm norm, std::span<const Rational> a, std::span<const Rational> b);
    static Distance zero(Norm norm) { return Distance(norm, 0); }

    Norm norm() const { return norm_; }
    /// Value for l_1/l_inf; squared value for l_2.
    const Rational& measure() const { return measure_; }
    /// The distance itself; throws for an irrational l_2 value.
    Rational value() const;
    bool less_than(const Rational& r) const;
    bool at_most(const Rational& r) const;
    /// "p/q", or "sqrt(p/q)" for irrational l_2 values.
    std::string str() const;

    friend bool operator<(const Distance& a, const Distance& b) { return a.measure_ < b.measure_; }
    friend bool operator==(const Distance& a, const Distance& b)
    {
        return a.norm_ == b.norm_ && a.measure_ == b.measure_;
    }

private:
    Distance(Norm norm, Rational measure) : norm_(norm), measure_(std::move(measure)) {}
    Norm norm_ = Norm::l_inf;
    Rational measure_ = 0;
};

/// Rational distance for l_1 / l_inf; for l_2 only when the value is rational.
Rational norm_distance(Norm norm, std::span<const Rational> a, std::span<const Rational> b);

struct KuhnGrid {
    int n;
    int g;
};

/// Point of a realized complex: its carrier simplex and strictly positive
/// barycentric weights (aligned with the simplex's vertex order, summing to 1).
struct BarycentricPoint {
    Simplex simplex;
    Vec weights;
};

/// A simplicial complex linearly realized in Q^d with a norm-induced metric.
///
/// Complexes produced by kuhn_triangulate_cube or by barycentric subdivision of
/// a realized complex remember how they were built, which lets locate() use
/// closed forms instead of a search over all simplices.
class GeometricComplex {
public:
    GeometricComplex() = default;

    /// coords[i] belongs to complex.vertices()[i]. Checks that all coordinate
    /// vectors have one length and that every maximal simplex is affinely
    /// independent.
    GeometricComplex(SimplicialComplex complex, std::vector<Vec> coords, Norm norm = Norm::l_inf);

    const SimplicialComplex& complex() const { return complex_; }
    Norm norm() const { return norm_; }
    std::size_t ambient_dim() const { return ambient_dim_; }
    const Vec& coords(int vertex) const;
    const std::vector<Vec>& all_coords() const { return coords_; }

    const std::optional<KuhnGrid>& kuhn() const { return kuhn_; }
    /// For K': the realized parent K and, per vertex of K', its source simplex.
    const std::shared_ptr<const GeometricComplex>& parent() const { return parent_; }
    const std::vector<Simplex>& source() const { return source_; }

    /// Same complex and coordinates measured in another norm.
    GeometricComplex with_norm(Norm norm) const;

private:
    friend GeometricComplex kuhn_triangulate_cube(int n, int g);
    friend GeometricComplex barycentric_subdivide(std::shared_ptr<const GeometricComplex> g);

    SimplicialComplex complex_;
    std::vector<Vec> coords_;
    Norm norm_ = Norm::l_inf;
    std::size_t ambient_dim_ = 0;
    std::optional<KuhnGrid> kuhn_;
    std::shared_ptr<const GeometricComplex> parent_;
    std::vector<Simplex> source_;
};

/// diam of the closed star of v: max norm(p - q) over vertices p, q of
/// simplices containing v. Exact because the norm of a difference is maximized
/// at realization vertices.
Distance star_diameter(const GeometricComplex& g, int v);

/// max over v of star_diameter; zero for a complex without edges.
Distance max_star_mesh(const GeometricComplex& g);

/// Barycentric subdivision with barycenter coordinates = vertex averages.
GeometricComplex barycentric_subdivide(std::shared_ptr<const GeometricComplex> g);

struct MeshRefinement {
    std::shared_ptr<const GeometricComplex> complex;
    int rounds = 0;
    Distance mesh;
};

/// Iterated barycentric subdivision until max_star_mesh < eps.
/// Errors: eps <= 0 (precondition), more than `max_rounds` rounds ("mesh not
/// reached"), or a subdivision that would exceed `simplex_budget` simplices.
MeshRefinement subdivide_to_mesh(std::shared_ptr<const GeometricComplex> g, const Rational& eps,
                                 int max_rounds = 30, std::size_t simplex_budget = 2'000'000);

/// Freudenthal/Kuhn triangulation of [0,1]^n on the grid of spacing 1/g; each
/// cell is cut into n! simplices along coordinate-order chains. Vertex id of
/// grid point c is sum_i c_i (g+1)^i. Requires 1 <= n <= 6, g >= 1.
GeometricComplex kuhn_triangulate_cube(int n, int g);

/// Carrier simplex and weights of p. Kuhn complexes use the closed form,
/// subdivisions locate in the parent and sort weights into a flag, anything
/// else searches its maximal simplices. Throws "not in complex" otherwise.
BarycentricPoint locate(const GeometricComplex& g, std::span<const Rational> p);

/// Point with the given weights (aligned with bp.simplex) in coordinates.
Vec realize(const GeometricComplex& g, const BarycentricPoint& bp);

/// Vertex map between realized complexes, extended linearly on simplices.
struct SimplicialMap {
    std::shared_ptr<const GeometricComplex> source;
    std::shared_ptr<const GeometricComplex> target;
    /// image[i] is the target vertex of source->complex().vertices()[i].
    std::vector<int> image;

    int image_of(int source_vertex) const;
    /// Every source simplex maps onto (the vertex set of) a target simplex.
    bool is_simplicial() const;
};

/// Σ weight(u) * coords(f(u)).
Vec eval_simplicial_map(const SimplicialMap& f, const BarycentricPoint& x);

/// The standard simplex Δ^{m-1} = conv(e_1..e_m) in Q^m as a one-simplex complex
/// with vertex ids 0..m-1.
std::shared_ptr<const GeometricComplex> standard_simplex(int m, Norm norm = Norm::l_inf);

/// Barycentric coordinates of p w.r.t. affinely independent `vertices`, if p
/// lies in their affine hull. Weights may be negative.
std::optional<Vec> affine_coordinates(const std::vector<const Vec*>& vertices, std::span<const Rational> p);

/// Affine rank of a point set (number of affinely independent points).
std::size_t affine_rank(const std::vector<const Vec*>& points);

}  // namespace meandim
