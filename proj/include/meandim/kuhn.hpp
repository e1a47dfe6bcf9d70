#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meandim/rational.hpp"

namespace meandim {

/// Grid coordinates of a Kuhn vertex: integers in [0, g].
using GridPoint = std::vector<std::int64_t>;

/// Position of a point inside the Kuhn triangulation of [0,1]^n: the cell's
/// lower corner, the coordinate order of the chain c = v_0, v_k = v_{k-1} + e_{order[k-1]},
/// and barycentric weights of p over v_0..v_n (zeros allowed on faces).
struct KuhnLocation {
    GridPoint cell;
    std::vector<int> order;
    Vec weights;
};

/// Closed-form location. Ties (equal fractional parts) are broken toward the
/// smaller coordinate index; grid-line coordinates use cell min(floor(g x), g-1).
/// Throws PreconditionError "not in complex" outside [0,1]^n.
KuhnLocation kuhn_locate(int n, int g, std::span<const Rational> p);

/// Grid point of chain vertex v_k of the located simplex.
GridPoint kuhn_chain_vertex(const KuhnLocation& loc, int k);

std::int64_t kuhn_vertex_id(std::span<const std::int64_t> grid, int g);
GridPoint kuhn_vertex_grid(std::int64_t id, int n, int g);
Vec kuhn_grid_coords(std::span<const std::int64_t> grid, int g);

/// Exact l_inf star mesh of the Kuhn triangulation: 1 for g = 1, else 2/g.
Rational kuhn_star_mesh_linf(int n, int g);

}  // namespace meandim
