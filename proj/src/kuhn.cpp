#include "meandim/kuhn.hpp"

#include <algorithm>
#include <numeric>

#include "meandim/error.hpp"

namespace meandim {

KuhnLocation kuhn_locate(int n, int g, std::span<const Rational> p)
{
    if (static_cast<int>(p.size()) != n)
        throw PreconditionError("point dimension " + std::to_string(p.size()) + " does not match cube dimension " +
                                std::to_string(n));
    KuhnLocation loc;
    loc.cell.resize(static_cast<std::size_t>(n));
    Vec frac(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& x = p[static_cast<std::size_t>(i)];
        if (x < 0 || x > 1)
            throw PreconditionError("not in complex", nlohmann::json{{"coordinate", i}, {"value", to_string(x)}});
        Rational q = x * g;
        mpz_class c = floor_z(q);
        if (c >= g)
            c = g - 1;
        loc.cell[static_cast<std::size_t>(i)] = c.get_si();
        frac[static_cast<std::size_t>(i)] = q - Rational(c);
    }
    loc.order.resize(static_cast<std::size_t>(n));
    std::iota(loc.order.begin(), loc.order.end(), 0);
    std::stable_sort(loc.order.begin(), loc.order.end(),
                     [&](int a, int b) { return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)]; });
    loc.weights.resize(static_cast<std::size_t>(n) + 1);
    Rational prev = 1;
    for (int k = 0; k < n; ++k) {
        const Rational& f = frac[static_cast<std::size_t>(loc.order[static_cast<std::size_t>(k)])];
        loc.weights[static_cast<std::size_t>(k)] = prev - f;
        prev = f;
    }
    loc.weights[static_cast<std::size_t>(n)] = prev;
    return loc;
}

GridPoint kuhn_chain_vertex(const KuhnLocation& loc, int k)
{
    GridPoint v = loc.cell;
    for (int i = 0; i < k; ++i)
        v[static_cast<std::size_t>(loc.order[static_cast<std::size_t>(i)])] += 1;
    return v;
}

std::int64_t kuhn_vertex_id(std::span<const std::int64_t> grid, int g)
{
    std::int64_t id = 0;
    for (std::size_t i = grid.size(); i-- > 0;)
        id = id * (g + 1) + grid[i];
    return id;
}

GridPoint kuhn_vertex_grid(std::int64_t id, int n, int g)
{
    GridPoint v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = id % (g + 1);
        id /= (g + 1);
    }
    return v;
}

Vec kuhn_grid_coords(std::span<const std::int64_t> grid, int g)
{
    Vec x;
    x.reserve(grid.size());
    for (auto c : grid)
        x.push_back(make_rational(c, g));
    return x;
}

Rational kuhn_star_mesh_linf(int n, int g)
{
    if (n < 1 || g < 1)
        throw PreconditionError("kuhn grid needs n >= 1 and g >= 1");
    return g == 1 ? Rational(1) : make_rational(2, g);
}

}  // namespace meandim
