#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "meandim/error.hpp"
#include "meandim/geometry.hpp"
#include "meandim/kuhn.hpp"
#include "support.hpp"

using namespace meandim;

namespace {

Vec v(std::initializer_list<int> xs)
{
    Vec out;
    for (int x : xs)
        out.emplace_back(x);
    return out;
}

std::shared_ptr<const GeometricComplex> unit_edge(Norm norm = Norm::l_inf)
{
    return std::make_shared<const GeometricComplex>(SimplicialComplex::from_simplices(2, {{0, 1}}),
                                                    std::vector<Vec>{v({0}), v({1})}, norm);
}

std::shared_ptr<const GeometricComplex> basis_triangle()
{
    return std::make_shared<const GeometricComplex>(SimplicialComplex::from_simplices(3, {{0, 1, 2}}),
                                                    std::vector<Vec>{v({1, 0, 0}), v({0, 1, 0}), v({0, 0, 1})});
}

Rational det(std::vector<Vec> m)
{
    const std::size_t n = m.size();
    Rational d = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c] == 0)
            ++p;
        if (p == n)
            return 0;
        if (p != c) {
            std::swap(m[p], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k)
                m[r][k] -= f * m[c][k];
        }
    }
    return d;
}

Rational factorial(int n) { return n <= 1 ? Rational(1) : Rational(n) * factorial(n - 1); }

}  // namespace

TEST_CASE("star diameters")
{
    const auto iso = GeometricComplex(SimplicialComplex::from_simplices(2, {}), {v({0}), v({3})});
    CHECK(star_diameter(iso, 0).measure() == 0);
    CHECK(max_star_mesh(iso).measure() == 0);

    const auto t = basis_triangle();
    for (int i = 0; i < 3; ++i)
        CHECK(star_diameter(*t, i).measure() == 1);
    CHECK(max_star_mesh(*t).measure() == 1);
    CHECK(star_diameter(*unit_edge(Norm::l_1), 0).measure() == 1);
    CHECK_THROWS_AS(star_diameter(*t, 9), PreconditionError);

    const auto l2 = t->with_norm(Norm::l_2);
    CHECK(max_star_mesh(l2).measure() == 2);
    CHECK(max_star_mesh(l2).str() == "sqrt(2)");
}

TEST_CASE("star diameter is the sup over the closed star")
{
    // Oracle: dense rational points in each simplex of the closed star.
    Rng rng(5);
    const auto g = barycentric_subdivide(basis_triangle());
    const auto& k = g.complex();
    for (int vtx : k.vertices()) {
        const Rational reported = star_diameter(g, vtx).measure();
        std::vector<Simplex> star;
        for (const auto& s : k.simplices())
            if (std::find(s.begin(), s.end(), vtx) != s.end())
                star.push_back(s);
        auto random_point = [&] {
            const auto& s = star[rng.below(star.size())];
            Vec w;
            Rational total = 0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                w.emplace_back(static_cast<long>(rng.below(9)));
                total += w.back();
            }
            if (total == 0) {
                w[0] = 1;
                total = 1;
            }
            for (auto& x : w)
                x /= total;
            return realize(g, {s, w});
        };
        Rational seen = 0;
        for (int trial = 0; trial < 300; ++trial)
            seen = std::max(seen, linf_distance(random_point(), random_point()));
        CHECK(seen <= reported);
    }
}

TEST_CASE("subdivide_to_mesh")
{
    const auto edge = unit_edge();
    const auto zero = subdivide_to_mesh(edge, 2);
    CHECK(zero.rounds == 0);
    CHECK(zero.complex == edge);

    // Midpoint arithmetic: an interior vertex's star spans two adjacent pieces,
    // so the mesh goes 1, 1, 1/2, 1/4.
    const auto r = subdivide_to_mesh(edge, make_rational(3, 10));
    CHECK(r.rounds == 3);
    CHECK(r.mesh.measure() == make_rational(1, 4));

    const auto tri = subdivide_to_mesh(basis_triangle(), make_rational(1, 2));
    CHECK(tri.mesh.measure() < make_rational(1, 2));
    CHECK(max_star_mesh(*tri.complex).measure() == tri.mesh.measure());

    const auto once = barycentric_subdivide(basis_triangle());
    const auto twice = barycentric_subdivide(std::make_shared<const GeometricComplex>(once));
    CHECK(max_star_mesh(twice).measure() < max_star_mesh(*basis_triangle()).measure());

    CHECK_THROWS_AS(subdivide_to_mesh(edge, 0), PreconditionError);
    CHECK_THROWS_AS(subdivide_to_mesh(edge, make_rational(1, 1000), 2), BudgetError);
}

TEST_CASE("kuhn triangulation")
{
    const auto a = kuhn_triangulate_cube(1, 2);
    CHECK(a.complex().vertex_count() == 3);
    CHECK(a.complex().maximal_simplices().size() == 2);

    const auto b = kuhn_triangulate_cube(2, 1);
    CHECK(b.complex().vertex_count() == 4);
    CHECK(b.complex().maximal_simplices().size() == 2);

    const auto c = kuhn_triangulate_cube(2, 16);
    CHECK(c.complex().maximal_simplices().size() == 512);
    CHECK(max_star_mesh(c).measure() <= make_rational(1, 8));
    CHECK(max_star_mesh(c).measure() == kuhn_star_mesh_linf(2, 16));

    CHECK_THROWS_AS(kuhn_triangulate_cube(0, 2), PreconditionError);
    CHECK_THROWS_AS(kuhn_triangulate_cube(7, 2), PreconditionError);
    CHECK_THROWS_AS(kuhn_triangulate_cube(2, 0), PreconditionError);
}

TEST_CASE("kuhn simplex volumes sum to one")
{
    for (auto [n, g] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 2}}) {
        const auto c = kuhn_triangulate_cube(n, g);
        Rational total = 0;
        for (const auto& s : c.complex().maximal_simplices()) {
            std::vector<Vec> rows;
            for (std::size_t i = 1; i < s.size(); ++i) {
                Vec r;
                for (int j = 0; j < n; ++j)
                    r.push_back(c.coords(s[i])[static_cast<std::size_t>(j)] - c.coords(s[0])[static_cast<std::size_t>(j)]);
                rows.push_back(r);
            }
            total += abs(det(rows)) / factorial(n);
        }
        CHECK(total == 1);
        CHECK(c.complex().vertex_count() == static_cast<std::size_t>(std::pow(g + 1, n)));
    }
}

TEST_CASE("point location")
{
    const auto c = std::make_shared<const GeometricComplex>(kuhn_triangulate_cube(2, 1));
    const auto corner = locate(*c, v({1, 0}));
    CHECK(corner.simplex.size() == 1);
    CHECK(corner.weights == Vec{1});

    const Vec centre{make_rational(1, 2), make_rational(1, 2)};
    const auto mid = locate(*c, centre);
    CHECK(mid.simplex.size() == 2);
    CHECK(realize(*c, mid) == centre);
    CHECK_THROWS_WITH_AS(locate(*c, v({2, 0})), "not in complex", PreconditionError);

    Rng rng(7);
    const auto fine = std::make_shared<const GeometricComplex>(kuhn_triangulate_cube(3, 3));
    const auto sd = barycentric_subdivide(fine);
    for (int trial = 0; trial < 200; ++trial) {
        Vec p;
        for (int i = 0; i < 3; ++i)
            p.push_back(rng.unit_rational(12));
        for (const GeometricComplex* g : {fine.get(), &sd}) {
            const auto bp = locate(*g, p);
            CHECK(realize(*g, bp) == p);
            Rational sum = 0;
            for (const auto& w : bp.weights) {
                CHECK(w > 0);
                sum += w;
            }
            CHECK(sum == 1);
            CHECK(g->complex().contains(bp.simplex));
        }
    }
}

TEST_CASE("simplicial maps")
{
    const auto src = basis_triangle();
    const auto tgt = standard_simplex(2);
    const SimplicialMap f{src, tgt, {0, 0, 1}};
    CHECK(f.is_simplicial());

    const BarycentricPoint bary{{0, 1, 2}, {make_rational(1, 3), make_rational(1, 3), make_rational(1, 3)}};
    CHECK(eval_simplicial_map(f, bary) == Vec{make_rational(2, 3), make_rational(1, 3)});
    CHECK(eval_simplicial_map(f, {{2}, {1}}) == v({0, 1}));
    CHECK(eval_simplicial_map(f, {{0, 1}, {make_rational(1, 2), make_rational(1, 2)}}) == v({1, 0}));
    CHECK_THROWS_AS(f.image_of(7), PreconditionError);

    // Affine on a simplex.
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        auto weights = [&] {
            Vec w{rng.unit_rational(6) + 1, rng.unit_rational(6) + 1, rng.unit_rational(6) + 1};
            const Rational s = w[0] + w[1] + w[2];
            for (auto& x : w)
                x /= s;
            return w;
        };
        const Vec a = weights(), b = weights();
        const Rational t = rng.unit_rational(10);
        Vec mix;
        for (int i = 0; i < 3; ++i)
            mix.push_back(t * a[static_cast<std::size_t>(i)] + (1 - t) * b[static_cast<std::size_t>(i)]);
        const Vec fa = eval_simplicial_map(f, {{0, 1, 2}, a});
        const Vec fb = eval_simplicial_map(f, {{0, 1, 2}, b});
        const Vec fm = eval_simplicial_map(f, {{0, 1, 2}, mix});
        for (std::size_t i = 0; i < fm.size(); ++i)
            CHECK(fm[i] == t * fa[i] + (1 - t) * fb[i]);
    }
}

TEST_CASE("kuhn tie-break does not change the PL value")
{
    // Interpolate random vertex values from every maximal simplex containing p.
    const int n = 2, g = 2;
    const auto c = kuhn_triangulate_cube(n, g);
    Rng rng(13);
    std::vector<Rational> h;
    for (std::size_t i = 0; i < c.complex().vertex_count(); ++i)
        h.push_back(rng.unit_rational(32));
    auto value_at = [&](int vertex) {
        const auto& vs = c.complex().vertices();
        return h[static_cast<std::size_t>(std::find(vs.begin(), vs.end(), vertex) - vs.begin())];
    };
    for (int trial = 0; trial < 100; ++trial) {
        const Rational x = rng.unit_rational(8);
        const Vec p = trial % 2 ? Vec{x, x} : Vec{x, rng.unit_rational(2)};
        const auto loc = kuhn_locate(n, g, p);
        Rational closed = 0;
        for (std::size_t k = 0; k < loc.weights.size(); ++k)
            closed += loc.weights[k] * value_at(static_cast<int>(kuhn_vertex_id(kuhn_chain_vertex(loc, static_cast<int>(k)), g)));
        int containing = 0;
        for (const auto& s : c.complex().maximal_simplices()) {
            std::vector<const Vec*> pts;
            for (int u : s)
                pts.push_back(&c.coords(u));
            const auto w = affine_coordinates(pts, p);
            if (!w || std::any_of(w->begin(), w->end(), [](const Rational& t) { return t < 0; }))
                continue;
            ++containing;
            Rational other = 0;
            for (std::size_t i = 0; i < s.size(); ++i)
                other += (*w)[i] * value_at(s[i]);
            CHECK(other == closed);
        }
        CHECK(containing >= 1);
    }
}

TEST_CASE("affine independence is checked")
{
    CHECK_THROWS_AS(GeometricComplex(SimplicialComplex::from_simplices(3, {{0, 1, 2}}), {v({0}), v({1}), v({2})}),
                    PreconditionError);
    CHECK_THROWS_AS(GeometricComplex(SimplicialComplex::from_simplices(2, {{0, 1}}), {v({0})}), PreconditionError);
}
