#include "meandim/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "meandim/error.hpp"
#include "meandim/kuhn.hpp"

namespace meandim {

std::string to_string(Norm n)
{
    switch (n) {
    case Norm::l_inf:
        return "l_inf";
    case Norm::l_1:
        return "l_1";
    case Norm::l_2:
        return "l_2";
    }
    return "l_inf";
}

Norm parse_norm(const std::string& s)
{
    if (s == "l_inf" || s == "linf")
        return Norm::l_inf;
    if (s == "l_1" || s == "l1")
        return Norm::l_1;
    if (s == "l_2" || s == "l2")
        return Norm::l_2;
    throw PreconditionError("unknown norm \"" + s + "\" (expected l_inf, l_1 or l_2)");
}

Distance Distance::between(Norm norm, std::span<const Rational> a, std::span<const Rational> b)
{
    if (a.size() != b.size())
        throw PreconditionError("distance between points of different dimension");
    Rational m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = abs(a[i] - b[i]);
        switch (norm) {
        case Norm::l_inf:
            if (d > m)
                m = d;
            break;
        case Norm::l_1:
            m += d;
            break;
        case Norm::l_2:
            m += d * d;
            break;
        }
    }
    return Distance(norm, std::move(m));
}

namespace {

std::optional<Rational> rational_sqrt(const Rational& r)
{
    if (r < 0 || !mpz_perfect_square_p(r.get_num_mpz_t()) || !mpz_perfect_square_p(r.get_den_mpz_t()))
        return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), r.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), r.get_den_mpz_t());
    return Rational(n, d);
}

}  // namespace

Rational Distance::value() const
{
    if (norm_ != Norm::l_2)
        return measure_;
    if (auto s = rational_sqrt(measure_))
        return *s;
    throw PreconditionError("l_2 distance sqrt(" + to_string(measure_) + ") is irrational");
}

bool Distance::less_than(const Rational& r) const
{
    if (norm_ == Norm::l_2)
        return r > 0 && measure_ < r * r;
    return measure_ < r;
}

bool Distance::at_most(const Rational& r) const
{
    if (norm_ == Norm::l_2)
        return r >= 0 && measure_ <= r * r;
    return measure_ <= r;
}

std::string Distance::str() const
{
    if (norm_ != Norm::l_2)
        return to_string(measure_);
    if (auto s = rational_sqrt(measure_))
        return to_string(*s);
    return "sqrt(" + to_string(measure_) + ")";
}

Rational norm_distance(Norm norm, std::span<const Rational> a, std::span<const Rational> b)
{
    return Distance::between(norm, a, b).value();
}

namespace {

/// Row-reduces `rows` in place; returns the pivot columns.
std::vector<std::size_t> row_reduce(std::vector<Vec>& rows, std::size_t cols)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t pivot = r;
        while (pivot < rows.size() && rows[pivot][c] == 0)
            ++pivot;
        if (pivot == rows.size())
            continue;
        std::swap(rows[r], rows[pivot]);
        const Rational inv = 1 / rows[r][c];
        for (auto& x : rows[r])
            x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0)
                continue;
            const Rational f = rows[i][c];
            for (std::size_t j = c; j < rows[i].size(); ++j)
                rows[i][j] -= f * rows[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

std::optional<Vec> affine_coordinates(const std::vector<const Vec*>& vertices, std::span<const Rational> p)
{
    const std::size_t k = vertices.size();
    const std::size_t d = p.size();
    std::vector<Vec> rows(d + 1, Vec(k + 1));
    for (std::size_t i = 0; i < k; ++i) {
        if (vertices[i]->size() != d)
            throw PreconditionError("point dimension does not match the realization");
        for (std::size_t r = 0; r < d; ++r)
            rows[r][i] = (*vertices[i])[r];
        rows[d][i] = 1;
    }
    for (std::size_t r = 0; r < d; ++r)
        rows[r][k] = p[r];
    rows[d][k] = 1;
    const auto pivots = row_reduce(rows, k + 1);
    if (!pivots.empty() && pivots.back() == k)
        return std::nullopt;  // inconsistent
    if (pivots.size() != k)
        return std::nullopt;  // not affinely independent
    Vec w(k);
    for (std::size_t i = 0; i < k; ++i)
        w[pivots[i]] = rows[i][k];
    return w;
}

std::size_t affine_rank(const std::vector<const Vec*>& points)
{
    if (points.empty())
        return 0;
    const std::size_t d = points.front()->size();
    std::vector<Vec> rows(d + 1, Vec(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t r = 0; r < d; ++r)
            rows[r][i] = (*points[i])[r];
        rows[d][i] = 1;
    }
    return row_reduce(rows, points.size()).size();
}

GeometricComplex::GeometricComplex(SimplicialComplex complex, std::vector<Vec> coords, Norm norm)
    : complex_(std::move(complex)), coords_(std::move(coords)), norm_(norm)
{
    if (coords_.size() != complex_.vertex_count())
        throw PreconditionError("every vertex needs coordinates (" + std::to_string(coords_.size()) + " given for " +
                                std::to_string(complex_.vertex_count()) + " vertices)");
    ambient_dim_ = coords_.empty() ? 0 : coords_.front().size();
    for (const auto& c : coords_)
        if (c.size() != ambient_dim_)
            throw PreconditionError("vertex coordinates have different dimensions");
    for (const auto& s : complex_.maximal_simplices()) {
        std::vector<const Vec*> pts;
        for (int v : s)
            pts.push_back(&this->coords(v));
        if (affine_rank(pts) != s.size())
            throw PreconditionError("realized simplex is not affinely independent",
                                    nlohmann::json{{"simplex", s}});
    }
}

const Vec& GeometricComplex::coords(int vertex) const
{
    const auto& vs = complex_.vertices();
    auto it = std::lower_bound(vs.begin(), vs.end(), vertex);
    if (it == vs.end() || *it != vertex)
        throw PreconditionError("unknown vertex " + std::to_string(vertex));
    return coords_[static_cast<std::size_t>(it - vs.begin())];
}

GeometricComplex GeometricComplex::with_norm(Norm norm) const
{
    GeometricComplex g = *this;
    g.norm_ = norm;
    return g;
}

namespace {

/// For every vertex (by position), the sorted vertex set of its closed star.
std::vector<std::vector<int>> star_vertex_sets(const GeometricComplex& g)
{
    const auto& k = g.complex();
    const auto& vs = k.vertices();
    std::vector<std::vector<int>> stars(vs.size());
    for (const auto& s : k.maximal_simplices()) {
        for (int v : s) {
            auto pos = static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin());
            stars[pos].insert(stars[pos].end(), s.begin(), s.end());
        }
    }
    for (auto& st : stars) {
        std::sort(st.begin(), st.end());
        st.erase(std::unique(st.begin(), st.end()), st.end());
    }
    return stars;
}

Distance diameter_of(const GeometricComplex& g, const std::vector<int>& pts)
{
    Distance best = Distance::zero(g.norm());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Distance d = Distance::between(g.norm(), g.coords(pts[i]), g.coords(pts[j]));
            if (best < d)
                best = d;
        }
    return best;
}

}  // namespace

Distance star_diameter(const GeometricComplex& g, int v)
{
    const auto& k = g.complex();
    if (!k.has_vertex(v))
        throw PreconditionError("unknown vertex " + std::to_string(v));
    std::vector<int> star;
    for (const auto& s : k.maximal_simplices())
        if (std::binary_search(s.begin(), s.end(), v))
            star.insert(star.end(), s.begin(), s.end());
    std::sort(star.begin(), star.end());
    star.erase(std::unique(star.begin(), star.end()), star.end());
    return diameter_of(g, star);
}

Distance max_star_mesh(const GeometricComplex& g)
{
    Distance best = Distance::zero(g.norm());
    for (const auto& star : star_vertex_sets(g)) {
        Distance d = diameter_of(g, star);
        if (best < d)
            best = d;
    }
    return best;
}

GeometricComplex barycentric_subdivide(std::shared_ptr<const GeometricComplex> g)
{
    if (!g)
        throw PreconditionError("null complex");
    auto sd = barycentric_subdivide(g->complex());
    GeometricComplex out;
    out.coords_.reserve(sd.source.size());
    for (const auto& s : sd.source) {
        Vec c(g->ambient_dim());
        for (int v : s) {
            const auto& p = g->coords(v);
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] += p[i];
        }
        const Rational inv = make_rational(1, static_cast<std::int64_t>(s.size()));
        for (auto& x : c)
            x *= inv;
        out.coords_.push_back(std::move(c));
    }
    out.complex_ = std::move(sd.complex);
    out.source_ = std::move(sd.source);
    out.norm_ = g->norm();
    out.ambient_dim_ = g->ambient_dim();
    out.parent_ = std::move(g);
    return out;
}

namespace {

std::size_t factorial(std::size_t n)
{
    std::size_t f = 1;
    for (std::size_t i = 2; i <= n; ++i)
        f *= i;
    return f;
}

/// Upper estimate of the simplex count of K' (flags times faces per flag).
std::size_t subdivision_size_estimate(const SimplicialComplex& k)
{
    std::size_t total = 0;
    for (const auto& s : k.maximal_simplices())
        total += factorial(s.size()) * ((std::size_t{1} << s.size()) - 1);
    return total;
}

}  // namespace

MeshRefinement subdivide_to_mesh(std::shared_ptr<const GeometricComplex> g, const Rational& eps, int max_rounds,
                                 std::size_t simplex_budget)
{
    if (eps <= 0)
        throw PreconditionError("mesh target must be positive");
    MeshRefinement r{std::move(g), 0, {}};
    while (true) {
        r.mesh = max_star_mesh(*r.complex);
        if (r.mesh.less_than(eps))
            return r;
        if (r.rounds >= max_rounds)
            throw BudgetError("mesh not reached after " + std::to_string(max_rounds) + " subdivisions",
                              nlohmann::json{{"mesh", r.mesh.str()}, {"eps", to_string(eps)}});
        const std::size_t estimate = subdivision_size_estimate(r.complex->complex());
        if (estimate > simplex_budget)
            throw BudgetError("subdivision would exceed the simplex budget",
                              nlohmann::json{{"estimated_simplices", estimate}, {"budget", simplex_budget}});
        r.complex = std::make_shared<const GeometricComplex>(barycentric_subdivide(r.complex));
        ++r.rounds;
    }
}

GeometricComplex kuhn_triangulate_cube(int n, int g)
{
    if (n < 1 || n > 6)
        throw PreconditionError("cube dimension must be in [1, 6]");
    if (g < 1)
        throw PreconditionError("grid resolution must be >= 1");
    std::size_t cells = 1, points = 1;
    for (int i = 0; i < n; ++i) {
        cells *= static_cast<std::size_t>(g);
        points *= static_cast<std::size_t>(g) + 1;
    }
    const std::size_t tops = cells * factorial(static_cast<std::size_t>(n));
    if (tops > 4'000'000)
        throw BudgetError("Kuhn triangulation too large", nlohmann::json{{"estimated_simplices", tops}});

    std::vector<Simplex> generators;
    generators.reserve(tops);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < cells; ++c) {
        GridPoint cell(static_cast<std::size_t>(n));
        std::size_t rest = c;
        for (int i = 0; i < n; ++i) {
            cell[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(g));
            rest /= static_cast<std::size_t>(g);
        }
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Simplex s;
            GridPoint v = cell;
            s.push_back(static_cast<int>(kuhn_vertex_id(v, g)));
            for (int axis : perm) {
                v[static_cast<std::size_t>(axis)] += 1;
                s.push_back(static_cast<int>(kuhn_vertex_id(v, g)));
            }
            generators.push_back(std::move(s));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    GeometricComplex out;
    out.complex_ = SimplicialComplex::from_simplices(static_cast<int>(points), generators);
    out.coords_.reserve(points);
    for (std::size_t id = 0; id < points; ++id)
        out.coords_.push_back(kuhn_grid_coords(kuhn_vertex_grid(static_cast<std::int64_t>(id), n, g), g));
    out.ambient_dim_ = static_cast<std::size_t>(n);
    out.norm_ = Norm::l_inf;
    out.kuhn_ = KuhnGrid{n, g};
    return out;
}

BarycentricPoint locate(const GeometricComplex& g, std::span<const Rational> p)
{
    if (p.size() != g.ambient_dim())
        throw PreconditionError("point dimension does not match the realization");
    BarycentricPoint bp;
    if (g.kuhn()) {
        const auto loc = kuhn_locate(g.kuhn()->n, g.kuhn()->g, p);
        for (int k = 0; k <= g.kuhn()->n; ++k) {
            if (loc.weights[static_cast<std::size_t>(k)] == 0)
                continue;
            bp.simplex.push_back(static_cast<int>(kuhn_vertex_id(kuhn_chain_vertex(loc, k), g.kuhn()->g)));
            bp.weights.push_back(loc.weights[static_cast<std::size_t>(k)]);
        }
        return bp;
    }
    if (g.parent()) {
        const auto outer = locate(*g.parent(), p);
        std::vector<std::size_t> order(outer.simplex.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return outer.weights[a] > outer.weights[b]; });
        std::vector<std::pair<int, Rational>> flag;
        Simplex prefix;
        for (std::size_t j = 0; j < order.size(); ++j) {
            const int v = outer.simplex[order[j]];
            prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
            const Rational next = j + 1 < order.size() ? outer.weights[order[j + 1]] : Rational(0);
            Rational mu = (outer.weights[order[j]] - next) * static_cast<long>(j + 1);
            if (mu == 0)
                continue;
            const auto idx = g.parent()->complex().index_of(prefix);
            flag.emplace_back(static_cast<int>(*idx), std::move(mu));
        }
        std::sort(flag.begin(), flag.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [v, w] : flag) {
            bp.simplex.push_back(v);
            bp.weights.push_back(std::move(w));
        }
        return bp;
    }
    for (const auto& s : g.complex().maximal_simplices()) {
        std::vector<const Vec*> pts;
        for (int v : s)
            pts.push_back(&g.coords(v));
        auto w = affine_coordinates(pts, p);
        if (!w || std::any_of(w->begin(), w->end(), [](const Rational& x) { return x < 0; }))
            continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if ((*w)[i] == 0)
                continue;
            bp.simplex.push_back(s[i]);
            bp.weights.push_back((*w)[i]);
        }
        return bp;
    }
    throw PreconditionError("not in complex", nlohmann::json{{"point", to_json(p)}});
}

Vec realize(const GeometricComplex& g, const BarycentricPoint& bp)
{
    Vec x(g.ambient_dim());
    for (std::size_t i = 0; i < bp.simplex.size(); ++i) {
        const auto& c = g.coords(bp.simplex[i]);
        for (std::size_t r = 0; r < x.size(); ++r)
            x[r] += bp.weights[i] * c[r];
    }
    return x;
}

int SimplicialMap::image_of(int source_vertex) const
{
    const auto& vs = source->complex().vertices();
    auto it = std::lower_bound(vs.begin(), vs.end(), source_vertex);
    if (it == vs.end() || *it != source_vertex)
        throw PreconditionError("vertex " + std::to_string(source_vertex) + " missing from map table");
    return image.at(static_cast<std::size_t>(it - vs.begin()));
}

bool SimplicialMap::is_simplicial() const
{
    if (image.size() != source->complex().vertex_count())
        return false;
    for (const auto& s : source->complex().maximal_simplices()) {
        Simplex img;
        for (int v : s)
            img.push_back(image_of(v));
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        if (!target->complex().contains(img))
            return false;
    }
    return true;
}

Vec eval_simplicial_map(const SimplicialMap& f, const BarycentricPoint& x)
{
    Vec y(f.target->ambient_dim());
    for (std::size_t i = 0; i < x.simplex.size(); ++i) {
        const auto& c = f.target->coords(f.image_of(x.simplex[i]));
        for (std::size_t r = 0; r < y.size(); ++r)
            y[r] += x.weights[i] * c[r];
    }
    return y;
}

std::shared_ptr<const GeometricComplex> standard_simplex(int m, Norm norm)
{
    if (m < 1)
        throw PreconditionError("standard simplex needs m >= 1");
    Simplex all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    std::vector<Vec> coords;
    for (int i = 0; i < m; ++i) {
        Vec e(static_cast<std::size_t>(m));
        e[static_cast<std::size_t>(i)] = 1;
        coords.push_back(std::move(e));
    }
    return std::make_shared<const GeometricComplex>(SimplicialComplex::from_simplices(m, {all}), std::move(coords),
                                                    norm);
}

}  // namespace meandim
