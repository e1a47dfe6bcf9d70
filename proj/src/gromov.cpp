#include "meandim/gromov.hpp"

#include <algorithm>
#include <numeric>

#include "meandim/error.hpp"
#include "meandim/kuhn.hpp"

namespace meandim {

namespace {

void require_simplex_point(const Vec& t, int m)
{
    if (t.size() != static_cast<std::size_t>(m))
        throw PreconditionError("target point needs " + std::to_string(m) + " barycentric coordinates");
    Rational sum = 0;
    for (const auto& x : t) {
        if (x < 0)
            throw PreconditionError("target point has a negative coordinate");
        sum += x;
    }
    if (sum != 1)
        throw PreconditionError("target coordinates must sum to 1");
}

/// Random split of `total` into `parts` nonnegative rationals.
std::vector<Rational> random_split(const Rational& total, std::size_t parts, Rng& rng)
{
    std::vector<Rational> out(parts);
    if (parts == 0 || total == 0)
        return out;
    std::vector<std::int64_t> w(parts);
    std::int64_t sum = 0;
    for (auto& x : w) {
        x = static_cast<std::int64_t>(rng.below(64));
        sum += x;
    }
    if (sum == 0) {
        w[rng.below(parts)] = 1;
        sum = 1;
    }
    for (std::size_t i = 0; i < parts; ++i)
        out[i] = total * make_rational(w[i], sum);
    return out;
}

int first_positive(const Vec& t)
{
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > 0)
            return static_cast<int>(i) + 1;
    throw PreconditionError("target point has no positive coordinate");
}

Distance linf_value(const Rational& r)
{
    const Vec zero{Rational(0)}, v{r};
    return Distance::between(Norm::l_inf, zero, v);
}

}  // namespace

struct PartitionMap::Split {
    std::size_t facet;
    std::vector<Rational> weights;  // aligned with the facet's vertices
};

PartitionMap::PartitionMap(std::shared_ptr<const GeometricComplex> complex, VertexPartition partition, Rational eps,
                           std::optional<int> bucketed_source_dim)
    : complex_(std::move(complex)), partition_(std::move(partition)), eps_(std::move(eps)),
      source_dim_(bucketed_source_dim)
{
    if (!complex_)
        throw PreconditionError("null complex");
    if (partition_.size() < 1)
        throw PreconditionError("partition needs m >= 1 blocks");
    const auto& k = complex_->complex();
    if (!partition_.is_partition_of(k))
        throw PreconditionError("blocks are not a partition of the vertex set");
    if (eps_ <= 0)
        throw PreconditionError("epsilon must be positive");
    mesh_ = max_star_mesh(*complex_);
    if (!mesh_.less_than(eps_)) {
        for (int v : k.vertices()) {
            const Distance d = star_diameter(*complex_, v);
            if (!d.less_than(eps_))
                throw PreconditionError("star mesh hypothesis fails: diam st(" + k.label(v) + ") = " + d.str() +
                                            " >= " + to_string(eps_),
                                        {{"vertex", v}, {"diameter", d.str()}, {"epsilon", to_json(eps_)}});
        }
    }
    block_.assign(k.vertex_count(), -1);
    const auto& vs = k.vertices();
    for (std::size_t i = 0; i < partition_.size(); ++i)
        for (int v : partition_.blocks[i])
            block_[static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin())] =
                static_cast<int>(i);
    for (const auto& b : partition_.blocks)
        bucket_dims_.push_back(full_subcomplex(k, b).dimension());
    facets_ = k.maximal_simplices();
    for (const auto& f : facets_) {
        auto& blocks = facet_blocks_.emplace_back();
        auto& meets = facet_meets_.emplace_back(partition_.size(), 0);
        for (int v : f) {
            blocks.push_back(block_of(v));
            meets[static_cast<std::size_t>(blocks.back())] = 1;
        }
    }
}

int PartitionMap::block_of(int vertex) const
{
    const auto& vs = complex_->complex().vertices();
    auto it = std::lower_bound(vs.begin(), vs.end(), vertex);
    if (it == vs.end() || *it != vertex)
        throw PreconditionError("unknown vertex " + std::to_string(vertex));
    return block_[static_cast<std::size_t>(it - vs.begin())];
}

SimplicialMap PartitionMap::simplicial_map() const
{
    SimplicialMap f;
    f.source = complex_;
    f.target = standard_simplex(m(), complex_->norm());
    f.image = block_;
    return f;
}

Vec PartitionMap::simplex_coords(const Vec& x) const
{
    const auto bp = locate(*complex_, x);
    Vec t(static_cast<std::size_t>(m()));
    for (std::size_t i = 0; i < bp.simplex.size(); ++i)
        t[static_cast<std::size_t>(block_of(bp.simplex[i]))] += bp.weights[i];
    return t;
}

Vec PartitionMap::retract(const Vec& x, int bucket) const
{
    const auto bp = locate(*complex_, x);
    Vec y(ambient_dim());
    Rational total = 0;
    for (std::size_t i = 0; i < bp.simplex.size(); ++i) {
        if (block_of(bp.simplex[i]) != bucket - 1)
            continue;
        total += bp.weights[i];
        const auto& c = complex_->coords(bp.simplex[i]);
        for (std::size_t r = 0; r < y.size(); ++r)
            y[r] += bp.weights[i] * c[r];
    }
    if (total == 0)
        throw PreconditionError("point has no weight on bucket " + std::to_string(bucket));
    for (auto& v : y)
        v /= total;
    return y;
}

const std::vector<std::size_t>& PartitionMap::candidates(const Vec& t) const
{
    std::vector<char> support(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        support[i] = t[i] != 0;
    std::lock_guard lock(cache_mutex_);
    auto it = candidate_cache_.find(support);
    if (it != candidate_cache_.end())
        return it->second;
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < facets_.size(); ++f) {
        bool ok = true;
        for (std::size_t i = 0; i < support.size() && ok; ++i)
            ok = !support[i] || facet_meets_[f][i];
        if (ok)
            out.push_back(f);
    }
    return candidate_cache_.emplace(std::move(support), std::move(out)).first->second;
}

std::optional<PartitionMap::Split> PartitionMap::draw(const Vec& t, Rng& rng) const
{
    require_simplex_point(t, m());
    const auto& cands = candidates(t);
    if (cands.empty())
        return std::nullopt;
    Split s{cands[rng.below(cands.size())], {}};
    const auto& facet = facets_[s.facet];
    s.weights.assign(facet.size(), 0);
    for (int i = 0; i < m(); ++i) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < facet.size(); ++j)
            if (facet_blocks_[s.facet][j] == i)
                idx.push_back(j);
        const auto parts = random_split(t[static_cast<std::size_t>(i)], idx.size(), rng);
        for (std::size_t j = 0; j < idx.size(); ++j)
            s.weights[idx[j]] = parts[j];
    }
    return s;
}

Vec PartitionMap::point_of(const Split& s) const
{
    Vec x(ambient_dim());
    const auto& facet = facets_[s.facet];
    for (std::size_t j = 0; j < facet.size(); ++j) {
        const auto& c = complex_->coords(facet[j]);
        for (std::size_t r = 0; r < x.size(); ++r)
            x[r] += s.weights[j] * c[r];
    }
    return x;
}

std::optional<Vec> PartitionMap::sample_fiber(const Vec& t, Rng& rng) const
{
    auto s = draw(t, rng);
    if (!s)
        return std::nullopt;
    return point_of(*s);
}

std::optional<std::pair<Vec, Vec>> PartitionMap::sample_local_pair(const Vec& t, int bucket, Rng& rng) const
{
    auto s = draw(t, rng);
    if (!s)
        return std::nullopt;
    Split other = *s;
    const auto& facet = facets_[s->facet];
    for (int i = 0; i < m(); ++i) {
        if (i == bucket - 1)
            continue;
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < facet.size(); ++j)
            if (facet_blocks_[s->facet][j] == i)
                idx.push_back(j);
        const auto parts = random_split(t[static_cast<std::size_t>(i)], idx.size(), rng);
        for (std::size_t j = 0; j < idx.size(); ++j)
            other.weights[idx[j]] = parts[j];
    }
    return std::make_pair(point_of(*s), point_of(other));
}

std::shared_ptr<const PartitionMap> partition_map(std::shared_ptr<const GeometricComplex> g, VertexPartition p,
                                                  const Rational& eps)
{
    return std::make_shared<const PartitionMap>(std::move(g), std::move(p), eps);
}

BucketWidthMap bucket_width_map(std::shared_ptr<const GeometricComplex> g, int m, const Rational& eps)
{
    if (m < 1)
        throw PreconditionError("bucket count m must be >= 1");
    BucketWidthMap out;
    out.refinement = subdivide_to_mesh(std::move(g), eps);
    out.dim_k = out.refinement.complex->complex().dimension();
    out.subdivision = std::make_shared<const GeometricComplex>(barycentric_subdivide(out.refinement.complex));
    BarycentricSubdivision sd{out.subdivision->complex(), out.subdivision->source()};
    auto partition = dimension_buckets(sd, out.dim_k, m);
    out.map = std::make_shared<const PartitionMap>(out.subdivision, std::move(partition), eps, out.dim_k);
    return out;
}

KuhnBucketMap::KuhnBucketMap(int n, int grid, int m) : n_(n), grid_(grid), m_(m)
{
    if (n < 1 || n > 4096)
        throw PreconditionError("cube dimension out of range");
    if (grid < 1)
        throw PreconditionError("grid resolution must be >= 1");
    if (m < 1)
        throw PreconditionError("bucket count m must be >= 1");
    positions_.resize(static_cast<std::size_t>(m));
    for (int j = 0; j <= n; ++j)
        positions_[static_cast<std::size_t>(dimension_bucket(j, n, m) - 1)].push_back(j);
}

KuhnBucketMap::Flag KuhnBucketMap::flag_of(const Vec& x) const
{
    const auto loc = kuhn_locate(n_, grid_, x);
    const std::size_t k = static_cast<std::size_t>(n_) + 1;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return loc.weights[a] > loc.weights[b]; });
    Flag f;
    f.mu.resize(k);
    f.sums.resize(k);
    GridPoint sum(static_cast<std::size_t>(n_), 0);
    for (std::size_t j = 0; j < k; ++j) {
        const auto rank = static_cast<std::size_t>(order[j]);
        for (std::size_t r = 0; r < sum.size(); ++r)
            sum[r] += loc.cell[r];
        for (std::size_t i = 0; i < rank; ++i)
            sum[static_cast<std::size_t>(loc.order[i])] += 1;
        const Rational next = j + 1 < k ? loc.weights[order[j + 1]] : Rational(0);
        f.mu[j] = (loc.weights[rank] - next) * static_cast<long>(j + 1);
        f.sums[j] = sum;
    }
    return f;
}

Vec KuhnBucketMap::simplex_coords(const Vec& x) const
{
    const auto f = flag_of(x);
    Vec t(static_cast<std::size_t>(m_));
    for (std::size_t i = 0; i < positions_.size(); ++i)
        for (int j : positions_[i])
            t[i] += f.mu[static_cast<std::size_t>(j)];
    return t;
}

Vec KuhnBucketMap::retract(const Vec& x, int bucket) const
{
    if (bucket < 1 || bucket > m_)
        throw PreconditionError("bucket out of range");
    const auto f = flag_of(x);
    Vec y(static_cast<std::size_t>(n_));
    Rational total = 0;
    for (int j : positions_[static_cast<std::size_t>(bucket - 1)]) {
        const auto& mu = f.mu[static_cast<std::size_t>(j)];
        if (mu == 0)
            continue;
        total += mu;
        const Rational w = mu / (static_cast<long>(j + 1) * static_cast<long>(grid_));
        const auto& sum = f.sums[static_cast<std::size_t>(j)];
        for (std::size_t r = 0; r < y.size(); ++r)
            if (sum[r] != 0)
                y[r] += w * static_cast<long>(sum[r]);
    }
    if (total == 0)
        throw PreconditionError("point has no weight on bucket " + std::to_string(bucket));
    for (auto& v : y)
        v /= total;
    return y;
}

struct KuhnBucketMap::Draw {
    GridPoint cell;
    std::vector<int> perm;   // chain direction order
    std::vector<int> order;  // flag order of chain vertices
    std::vector<Rational> mu;
};

std::optional<KuhnBucketMap::Draw> KuhnBucketMap::draw(const Vec& t, Rng& rng) const
{
    require_simplex_point(t, m_);
    for (std::size_t i = 0; i < positions_.size(); ++i)
        if (t[i] > 0 && positions_[i].empty())
            return std::nullopt;
    Draw d;
    d.cell.resize(static_cast<std::size_t>(n_));
    for (auto& c : d.cell)
        c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(grid_)));
    d.perm.resize(static_cast<std::size_t>(n_));
    std::iota(d.perm.begin(), d.perm.end(), 0);
    for (std::size_t i = d.perm.size(); i > 1; --i)
        std::swap(d.perm[i - 1], d.perm[rng.below(i)]);
    d.order.resize(static_cast<std::size_t>(n_) + 1);
    std::iota(d.order.begin(), d.order.end(), 0);
    for (std::size_t i = d.order.size(); i > 1; --i)
        std::swap(d.order[i - 1], d.order[rng.below(i)]);
    d.mu.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        const auto parts = random_split(t[i], positions_[i].size(), rng);
        for (std::size_t j = 0; j < parts.size(); ++j)
            d.mu[static_cast<std::size_t>(positions_[i][j])] = parts[j];
    }
    return d;
}

Vec KuhnBucketMap::point_of(const Draw& d) const
{
    // chain vertices v_0 = cell, v_k = v_{k-1} + e_{perm[k-1]}
    std::vector<GridPoint> chain(static_cast<std::size_t>(n_) + 1, d.cell);
    for (std::size_t k = 1; k < chain.size(); ++k) {
        chain[k] = chain[k - 1];
        chain[k][static_cast<std::size_t>(d.perm[k - 1])] += 1;
    }
    Vec x(static_cast<std::size_t>(n_));
    GridPoint sum(static_cast<std::size_t>(n_), 0);
    for (std::size_t j = 0; j < d.order.size(); ++j) {
        const auto& v = chain[static_cast<std::size_t>(d.order[j])];
        for (std::size_t r = 0; r < sum.size(); ++r)
            sum[r] += v[r];
        if (d.mu[j] == 0)
            continue;
        const Rational w = d.mu[j] / (static_cast<long>(j + 1) * static_cast<long>(grid_));
        for (std::size_t r = 0; r < x.size(); ++r)
            if (sum[r] != 0)
                x[r] += w * static_cast<long>(sum[r]);
    }
    return x;
}

std::optional<Vec> KuhnBucketMap::sample_fiber(const Vec& t, Rng& rng) const
{
    auto d = draw(t, rng);
    if (!d)
        return std::nullopt;
    return point_of(*d);
}

std::optional<std::pair<Vec, Vec>> KuhnBucketMap::sample_local_pair(const Vec& t, int bucket, Rng& rng) const
{
    auto d = draw(t, rng);
    if (!d)
        return std::nullopt;
    Draw other = *d;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (static_cast<int>(i) == bucket - 1)
            continue;
        const auto parts = random_split(t[i], positions_[i].size(), rng);
        for (std::size_t j = 0; j < parts.size(); ++j)
            other.mu[static_cast<std::size_t>(positions_[i][j])] = parts[j];
    }
    return std::make_pair(point_of(*d), point_of(other));
}

std::int64_t KuhnBucketMap::bucket_dim(int bucket) const
{
    return bucket_dimension_bound(n_, m_, bucket);
}

Distance KuhnBucketMap::mesh() const
{
    return linf_value(kuhn_star_mesh_linf(n_, grid_));
}

Vec cube_homeo(const Vec& t)
{
    const std::size_t m = t.size();
    if (m == 0)
        throw PreconditionError("empty simplex point");
    const Rational b = make_rational(1, static_cast<std::int64_t>(m));
    const Rational half = make_rational(1, 2);
    Vec w(m - 1);
    Rational sum = 0, sup = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        w[i] = t[i + 1] - b;
        sum += w[i];
        if (abs(w[i]) > sup)
            sup = abs(w[i]);
    }
    Vec p(m - 1, half);
    if (sup == 0)
        return p;
    std::optional<Rational> s_delta;
    auto consider = [&](const Rational& s) {
        if (!s_delta || s < *s_delta)
            s_delta = s;
    };
    for (const auto& wi : w)
        if (wi < 0)
            consider(b / -wi);
    if (sum > 0)
        consider(b / sum);
    const Rational s_cube = half / sup;
    const Rational factor = s_cube / *s_delta;
    for (std::size_t i = 0; i < w.size(); ++i)
        p[i] += factor * w[i];
    return p;
}

Vec cube_homeo_inverse(const Vec& p)
{
    const std::size_t m = p.size() + 1;
    const Rational b = make_rational(1, static_cast<std::int64_t>(m));
    const Rational half = make_rational(1, 2);
    Vec v(p.size());
    Rational sum = 0, sup = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0 || p[i] > 1)
            throw PreconditionError("point outside [0,1]^" + std::to_string(p.size()));
        v[i] = p[i] - half;
        sum += v[i];
        if (abs(v[i]) > sup)
            sup = abs(v[i]);
    }
    Vec t(m, b);
    if (sup == 0)
        return t;
    std::optional<Rational> s_delta;
    auto consider = [&](const Rational& s) {
        if (!s_delta || s < *s_delta)
            s_delta = s;
    };
    for (const auto& vi : v)
        if (vi < 0)
            consider(b / -vi);
    if (sum > 0)
        consider(b / sum);
    const Rational s_cube = half / sup;
    const Rational factor = *s_delta / s_cube;
    Rational used = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        t[i + 1] = b + factor * v[i];
        used += t[i + 1];
    }
    t[0] = 1 - used;
    return t;
}

Vec CubeWidthMap::eval(const Vec& x) const
{
    return cube_homeo(inner->simplex_coords(x));
}

json CubeWidthMap::descriptor() const
{
    return {{"kind", "cube_width_map"},
            {"n", n},
            {"m", m},
            {"scale", to_json(scale)},
            {"grid", grid},
            {"implicit", implicit},
            {"mesh", inner->mesh().str()}};
}

int cube_grid_for(const Rational& scale)
{
    if (scale <= 0)
        throw PreconditionError("scale must be positive");
    const mpz_class g = floor_z(Rational(2) / scale) + 1;
    if (g > 1'000'000)
        throw BudgetError("grid resolution too large", {{"grid", g.get_str()}});
    return static_cast<int>(g.get_si());
}

CubeWidthMap cube_width_map(int n, int m, const Rational& scale, bool implicit, std::size_t simplex_budget)
{
    if (n < 1)
        throw PreconditionError("cube dimension must be >= 1");
    if (m < 2)
        throw PreconditionError("m must be >= 2");
    CubeWidthMap f;
    f.n = n;
    f.m = m;
    f.scale = scale;
    f.grid = cube_grid_for(scale);
    f.implicit = implicit;
    if (implicit) {
        f.inner = std::make_shared<const KuhnBucketMap>(n, f.grid, m);
        return f;
    }
    if (n > 4)
        throw PreconditionError("materialized cube maps need n <= 4 (use the implicit map)");
    double estimate = 1;
    for (int i = 0; i < n; ++i)
        estimate *= f.grid;
    for (int i = 2; i <= n; ++i)
        estimate *= i;
    for (int i = 2; i <= n + 1; ++i)
        estimate *= i;
    estimate *= static_cast<double>((1 << (n + 1)) - 1);
    if (estimate > static_cast<double>(simplex_budget))
        throw BudgetError("cube triangulation exceeds the simplex budget",
                          {{"estimated_simplices", static_cast<std::uint64_t>(estimate)}, {"budget", simplex_budget}});
    auto kuhn = std::make_shared<const GeometricComplex>(kuhn_triangulate_cube(n, f.grid));
    auto bw = bucket_width_map(kuhn, m, scale);
    f.inner = bw.map;
    return f;
}

Vec PaddedBlockMap::eval(const Vec& x) const
{
    Vec y = cube.eval(x);
    y.resize(static_cast<std::size_t>(cube.n), Rational(0));
    return y;
}

PaddedBlockMap padded_block_map(int n, int m, const Rational& scale)
{
    if (n < m)
        throw PreconditionError("padded block map needs n >= m");
    return PaddedBlockMap{cube_width_map(n, m, scale, true)};
}

EpsEmbeddingCertificate empty_fiber_certificate(const Rational& eps, json descriptor, std::size_t ambient,
                                                const std::string& reason)
{
    EpsEmbeddingCertificate c;
    c.epsilon = eps;
    c.target_dim = 0;
    c.factor_dims = {0};
    c.domain.kind = "fiber";
    c.domain.descriptor = std::move(descriptor);
    c.domain.metric = [](const Point& a, const Point& b) { return linf_distance(a, b); };
    c.domain.point_size = ambient;
    c.evaluator = [](const Point&) { return Point{}; };
    c.target_metric = [](const Point&, const Point&) { return Rational(0); };
    c.obligations.push_back(structural("empty_fiber", true, {{"reason", reason}}));
    return c;
}

EpsEmbeddingCertificate bucket_fiber_certificate(std::shared_ptr<const BucketMap> f, const Vec& t,
                                                 const Rational& eps, json descriptor)
{
    require_simplex_point(t, f->m());
    {
        Rng probe(0);
        if (!f->sample_fiber(t, probe))
            return empty_fiber_certificate(eps, std::move(descriptor), f->ambient_dim(), "no simplex meets the fiber");
    }
    const int bucket = first_positive(t);
    EpsEmbeddingCertificate c;
    c.epsilon = eps;
    c.target_dim = f->bucket_dim(bucket);
    c.factor_dims = {c.target_dim};
    c.domain.kind = "fiber";
    c.domain.descriptor = std::move(descriptor);
    c.domain.point_size = f->ambient_dim();
    c.domain.metric = [](const Point& a, const Point& b) { return linf_distance(a, b); };
    c.domain.sampler = [f, t](Rng& r) { return *f->sample_fiber(t, r); };
    c.domain.pair_sampler = [f, t, bucket](Rng& r) { return *f->sample_local_pair(t, bucket, r); };
    c.evaluator = [f, bucket](const Point& x) { return f->retract(x, bucket); };
    c.target_metric = [](const Point& a, const Point& b) { return linf_distance(a, b); };
    c.target_size = f->ambient_dim();

    const Distance mesh = f->mesh();
    c.obligations.push_back(structural("star_mesh_below_eps", mesh.less_than(eps),
                                       {{"mesh", mesh.str()},
                                        {"norm", to_string(mesh.norm())},
                                        {"measure", to_json(mesh.measure())},
                                        {"epsilon", to_json(eps)},
                                        {"complex", f->mesh_source()}}));
    const Rational& tb = t[static_cast<std::size_t>(bucket - 1)];
    c.obligations.push_back(structural("fiber_in_star", tb > 0, {{"bucket", bucket}, {"t_bucket", to_json(tb)}}));
    if (auto d = f->bucketed_source_dim()) {
        const std::int64_t dim = c.target_dim;
        const std::int64_t m = f->m();
        const bool ok = bucket == 1 ? dim * m <= *d : dim * m < *d;
        c.obligations.push_back(structural("bucket_dimension", ok,
                                           {{"bucket", bucket}, {"dim", dim}, {"source_dim", *d}, {"m", m}}));
        c.dim_bound = make_rational(*d, m);
    } else {
        c.obligations.push_back(
            structural("subcomplex_dimension", true, {{"bucket", bucket}, {"dim", c.target_dim}}));
    }
    return c;
}

EpsEmbeddingCertificate cube_fiber_certificate(const CubeWidthMap& f, const Vec& p)
{
    if (p.size() != static_cast<std::size_t>(f.m - 1))
        throw PreconditionError("target point needs " + std::to_string(f.m - 1) + " coordinates");
    json desc = {{"kind", "gromov_cube_fiber"},
                 {"n", f.n},
                 {"m", f.m},
                 {"scale", to_json(f.scale)},
                 {"implicit", f.implicit},
                 {"p", to_json(p)}};
    for (const auto& x : p)
        if (x < 0 || x > 1)
            return empty_fiber_certificate(f.scale, desc, static_cast<std::size_t>(f.n),
                                           "point outside [0,1]^" + std::to_string(f.m - 1));
    auto c = bucket_fiber_certificate(f.inner, cube_homeo_inverse(p), f.scale, desc);
    const Rational bound = make_rational(f.n, f.m);
    c.obligations.push_back(structural("target_dim_bound", Rational(c.target_dim) <= bound,
                                       {{"target_dim", c.target_dim}, {"bound", to_json(bound)}}));
    return c;
}

EpsEmbeddingCertificate block_fiber_certificate(const PaddedBlockMap& g, const Vec& p)
{
    const auto n = static_cast<std::size_t>(g.n());
    if (p.size() != n)
        throw PreconditionError("target point needs " + std::to_string(n) + " coordinates");
    json desc = {{"kind", "gromov_block_fiber"},
                 {"n", g.n()},
                 {"m", g.m()},
                 {"scale", to_json(g.cube.scale)},
                 {"p", to_json(p)}};
    for (std::size_t i = static_cast<std::size_t>(g.m()) - 1; i < n; ++i)
        if (p[i] != 0)
            return empty_fiber_certificate(g.cube.scale, desc, n, "padded coordinate is nonzero");
    const Vec head(p.begin(), p.begin() + (g.m() - 1));
    auto c = cube_fiber_certificate(g.cube, head);
    c.domain.descriptor = desc;
    return c;
}

}  // namespace meandim
