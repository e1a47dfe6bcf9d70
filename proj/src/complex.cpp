#include "meandim/complex.hpp"

#include <algorithm>
#include <numeric>

#include "meandim/error.hpp"

namespace meandim {

bool simplex_less(const Simplex& a, const Simplex& b)
{
    if (a.size() != b.size())
        return a.size() < b.size();
    return a < b;
}

SimplicialComplex SimplicialComplex::from_simplices(std::vector<int> vertices, const std::vector<Simplex>& generators,
                                                    std::vector<std::string> labels)
{
    SimplicialComplex k;
    if (!labels.empty() && labels.size() != vertices.size())
        throw PreconditionError("label count does not match vertex count");
    if (labels.empty()) {
        labels.reserve(vertices.size());
        for (int v : vertices)
            labels.push_back(std::to_string(v));
    }
    std::vector<std::size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vertices[a] < vertices[b]; });
    for (auto i : order) {
        if (!k.vertices_.empty() && k.vertices_.back() == vertices[i])
            throw PreconditionError("duplicate vertex id " + std::to_string(vertices[i]));
        k.vertices_.push_back(vertices[i]);
        k.labels_.push_back(labels[i]);
    }

    std::vector<Simplex> all;
    for (int v : k.vertices_)
        all.push_back({v});
    for (Simplex g : generators) {
        std::sort(g.begin(), g.end());
        if (g.empty())
            throw PreconditionError("empty simplex in generator list");
        if (std::adjacent_find(g.begin(), g.end()) != g.end())
            throw PreconditionError("repeated vertex in simplex");
        if (g.size() > 24)
            throw BudgetError("simplex of dimension " + std::to_string(g.size() - 1) + " is too large to materialize");
        for (int v : g)
            if (!std::binary_search(k.vertices_.begin(), k.vertices_.end(), v))
                throw PreconditionError("unknown vertex " + std::to_string(v));
        const std::uint32_t subsets = 1u << g.size();
        for (std::uint32_t mask = 1; mask < subsets; ++mask) {
            Simplex face;
            for (std::size_t b = 0; b < g.size(); ++b)
                if (mask & (1u << b))
                    face.push_back(g[b]);
            all.push_back(std::move(face));
        }
    }
    std::sort(all.begin(), all.end(), simplex_less);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    k.simplices_ = std::move(all);
    return k;
}

SimplicialComplex SimplicialComplex::from_simplices(int count, const std::vector<Simplex>& generators)
{
    std::vector<int> vs(static_cast<std::size_t>(count));
    std::iota(vs.begin(), vs.end(), 0);
    return from_simplices(std::move(vs), generators);
}

const std::string& SimplicialComplex::label(int vertex) const
{
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), vertex);
    if (it == vertices_.end() || *it != vertex)
        throw PreconditionError("unknown vertex " + std::to_string(vertex));
    return labels_[static_cast<std::size_t>(it - vertices_.begin())];
}

std::optional<int> SimplicialComplex::find_label(const std::string& label) const
{
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label)
            return vertices_[i];
    return std::nullopt;
}

bool SimplicialComplex::has_vertex(int v) const
{
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool SimplicialComplex::contains(const Simplex& s) const
{
    return std::binary_search(simplices_.begin(), simplices_.end(), s, simplex_less);
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const
{
    auto it = std::lower_bound(simplices_.begin(), simplices_.end(), s, simplex_less);
    if (it == simplices_.end() || *it != s)
        return std::nullopt;
    return static_cast<std::size_t>(it - simplices_.begin());
}

int SimplicialComplex::dimension() const
{
    if (simplices_.empty())
        return -1;
    return static_cast<int>(simplices_.back().size()) - 1;
}

std::vector<Simplex> SimplicialComplex::maximal_simplices() const
{
    // s is maximal iff it is not a facet of another simplex.
    std::vector<char> covered(simplices_.size(), 0);
    Simplex face;
    for (const auto& s : simplices_) {
        if (s.size() < 2)
            continue;
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            face.clear();
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != drop)
                    face.push_back(s[i]);
            if (auto idx = index_of(face))
                covered[*idx] = 1;
        }
    }
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < simplices_.size(); ++i)
        if (!covered[i])
            out.push_back(simplices_[i]);
    return out;
}

bool SimplicialComplex::is_downward_closed() const
{
    for (const auto& s : simplices_) {
        if (s.empty() || !std::is_sorted(s.begin(), s.end()))
            return false;
        for (int v : s)
            if (!has_vertex(v))
                return false;
        if (s.size() == 1)
            continue;
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            Simplex face;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != drop)
                    face.push_back(s[i]);
            if (!contains(face))
                return false;
        }
    }
    for (int v : vertices_)
        if (!contains({v}))
            return false;
    return true;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const
{
    return std::all_of(simplices_.begin(), simplices_.end(), [&](const Simplex& s) { return other.contains(s); });
}

BarycentricSubdivision barycentric_subdivide(const SimplicialComplex& k)
{
    if (k.empty())
        throw PreconditionError("empty complex");
    BarycentricSubdivision sd;
    sd.source = k.simplices();
    std::vector<std::string> labels;
    labels.reserve(sd.source.size());
    for (const auto& s : sd.source) {
        std::string l = "{";
        for (std::size_t i = 0; i < s.size(); ++i)
            l += (i ? "," : "") + k.label(s[i]);
        labels.push_back(l + "}");
    }

    // Maximal flags of K are exactly (maximal simplex, vertex order) pairs.
    std::vector<Simplex> flags;
    for (const auto& top : k.maximal_simplices()) {
        Simplex perm = top;
        do {
            Simplex flag;
            Simplex prefix;
            for (int v : perm) {
                prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
                flag.push_back(static_cast<int>(*k.index_of(prefix)));
            }
            std::sort(flag.begin(), flag.end());
            flags.push_back(std::move(flag));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::vector<int> ids(sd.source.size());
    std::iota(ids.begin(), ids.end(), 0);
    sd.complex = SimplicialComplex::from_simplices(std::move(ids), flags, std::move(labels));
    return sd;
}

SimplicialComplex full_subcomplex(const SimplicialComplex& k, const std::vector<int>& a)
{
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::string> labels;
    for (int v : sorted) {
        if (!k.has_vertex(v))
            throw PreconditionError("unknown vertex " + std::to_string(v));
        labels.push_back(k.label(v));
    }
    std::vector<Simplex> kept;
    for (const auto& s : k.simplices())
        if (s.size() > 1 && std::all_of(s.begin(), s.end(),
                                        [&](int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }))
            kept.push_back(s);
    return SimplicialComplex::from_simplices(std::move(sorted), kept, std::move(labels));
}

ConeResult cone(const SimplicialComplex& k)
{
    const int apex = k.empty() ? 0 : k.vertices().back() + 1;
    std::vector<int> vs = k.vertices();
    std::vector<std::string> labels = k.labels();
    vs.push_back(apex);
    labels.push_back("*");
    std::vector<Simplex> gens;
    for (const auto& s : k.maximal_simplices()) {
        Simplex c = s;
        c.push_back(apex);
        gens.push_back(std::move(c));
    }
    return {SimplicialComplex::from_simplices(std::move(vs), gens, std::move(labels)), apex};
}

ConeResult wedge_cones(const std::vector<SimplicialComplex>& ks)
{
    if (ks.empty())
        throw PreconditionError("wedge of an empty list of cones");
    std::vector<int> vs{0};
    std::vector<std::string> labels{"*"};
    std::vector<Simplex> gens;
    int next = 1;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        std::vector<int> local(ks[i].vertex_count());
        for (std::size_t j = 0; j < ks[i].vertex_count(); ++j) {
            local[j] = next++;
            vs.push_back(local[j]);
            labels.push_back(std::to_string(i + 1) + ":" + ks[i].labels()[j]);
        }
        const auto& kv = ks[i].vertices();
        for (const auto& s : ks[i].maximal_simplices()) {
            Simplex c{0};
            for (int v : s)
                c.push_back(local[static_cast<std::size_t>(std::lower_bound(kv.begin(), kv.end(), v) - kv.begin())]);
            gens.push_back(std::move(c));
        }
    }
    return {SimplicialComplex::from_simplices(std::move(vs), gens, std::move(labels)), 0};
}

bool VertexPartition::is_partition_of(const SimplicialComplex& k) const
{
    std::vector<int> seen;
    for (const auto& b : blocks)
        seen.insert(seen.end(), b.begin(), b.end());
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        return false;
    return seen == k.vertices();
}

int dimension_bucket(std::int64_t j, std::int64_t dim_k, std::int64_t m)
{
    if (m < 1)
        throw PreconditionError("bucket count m must be >= 1");
    if (j <= 0 || dim_k <= 0)
        return 1;
    // smallest i with j*m <= i*dim_k, at least 1
    const std::int64_t i = (j * m + dim_k - 1) / dim_k;
    return static_cast<int>(std::max<std::int64_t>(1, i));
}

std::int64_t bucket_dimension_bound(std::int64_t dim_k, std::int64_t m, std::int64_t bucket)
{
    if (m < 1 || bucket < 1 || bucket > m)
        throw PreconditionError("bucket index out of range");
    if (dim_k < 0)
        return -1;
    // Integers j in [0, dim_k] with dimension_bucket(j) == bucket form an interval.
    auto first_with_bucket_at_least = [&](std::int64_t b) -> std::int64_t {
        if (b <= 1)
            return 0;
        // smallest j with j*m > (b-1)*dim_k
        return (b - 1) * dim_k / m + 1;
    };
    const std::int64_t lo = first_with_bucket_at_least(bucket);
    const std::int64_t hi = std::min(dim_k, first_with_bucket_at_least(bucket + 1) - 1);
    return hi >= lo ? hi - lo : -1;
}

VertexPartition dimension_buckets(const BarycentricSubdivision& sd, int dim_k, int m)
{
    if (m < 1)
        throw PreconditionError("bucket count m must be >= 1");
    VertexPartition p;
    p.blocks.resize(static_cast<std::size_t>(m));
    for (std::size_t v = 0; v < sd.source.size(); ++v) {
        const auto j = static_cast<std::int64_t>(sd.source[v].size()) - 1;
        p.blocks[static_cast<std::size_t>(dimension_bucket(j, dim_k, m) - 1)].push_back(static_cast<int>(v));
    }
    return p;
}

BucketedSubdivision dimension_buckets(const SimplicialComplex& k, int m)
{
    if (m < 1)
        throw PreconditionError("bucket count m must be >= 1");
    BucketedSubdivision out{barycentric_subdivide(k), {}};
    out.partition = dimension_buckets(out.subdivision, k.dimension(), m);
    return out;
}

}  // namespace meandim
