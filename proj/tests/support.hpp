#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "meandim/certs.hpp"
#include "meandim/complex.hpp"
#include "meandim/rng.hpp"

namespace testing {

using namespace meandim;

/// [0,1]^n with l_inf, coordinates on the 1/den grid.
inline MetricSpaceHandle cube_space(std::size_t n, std::uint64_t den = 16)
{
    MetricSpaceHandle h;
    h.kind = "cube";
    h.descriptor = {{"kind", "cube"}, {"n", n}};
    h.metric = linf_distance;
    h.sampler = [n, den](Rng& rng) {
        Point p;
        for (std::size_t i = 0; i < n; ++i)
            p.push_back(rng.unit_rational(den));
        return p;
    };
    h.point_size = n;
    return h;
}

/// Random complex on `count` vertices: a few random generators of size <= max_dim+1.
inline SimplicialComplex random_complex(Rng& rng, int count, int max_dim, int generators)
{
    std::vector<Simplex> gens;
    for (int g = 0; g < generators; ++g) {
        const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(max_dim + 1, count))));
        std::set<int> s;
        while (static_cast<int>(s.size()) < size)
            s.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(count))));
        gens.emplace_back(s.begin(), s.end());
    }
    return SimplicialComplex::from_simplices(count, gens);
}

/// Exhaustive dimension of K(A) by filtering simplices.
inline int brute_full_dim(const SimplicialComplex& k, const std::vector<int>& a)
{
    const std::set<int> in(a.begin(), a.end());
    int d = -1;
    for (const auto& s : k.simplices())
        if (std::all_of(s.begin(), s.end(), [&](int v) { return in.count(v) > 0; }))
            d = std::max(d, static_cast<int>(s.size()) - 1);
    return d;
}

}  // namespace testing
