#include <doctest.h>

#include <sstream>

#include "meandim/error.hpp"
#include "meandim/hurewicz.hpp"
#include "meandim/verify.hpp"

using namespace meandim;

namespace {

struct Smallest {
    int m, k, M;
};

// Smallest m, k, M straight from the inequalities, by search.
Smallest search_params(const Rational& delta, const Rational& eps)
{
    int m = 1;
    while (!(make_rational(1, m) < delta))
        ++m;
    int k = 0;
    for (;; ++k) {
        const std::int64_t l = (std::int64_t{1} << k) - 1;
        if (l > m && make_rational(m, l) < delta / 2)
            break;
    }
    int M = 0;
    for (;; ++M) {
        // Σ_{|n|>=M} 2^{-|n|}, summed over both sides.
        Rational tail = 0;
        for (int n = M; n < M + 200; ++n)
            tail += (n == 0 ? 1 : 2) * pow2(-n);
        tail += pow2(-(M + 199)) * 2;  // remainder of the geometric tails
        const Rational s = eps / 4;
        if (tail < eps / 2 && (3 - tail) * s + tail < eps)
            break;
    }
    return {m, k, M};
}

SamplePoint sample_with_residue(const FactorMapInstance& inst, std::int64_t n, std::int64_t r, std::uint64_t seed)
{
    auto s = inst.sample(n, seed);
    s.r = r;
    return s;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return ((a % b) + b) % b; }

}  // namespace

TEST_CASE("parameter derivation")
{
    const auto p = CounterexampleParams::derive(make_rational(1, 2), make_rational(1, 2));
    const auto want = search_params(make_rational(1, 2), make_rational(1, 2));
    CHECK(p.m == want.m);
    CHECK(p.k == want.k);
    CHECK(p.M == want.M);
    CHECK(p.m == 3);
    CHECK(p.k == 4);
    CHECK(p.M == 5);
    CHECK(p.L() < p.block());
    CHECK(p.block() < p.L_prime());
    p.validate();
    for (const auto& q : p.inequalities())
        CHECK(q.holds);

    for (auto [d, e] : {std::pair{make_rational(1, 3), make_rational(1, 3)}, std::pair{make_rational(1, 8), make_rational(1, 1)},
                        std::pair{make_rational(2, 5), make_rational(1, 10)}}) {
        const auto q = CounterexampleParams::derive(d, e);
        const auto w = search_params(d, e);
        CHECK(q.m == w.m);
        CHECK(q.k == w.k);
        CHECK(q.M == w.M);
    }
}

TEST_CASE("explicit level and the density inequality")
{
    const auto strict = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, false);
    CHECK_THROWS_WITH_AS(strict.validate(), doctest::Contains("m/L < delta/2"), PreconditionError);
    const auto loose = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    loose.validate();
    bool reported = false;
    for (const auto& q : loose.inequalities())
        if (q.name == "m/L < delta/2") {
            reported = true;
            CHECK_FALSE(q.holds);
            CHECK_FALSE(q.fatal);
        }
    CHECK(reported);
    CHECK_THROWS_AS(CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 1, true).validate(),
                    PreconditionError);
    CHECK(CounterexampleParams::from_json(loose.to_json()).to_json() == loose.to_json());
}

TEST_CASE("the factor map acts blockwise")
{
    const auto p = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    const auto inst = build_counterexample(p);
    const std::int64_t n = 40, b = p.block();

    SamplePoint zero = inst.sample(n, 1);
    for (auto& x : zero.x.values)
        x = 0;
    for (const auto& y : inst.pi(zero).p.values)
        CHECK(y == 0);
    CHECK(nonzero_count(inst, zero, n) == 0);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = inst.sample(n, seed);
        const auto y = inst.pi(s);
        CHECK(y.r == s.r);
        std::int64_t blocks = 0, nonzero = 0;
        for (std::int64_t a = s.x.lo; a + b <= s.x.hi(); ++a) {
            if (floor_mod(a + s.r, b) != 0)
                continue;
            ++blocks;
            const Vec in(s.x.values.begin() + (a - s.x.lo), s.x.values.begin() + (a - s.x.lo + b));
            const Vec out = inst.block.eval(in);
            for (std::int64_t i = 0; i < b; ++i) {
                CHECK(y.p.values.at(static_cast<std::size_t>(a + i - y.p.lo)) == out[static_cast<std::size_t>(i)]);
                if (a + i >= 0 && a + i < n && out[static_cast<std::size_t>(i)] != 0)
                    ++nonzero;
            }
        }
        CHECK(static_cast<std::int64_t>(y.p.values.size()) == blocks * b);
        CHECK(nonzero_count(inst, s, n) == nonzero);
        const std::int64_t block_bound = ((n + b - 1) / b + 1) * (p.m - 1);
        CHECK(nonzero <= block_bound);
        CHECK(Rational(nonzero) < p.delta * n / 2 + 2 * p.m);
    }
}

TEST_CASE("image dimension")
{
    const auto p = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    for (std::int64_t n : {1, 7, 8, 9, 40, 80}) {
        std::int64_t best = 0;
        for (std::int64_t r = 0; r < p.block(); ++r) {
            std::int64_t c = 0;
            for (std::int64_t i = 0; i < n; ++i)
                c += floor_mod(i + r, p.block()) < p.m - 1;
            best = std::max(best, c);
        }
        CHECK(image_dimension(p, n) == best);
    }
}

TEST_CASE("nonzero count report")
{
    const auto p = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    const auto inst = build_counterexample(p);
    const auto one = nonzero_count_check(inst, 20, p.block(), 3);
    CHECK(one.ok());
    CHECK(one.max_count <= p.m - 1 + p.m - 1);

    const auto rep = nonzero_count_check(inst, 100, 10 * p.block(), 7);
    CHECK(rep.ok());
    CHECK(Rational(rep.max_count) < p.delta * 10 * p.block() / 2 + 2 * p.m);
    CHECK(rep.block_bound == (10 + 1) * (p.m - 1));
    CHECK(verify_artifact(rep.to_json(p)).exit_code == 0);

    // Same seed, same bytes.
    CHECK(nonzero_count_check(inst, 100, 10 * p.block(), 7).to_json(p).dump() == rep.to_json(p).dump());
}

TEST_CASE("fiber dimension certificates")
{
    const auto p = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    const auto inst = build_counterexample(p);
    const std::int64_t b = p.block();

    for (std::int64_t n : {b, 2 * b + 3, std::int64_t{40}}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto s = inst.sample(n, seed);
            const auto c = fiber_dimension_certificate(inst, s, n);
            CHECK(c.all_discharged());
            CHECK(Rational(c.target_dim) < make_rational(n + 2 * p.M + 2 * p.L_prime(), p.m));
            std::int64_t a0 = -p.M;
            while (floor_mod(a0 + s.r, b) != 0)
                --a0;
            std::int64_t a_end = n + p.M;
            while (floor_mod(a_end + s.r, b) != 0)
                ++a_end;
            REQUIRE(c.dim_bound);
            CHECK(*c.dim_bound == make_rational(a_end - a0, p.m));
            CHECK(Rational(c.target_dim) <= *c.dim_bound);
        }
    }

    // N = 2^k, z ≡ 0.
    const auto s0 = sample_with_residue(inst, b, 0, 5);
    const auto c0 = fiber_dimension_certificate(inst, s0, b);
    CHECK(*c0.dim_bound == make_rational(b + 2 * 8, p.m));

    auto c = fiber_dimension_certificate(inst, inst.sample(b, 9), b);
    attach_fiber_check(c, 1000, 9);
    CHECK(c.all_discharged());
    CHECK(verify_artifact(c.to_json()).exit_code == 0);

    const auto other = inst.pi(inst.sample(b, 10));
    CHECK_THROWS_AS(fiber_dimension_certificate(inst, other, inst.sample(b, 11), b), PreconditionError);

    // Product with a point keeps the dimension.
    const auto pt = identity_certificate(one_point_space(), 0, c.epsilon);
    CHECK(product_certificate(c, pt).target_dim == c.target_dim);
}

TEST_CASE("ratio table")
{
    const auto p = CounterexampleParams::with_level(make_rational(1, 2), make_rational(1, 2), 3, true);
    const auto rows = mdim_report(p, {make_rational(1, 2)}, {8, 16, 32, 64});
    REQUIRE(rows.size() == 4);
    Rational prev = 2;
    for (const auto& r : rows) {
        CHECK(r.fiber_ratio() <= r.fiber_ratio_bound());
        CHECK(r.fiber_ratio() <= prev);
        prev = r.fiber_ratio();
        CHECK(r.image_dim == image_dimension(p, r.N));
    }
    std::istringstream csv(mdim_csv(rows));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "eps,N,fiber_dim_over_N,image_dim_over_N");

    const auto stacked = mdim_report_stacked(make_rational(1, 2), 2, {64});
    REQUIRE(stacked.size() == 2);
    const auto w1 = search_params(make_rational(1, 4), 1), w2 = search_params(make_rational(1, 8), make_rational(1, 2));
    CHECK(stacked[0].eps == 1);
    CHECK(stacked[0].m == w1.m);
    CHECK(stacked[1].eps == make_rational(1, 2));
    CHECK(stacked[1].m == w2.m);
    CHECK(stacked[0].m == 5);
    CHECK(stacked[1].m == 9);
}

TEST_CASE("wedge of cones")
{
    const Sft gm = Sft::golden_mean();
    const Rational eps = make_rational(1, 2);
    const std::int64_t n = 2, iters = 4;
    const std::int64_t window = n + 2 * window_margin(eps, 0);
    CHECK(window_margin(eps, 0) == 5);

    // rho = 1 everywhere.
    const auto full = sbp_instance(gm, {cylinder(gm, 0, {0}), cylinder(gm, 0, {1})}, make_rational(1, 10), eps, n);
    auto c = wedge_cone_embedding(full, iters);
    CHECK(c.all_discharged());
    CHECK(c.target_dim == iters * (window + 1));
    attach_fiber_check(c, 300, 1);
    CHECK(c.all_discharged());
    CHECK(verify_artifact(c.to_json()).exit_code == 0);

    // rho = 0 everywhere: only the global map is left.
    const auto none = sbp_instance_from_pieces(gm, {}, 2, eps, n);
    const auto c0 = wedge_cone_embedding(none, iters);
    CHECK(c0.all_discharged());
    CHECK(c0.target_dim == iters * (window + 1));
    CHECK(c0.factor_dims.at(0) == 0);

    // Punctured: complement [01] has capacity 1/2.
    const auto punct = sbp_instance_from_pieces(gm, {cylinder(gm, 0, {0, 0}), cylinder(gm, 0, {1})},
                                                make_rational(3, 4), eps, n);
    CHECK(punct.complement_ocap.value == make_rational(1, 2));
    const auto cp = wedge_cone_embedding(punct, iters);
    CHECK(cp.all_discharged());
    const auto visits = max_visits(gm, punct.complement, iters * n);
    CHECK(Rational(visits) <= punct.complement_ocap.value * iters * n + punct.complement_ocap.graph_size);
    CHECK(cp.target_dim == iters * (window + 1) + std::min(iters, visits) * (window + 1));

    CHECK_THROWS_AS(sbp_instance_from_pieces(gm, {cylinder(gm, 0, {0}), cylinder(gm, 0, {0, 0})}, 1, eps, n),
                    PreconditionError);
    auto bad = full;
    bad.global_cert->epsilon = make_rational(1, 3);
    CHECK_THROWS_AS(wedge_cone_embedding(bad, iters), PreconditionError);
}
