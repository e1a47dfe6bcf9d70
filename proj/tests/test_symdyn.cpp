#include <doctest.h>

#include <algorithm>

#include "meandim/error.hpp"
#include "meandim/rng.hpp"
#include "meandim/symdyn.hpp"

using namespace meandim;

namespace {

// Three-symbol SFT without the blocks "22" and "20".
Sft three_symbols() { return Sft({"0", "1", "2"}, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 1}}); }

CylinderSet random_cylinder(const Sft& s, Rng& rng)
{
    CylinderSet out = empty_set();
    const int parts = 1 + static_cast<int>(rng.below(2));
    for (int p = 0; p < parts; ++p) {
        const auto len = 1 + rng.below(3);
        const auto words = s.words(len);
        const auto& w = words[rng.below(words.size())];
        out = unite(s, out, cylinder(s, static_cast<std::int64_t>(rng.below(3)) - 1, w));
    }
    return out;
}

// sup over admissible words of the visit count, straight from the definition.
std::int64_t brute_visits(const Sft& s, const CylinderSet& a, std::int64_t n)
{
    if (a.empty())
        return 0;
    const std::int64_t lo = a.lo, span = n + static_cast<std::int64_t>(a.len) - 1;
    std::int64_t best = 0;
    for (const auto& w : s.words(static_cast<std::size_t>(std::max<std::int64_t>(span, 1)))) {
        std::int64_t c = 0;
        for (std::int64_t k = 0; k < n; ++k)
            c += a.contains(lo - k, w);
        best = std::max(best, c);
    }
    return best;
}

// Visits of the periodic orbit generated by `period` over one period.
std::int64_t periodic_visits(const CylinderSet& a, const Word& period)
{
    const auto p = static_cast<std::int64_t>(period.size());
    std::int64_t c = 0;
    for (std::int64_t k = 0; k < p; ++k) {
        Word w;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.len); ++i)
            w.push_back(period[static_cast<std::size_t>((((a.lo + k + i) % p) + p) % p)]);
        c += a.contains(a.lo, w);
    }
    return c;
}

}  // namespace

TEST_CASE("SFT construction")
{
    CHECK(Sft::golden_mean().words(2).size() == 3);
    CHECK(Sft::full_shift(2).words(3).size() == 8);
    CHECK_THROWS_AS(Sft({"0", "1"}, {{0, 0}, {0, 1}}), PreconditionError);
    CHECK_THROWS_AS(Sft({}, {}), PreconditionError);
    const auto ws = three_symbols().words(2);
    CHECK(std::is_sorted(ws.begin(), ws.end()));
    CHECK(ws.size() == 7);
}

TEST_CASE("cylinder algebra")
{
    const Sft s = three_symbols();
    Rng rng(2);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = random_cylinder(s, rng), b = random_cylinder(s, rng);
        const auto u = unite(s, a, b), i = intersect(s, a, b), d = subtract(s, a, b), c = complement(s, a);
        CHECK(same_set(s, unite(s, a, c), whole_space()));
        CHECK(intersect(s, a, c).empty());
        CHECK(subset(s, i, a));
        CHECK(subset(s, a, u));
        CHECK(same_set(s, unite(s, d, i), a));
        // Pointwise on every word of a common window.
        const std::int64_t lo = -1;
        for (const auto& w : s.words(5)) {
            const bool in_a = a.contains(lo, w), in_b = b.contains(lo, w);
            CHECK(u.contains(lo, w) == (in_a || in_b));
            CHECK(i.contains(lo, w) == (in_a && in_b));
            CHECK(d.contains(lo, w) == (in_a && !in_b));
            CHECK(c.contains(lo, w) == !in_a);
        }
    }
    CHECK_THROWS_AS(cylinder(Sft::golden_mean(), 0, {1, 1}), PreconditionError);
}

TEST_CASE("finite-N orbit capacity")
{
    const Sft gm = Sft::golden_mean();
    const auto one = cylinder(gm, 0, {1});
    CHECK(ocap_finite_N(gm, one, 2) == make_rational(1, 2));
    CHECK(ocap_finite_N(gm, empty_set(), 5) == 0);
    const Sft full = Sft::full_shift(2);
    for (std::int64_t n = 1; n <= 10; ++n)
        CHECK(ocap_finite_N(full, cylinder(full, 0, {1}), n) == 1);
    CHECK_THROWS_AS(ocap_finite_N(gm, one, 0), PreconditionError);

    Rng rng(6);
    const Sft s = three_symbols();
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = random_cylinder(s, rng);
        for (std::int64_t n = 1; n <= 6; ++n)
            CHECK(max_visits(s, a, n) == brute_visits(s, a, n));
    }
}

TEST_CASE("orbit capacity limit")
{
    const Sft full = Sft::full_shift(2);
    const auto f1 = ocap_limit(full, cylinder(full, 0, {1}));
    CHECK(f1.value == 1);
    CHECK(full.spell(f1.witness) == "1");

    const Sft gm = Sft::golden_mean();
    const auto g1 = ocap_limit(gm, cylinder(gm, 0, {1}));
    CHECK(g1.value == make_rational(1, 2));
    CHECK(gm.spell(g1.witness) == "10");
    CHECK(ocap_limit(gm, empty_set()).value == 0);

    Rng rng(8);
    for (const Sft& s : {three_symbols(), gm, Sft::full_shift(3)}) {
        for (int trial = 0; trial < 30; ++trial) {
            const auto a = random_cylinder(s, rng), b = random_cylinder(s, rng);
            const auto la = ocap_limit(s, a);
            // The witness is a periodic orbit attaining the value.
            CHECK(make_rational(periodic_visits(a, la.witness), static_cast<std::int64_t>(la.witness.size())) == la.value);
            CHECK(s.admissible(la.witness));
            CHECK(s.allowed(la.witness.back(), la.witness.front()));
            CHECK(ocap_limit(s, unite(s, a, b)).value <= la.value + ocap_limit(s, b).value);

            Rational prev = ocap_finite_N(s, a, 1);
            for (std::int64_t n = 1; n <= 24; ++n) {
                const Rational fn = ocap_finite_N(s, a, n);
                CHECK(fn >= la.value);
                CHECK(fn - la.value <= make_rational(static_cast<std::int64_t>(la.graph_size), n));
                if (n > 1 && (n & (n - 1)) == 0) {
                    CHECK(fn <= prev);
                    prev = fn;
                }
            }
        }
    }
}

TEST_CASE("neighborhoods")
{
    const Sft gm = Sft::golden_mean();
    const auto e = cylinder(gm, 0, {1});
    const auto n = ocap_neighborhood(gm, e, make_rational(1, 10));
    CHECK(same_set(gm, n.set, e));
    CHECK(n.ocap == make_rational(1, 2));
    CHECK(ocap_neighborhood(gm, empty_set(), 1).ocap == 0);

    // [0] ⊇ [00] ⊇ [000]: capacities are nonincreasing along the family.
    const Sft full = Sft::full_shift(2);
    const std::vector<CylinderSet> levels{cylinder(full, 0, {0}), cylinder(full, 0, {0, 0}), cylinder(full, 0, {0, 0, 0})};
    const auto nested = ocap_neighborhood_nested(full, levels, make_rational(1, 100));
    REQUIRE(nested.ocap_by_depth.size() == 3);
    for (std::size_t d = 1; d < 3; ++d)
        CHECK(nested.ocap_by_depth[d] <= nested.ocap_by_depth[d - 1]);
    CHECK(nested.ocap < nested.ocap_by_depth.back() + make_rational(1, 100));

    const std::vector<CylinderSet> up{cylinder(full, 0, {0, 0}), cylinder(full, 0, {0})};
    CHECK_THROWS_AS(ocap_neighborhood_nested(full, up, 1), PreconditionError);
}

TEST_CASE("cover refinement")
{
    const Sft gm = Sft::golden_mean();
    const auto whole = sbp_cover_refine(gm, {whole_space()}, make_rational(1, 10));
    REQUIRE(whole.pieces.size() == 1);
    CHECK(same_set(gm, whole.pieces[0], whole_space()));
    CHECK(whole.complement.empty());

    const auto v0 = cylinder(gm, 0, {0}), v1 = cylinder(gm, 0, {1});
    const auto split = sbp_cover_refine(gm, {v0, v1}, make_rational(1, 10));
    CHECK(same_set(gm, split.pieces[0], v0));
    CHECK(same_set(gm, split.pieces[1], v1));

    const auto v0b = unite(gm, v0, cylinder(gm, 0, {1, 0}));
    const auto peeled = sbp_cover_refine(gm, {v0b, v1}, make_rational(1, 10));
    CHECK(same_set(gm, peeled.pieces[0], v0b));
    CHECK(same_set(gm, peeled.pieces[1], subtract(gm, v1, v0b)));
    CHECK(intersect(gm, peeled.pieces[0], peeled.pieces[1]).empty());
    CHECK(same_set(gm, unite(gm, peeled.pieces[0], peeled.pieces[1]), whole_space()));
    CHECK(peeled.complement_ocap.value == 0);

    CHECK_THROWS_WITH_AS(sbp_cover_refine(gm, {v0}, make_rational(1, 10)), doctest::Contains("not a cover"),
                         PreconditionError);
}

TEST_CASE("window metrics")
{
    for (std::int64_t n = 1; n <= 6; ++n) {
        Window x{-3, Vec(static_cast<std::size_t>(n + 6), Rational(0))};
        Window y = x;
        CHECK(rho_N(x, y, n).value == 0);
        y.values[static_cast<std::size_t>(n - 1 + 3)] = 1;
        CHECK(rho_N(x, y, n).value == 1);
    }

    // N = 1 is rho itself on the window.
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        Window x{-4, {}}, y{-4, {}};
        Rational direct = 0;
        for (std::int64_t i = -4; i < 5; ++i) {
            x.values.push_back(rng.unit_rational(8));
            y.values.push_back(rng.unit_rational(8));
            direct += pow2(-std::abs(i)) * abs(x.values.back() - y.values.back());
        }
        const auto d = rho_N(x, y, 1);
        CHECK(d.value == direct);
        // Unseen coordinates: Σ_{i<=-5} 2^{-|i|} + Σ_{i>=5} 2^{-i}.
        CHECK(d.tail_bound == make_rational(1, 8));
    }

    Window shortw{1, Vec(3, Rational(0))};
    CHECK_THROWS_AS(rho_N(shortw, shortw, 2), PreconditionError);

    const Word a{0, 1, 0, 0}, b{0, 1, 1, 0};
    CHECK(rho_prime_N(0, a, b, 1).value == make_rational(1, 4));
    CHECK(rho_prime_N(0, a, b, 3).value == 1);
}

TEST_CASE("odometer tower")
{
    const OdometerTower t2(2);
    CHECK(odometer_E(t2, 1, 0, 8) == std::vector<std::int64_t>{3, 7});
    CHECK(odometer_E(t2, 0, 0, 4) == std::vector<std::int64_t>{0});
    const auto e = odometer_E(t2, 3, -20, 20);
    for (std::size_t i = 1; i < e.size(); ++i)
        CHECK(e[i] - e[i - 1] == 4);
    CHECK_THROWS_AS(odometer_E(t2, 4, 0, 8), PreconditionError);

    for (int k = 0; k <= 10; ++k) {
        const OdometerTower t(k);
        const std::int64_t p = t.period();
        CHECK(t.L() < p);
        CHECK(p < t.L_prime());
        // U ∩ R^{-n} U = ∅ for 1 <= n <= L: a point of U returns only after 2^k steps.
        for (std::int64_t n = 1; n <= t.L(); ++n)
            CHECK(n % p != 0);
        CHECK(odometer_E(t, 0, 1, p + 1) == std::vector<std::int64_t>{p});
        for (std::int64_t r = 0; r < std::min<std::int64_t>(p, 8); ++r) {
            // Every z reaches U within L' - 1 steps.
            for (std::int64_t x = -3 * p; x < 3 * p; x += std::max<std::int64_t>(1, p / 4)) {
                const auto a = t.previous(r, x), b = t.next(r, x);
                CHECK(a <= x);
                CHECK(b >= x);
                CHECK(x - a < p);
                CHECK(b - x < p);
                CHECK(((a + r) % p + p) % p == 0);
                CHECK(((b + r) % p + p) % p == 0);
            }
        }
    }
}

TEST_CASE("JSON formats")
{
    const Sft s = three_symbols();
    const auto back = sft_from_json(to_json(s));
    CHECK(back.alphabet() == s.alphabet());
    CHECK(back.allowed_pairs() == s.allowed_pairs());

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_cylinder(s, rng);
        CHECK(same_set(s, cylinder_from_json(s, to_json(s, a)), a));
    }
    const auto listed = cylinder_from_json(Sft::golden_mean(), nlohmann::json{{"cylinders", {{{"offset", 0}, {"word", "10"}}}}});
    CHECK(same_set(Sft::golden_mean(), listed, cylinder(Sft::golden_mean(), 0, {1, 0})));
    CHECK_THROWS_AS(sft_from_json(nlohmann::json{{"alphabet", {"a"}}, {"allowed", {{"a", "b"}}}}), PreconditionError);
}
