#include <doctest.h>

#include <set>

#include "meandim/certs.hpp"
#include "meandim/error.hpp"
#include "meandim/verify.hpp"
#include "support.hpp"

using namespace meandim;
using testing::cube_space;

namespace {

EpsEmbeddingCertificate cube_cert(std::size_t n, const Rational& eps = make_rational(1, 4))
{
    return identity_certificate(cube_space(n), static_cast<std::int64_t>(n), eps);
}

std::multiset<std::string> names(const EpsEmbeddingCertificate& c)
{
    std::multiset<std::string> out;
    for (const auto& r : c.obligations)
        out.insert(r.name);
    return out;
}

bool every_structural_record_rechecks(const EpsEmbeddingCertificate& c)
{
    for (const auto& r : c.obligations) {
        if (r.kind != ObligationKind::structural)
            continue;
        const auto ok = check_structural(r);
        if (ok && !*ok)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("product dimensions")
{
    const auto p0 = product_certificate(cube_cert(0), cube_cert(0));
    CHECK(p0.target_dim == 0);
    const auto p12 = product_certificate(cube_cert(1), cube_cert(2));
    CHECK(p12.target_dim == 3);
    CHECK(p12.factor_dims == std::vector<std::int64_t>{1, 2});
    CHECK(p12.find("product_rule") != nullptr);
    CHECK(p12.all_discharged());
    CHECK(every_structural_record_rechecks(p12));

    const auto pt = identity_certificate(one_point_space(), 0, make_rational(1, 4));
    CHECK(product_certificate(cube_cert(2), pt).target_dim == 2);

    CHECK_THROWS_AS(product_certificate(cube_cert(1), cube_cert(1, make_rational(1, 3))), PreconditionError);
}

TEST_CASE("product evaluates factorwise on the max metric")
{
    const auto p = product_certificate(cube_cert(1), cube_cert(2));
    const Point x{make_rational(1, 2), 0, 1};
    CHECK(p.evaluator(x) == x);
    CHECK(p.domain.metric(x, Point{0, 0, make_rational(3, 4)}) == make_rational(1, 2));
    CHECK(p.domain.point_size == 3);
}

TEST_CASE("product associativity")
{
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = cube_cert(rng.below(3)), b = cube_cert(rng.below(3)), c = cube_cert(rng.below(3));
        const auto left = product_certificate(product_certificate(a, b), c);
        const auto right = product_certificate(a, product_certificate(b, c));
        CHECK(left.target_dim == right.target_dim);
        CHECK(left.factor_dims == right.factor_dims);
        CHECK(names(left) == names(right));
    }
}

TEST_CASE("pullbacks")
{
    const auto c = cube_cert(2);
    const auto same = pullback_certificate(c, cube_space(2), [](const Point& x) { return x; }, {ObligationKind::structural, "identity"});
    CHECK(same.target_dim == c.target_dim);
    CHECK(same.epsilon == c.epsilon);
    CHECK(same.all_discharged());

    // x -> (x, 1/2) into [0,1]^2.
    const auto slice = pullback_certificate(
        c, cube_space(1), [](const Point& x) { return Point{x[0], make_rational(1, 2)}; },
        {ObligationKind::structural, "isometric_slice"});
    CHECK(slice.target_dim == 2);
    CHECK(slice.all_discharged());
    CHECK(slice.evaluator(Point{make_rational(1, 3)}) == Point{make_rational(1, 3), make_rational(1, 2)});

    NondecreasingWitness sampled{ObligationKind::sampled, "halving"};
    sampled.trials = 200;
    sampled.seed = 4;
    const auto half = pullback_certificate(
        c, cube_space(2), [](const Point& x) { return Point{x[0] / 2, x[1] / 2}; }, sampled);
    CHECK_FALSE(half.all_discharged());
    const auto* r = half.find("distance_nondecreasing");
    REQUIRE(r != nullptr);
    CHECK(r->status == ObligationStatus::failed);
    CHECK_FALSE(r->witness.is_null());

    const auto ok = pullback_certificate(
        c, cube_space(2), [](const Point& x) { return x; }, sampled);
    CHECK(ok.all_discharged());

    const auto unknown = pullback_certificate(c, cube_space(2), [](const Point& x) { return x; },
                                              {ObligationKind::structural, "trust me"});
    CHECK_FALSE(unknown.all_discharged());
}

TEST_CASE("pullback keeps dimension and epsilon")
{
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        const Rational eps = make_rational(1, 1 + static_cast<std::int64_t>(rng.below(8)));
        const auto c = cube_cert(n, eps);
        const auto p = pullback_certificate(c, cube_space(n), [](const Point& x) { return x; },
                                            {ObligationKind::structural, "coordinate_inclusion"});
        CHECK(p.target_dim == c.target_dim);
        CHECK(p.epsilon == c.epsilon);
    }
}

TEST_CASE("chain certificates")
{
    auto shift = [](const Point& x, std::int64_t) { return x; };
    const auto one = cube_cert(1);
    const auto single = chain_fiber_certificate(cube_space(1), shift, {{one, 5}}, {0}, 5);
    CHECK(single.target_dim == one.target_dim);

    const auto two = chain_fiber_certificate(cube_space(1), shift, {{one, 3}}, {0, 0}, 6);
    CHECK(two.target_dim == 2);
    CHECK(every_structural_record_rechecks(two));

    // Over-run: offsets 0, 4, 8 with N = 9 and a = 1/2.
    const auto over = chain_fiber_certificate(cube_space(1), shift, {{one, 4}}, {0, 0, 0}, 9, make_rational(1, 2));
    const auto* b = over.find("chain_dimension_bound");
    REQUIRE(b != nullptr);
    CHECK(b->ok());
    CHECK(Rational(over.target_dim) < make_rational(1, 2) * (9 + 4));

    const auto bad = chain_fiber_certificate(cube_space(1), shift, {{cube_cert(3), 4}}, {0, 0}, 8, make_rational(1, 2));
    CHECK_FALSE(bad.all_discharged());

    CHECK_THROWS_AS(chain_fiber_certificate(cube_space(1), shift, {{one, 2}}, {0}, 3), PreconditionError);
    CHECK_THROWS_AS(chain_fiber_certificate(cube_space(1), shift, {{one, 2}}, {0, 0}, 2), PreconditionError);
}

TEST_CASE("sample_fiber_check")
{
    const auto space = cube_space(2);
    FiberCheckOptions opts{make_rational(1, 4)};
    opts.trials = 500;
    const auto id = sample_fiber_check([](const Point& x) { return x; }, linf_distance, space, opts);
    CHECK(id.ok());
    CHECK(id.kind == ObligationKind::sampled);

    const auto constant = sample_fiber_check([](const Point&) { return Point{0}; }, linf_distance, space, opts);
    CHECK_FALSE(constant.ok());
    CHECK_FALSE(constant.witness.is_null());
}

TEST_CASE("structurally discharged certificates pass sampling")
{
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = product_certificate(cube_cert(1 + rng.below(2)), cube_cert(1 + rng.below(2)));
        attach_fiber_check(c, 1 + rng.below(300), rng.next());
        CHECK(c.all_discharged());
    }
}

TEST_CASE("records round-trip through JSON")
{
    auto c = product_certificate(cube_cert(1), cube_cert(2));
    attach_fiber_check(c, 50, 9);
    for (const auto& r : c.obligations) {
        const auto back = DischargeRecord::from_json(r.to_json());
        CHECK(back.to_json() == r.to_json());
    }
    const auto j = c.to_json();
    CHECK(j.at("target_dim") == 3);
    CHECK(j.at("epsilon") == "1/4");
}

TEST_CASE("metric spot checks")
{
    Rng rng(8);
    const auto space = cube_space(3);
    for (int i = 0; i < 100; ++i) {
        const auto a = space.sampler(rng), b = space.sampler(rng);
        CHECK(space.metric(a, b) == space.metric(b, a));
        CHECK(space.metric(a, b) >= 0);
        CHECK(space.metric(a, a) == 0);
    }
}
