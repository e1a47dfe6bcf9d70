#include "meandim/certs.hpp"

#include <algorithm>

#include "meandim/error.hpp"

namespace meandim {

Rational linf_distance(const Point& a, const Point& b)
{
    if (a.size() != b.size())
        throw PreconditionError("points of different dimension");
    Rational m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = abs(a[i] - b[i]);
        if (d > m)
            m = d;
    }
    return m;
}

MetricSpaceHandle one_point_space()
{
    MetricSpaceHandle h;
    h.kind = "point";
    h.descriptor = {{"kind", "point"}};
    h.metric = [](const Point&, const Point&) { return Rational(0); };
    h.sampler = [](Rng&) { return Point{}; };
    h.point_size = 0;
    return h;
}

std::string to_string(ObligationKind k)
{
    return k == ObligationKind::structural ? "structural" : "sampled";
}

std::string to_string(ObligationStatus s)
{
    switch (s) {
    case ObligationStatus::discharged:
        return "discharged";
    case ObligationStatus::sampled_only:
        return "sampled-only";
    case ObligationStatus::failed:
        return "failed";
    }
    return "failed";
}

json DischargeRecord::to_json() const
{
    return {{"name", name}, {"kind", to_string(kind)}, {"status", to_string(status)}, {"data", data},
            {"witness", witness}};
}

DischargeRecord DischargeRecord::from_json(const json& j)
{
    DischargeRecord r;
    try {
        r.name = j.at("name").get<std::string>();
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "structural")
            r.kind = ObligationKind::structural;
        else if (kind == "sampled")
            r.kind = ObligationKind::sampled;
        else
            throw PreconditionError("unknown obligation kind \"" + kind + "\"");
        const auto status = j.at("status").get<std::string>();
        if (status == "discharged")
            r.status = ObligationStatus::discharged;
        else if (status == "sampled-only")
            r.status = ObligationStatus::sampled_only;
        else if (status == "failed")
            r.status = ObligationStatus::failed;
        else
            throw PreconditionError("unknown obligation status \"" + status + "\"");
        r.data = j.value("data", json::object());
        r.witness = j.value("witness", json(nullptr));
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("malformed obligation record: ") + e.what());
    }
    return r;
}

DischargeRecord structural(std::string name, bool holds, json data, json witness)
{
    DischargeRecord r;
    r.name = std::move(name);
    r.kind = ObligationKind::structural;
    r.status = holds ? ObligationStatus::discharged : ObligationStatus::failed;
    r.data = std::move(data);
    if (!holds && witness.is_null())
        witness = r.data;
    r.witness = holds ? json(nullptr) : std::move(witness);
    return r;
}

bool EpsEmbeddingCertificate::all_discharged() const
{
    return std::all_of(obligations.begin(), obligations.end(), [](const auto& r) { return r.ok(); });
}

const DischargeRecord* EpsEmbeddingCertificate::find(const std::string& name) const
{
    for (const auto& r : obligations)
        if (r.name == name)
            return &r;
    return nullptr;
}

json EpsEmbeddingCertificate::to_json() const
{
    json obl = json::array();
    for (const auto& r : obligations)
        obl.push_back(r.to_json());
    json j = {{"type", "eps_embedding_certificate"},
              {"domain", domain.descriptor},
              {"epsilon", meandim::to_json(epsilon)},
              {"target_dim", target_dim},
              {"factor_dims", factor_dims},
              {"obligations", obl}};
    if (dim_bound)
        j["dim_bound"] = meandim::to_json(*dim_bound);
    return j;
}

EpsEmbeddingCertificate identity_certificate(MetricSpaceHandle space, std::int64_t target_dim, Rational epsilon)
{
    if (target_dim < 0 || epsilon <= 0)
        throw PreconditionError("certificate needs target_dim >= 0 and epsilon > 0");
    EpsEmbeddingCertificate c;
    c.target_dim = target_dim;
    c.epsilon = std::move(epsilon);
    c.evaluator = [](const Point& x) { return x; };
    c.target_metric = space.metric;
    c.target_size = space.point_size;
    c.factor_dims = {target_dim};
    c.obligations.push_back(structural("declared_dimension", true, {{"target_dim", target_dim}}));
    c.domain = std::move(space);
    return c;
}

namespace {

json flatten_factors(const json& d)
{
    if (d.is_object() && d.value("kind", "") == "product")
        return d.at("factors");
    return json::array({d});
}

Point slice(const Point& x, std::size_t from, std::size_t count)
{
    return Point(x.begin() + static_cast<std::ptrdiff_t>(from), x.begin() + static_cast<std::ptrdiff_t>(from + count));
}

Point concat(Point a, const Point& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<DischargeRecord> without(const std::vector<DischargeRecord>& rs, const std::string& name)
{
    std::vector<DischargeRecord> out;
    for (const auto& r : rs)
        if (r.name != name)
            out.push_back(r);
    return out;
}

}  // namespace

EpsEmbeddingCertificate product_certificate(const EpsEmbeddingCertificate& c1, const EpsEmbeddingCertificate& c2)
{
    if (c1.epsilon != c2.epsilon)
        throw PreconditionError("mismatched epsilon (" + to_string(c1.epsilon) + " vs " + to_string(c2.epsilon) + ")");
    EpsEmbeddingCertificate c;
    c.epsilon = c1.epsilon;
    c.target_dim = c1.target_dim + c2.target_dim;
    if (c1.dim_bound && c2.dim_bound)
        c.dim_bound = *c1.dim_bound + *c2.dim_bound;

    const std::size_t s1 = c1.domain.point_size, s2 = c2.domain.point_size;
    const std::size_t t1 = c1.target_size, t2 = c2.target_size;
    auto& d = c.domain;
    d.kind = "product";
    json factors = flatten_factors(c1.domain.descriptor);
    for (const auto& f : flatten_factors(c2.domain.descriptor))
        factors.push_back(f);
    d.descriptor = {{"kind", "product"}, {"factors", factors}};
    d.point_size = s1 + s2;
    d.metric = [m1 = c1.domain.metric, m2 = c2.domain.metric, s1, s2](const Point& a, const Point& b) {
        return std::max(m1(slice(a, 0, s1), slice(b, 0, s1)), m2(slice(a, s1, s2), slice(b, s1, s2)));
    };
    if (c1.domain.sampler && c2.domain.sampler)
        d.sampler = [f1 = c1.domain.sampler, f2 = c2.domain.sampler](Rng& r) {
            Point a = f1(r);
            return concat(std::move(a), f2(r));
        };
    if (c1.domain.pair_sampler && c2.domain.pair_sampler)
        d.pair_sampler = [f1 = c1.domain.pair_sampler, f2 = c2.domain.pair_sampler](Rng& r) {
            auto [a1, b1] = f1(r);
            auto [a2, b2] = f2(r);
            return std::make_pair(concat(std::move(a1), a2), concat(std::move(b1), b2));
        };
    c.evaluator = [e1 = c1.evaluator, e2 = c2.evaluator, s1, s2](const Point& x) {
        return concat(e1(slice(x, 0, s1)), e2(slice(x, s1, s2)));
    };
    c.target_size = t1 + t2;
    c.target_metric = [m1 = c1.target_metric, m2 = c2.target_metric, t1, t2](const Point& a, const Point& b) {
        return std::max(m1(slice(a, 0, t1), slice(b, 0, t1)), m2(slice(a, t1, t2), slice(b, t1, t2)));
    };

    c.factor_dims = c1.factor_dims;
    c.factor_dims.insert(c.factor_dims.end(), c2.factor_dims.begin(), c2.factor_dims.end());
    c.obligations = without(c1.obligations, "product_rule");
    for (auto& r : without(c2.obligations, "product_rule"))
        c.obligations.push_back(std::move(r));
    std::int64_t sum = 0;
    for (auto v : c.factor_dims)
        sum += v;
    c.obligations.push_back(
        structural("product_rule", sum == c.target_dim, {{"factor_dims", c.factor_dims}, {"target_dim", c.target_dim}}));
    return c;
}

EpsEmbeddingCertificate pullback_certificate(const EpsEmbeddingCertificate& c, MetricSpaceHandle new_domain,
                                             PointMap phi, const NondecreasingWitness& witness)
{
    EpsEmbeddingCertificate out = c;
    out.evaluator = [e = c.evaluator, phi](const Point& x) { return e(phi(x)); };
    out.domain = std::move(new_domain);

    if (witness.kind == ObligationKind::structural) {
        static const std::vector<std::string> known = {"identity", "isometric_slice", "coordinate_inclusion",
                                                       "window_projection"};
        const bool ok = std::find(known.begin(), known.end(), witness.name) != known.end();
        json data = witness.data;
        data["map"] = witness.name;
        out.obligations.push_back(structural("distance_nondecreasing", ok, data));
        return out;
    }

    DischargeRecord r;
    r.name = "distance_nondecreasing";
    r.kind = ObligationKind::sampled;
    r.status = ObligationStatus::sampled_only;
    r.data = {{"map", witness.name}, {"trials", witness.trials}, {"seed", witness.seed}};
    const auto& dom = out.domain;
    const auto& target = c.domain;
    if (!dom.sampler)
        throw PreconditionError("sampled pullback witness needs a domain sampler");
    for (std::size_t t = 0; t < witness.trials; ++t) {
        Rng rng(derive_seed(witness.seed, t));
        Point x = dom.sampler(rng);
        Point y = dom.sampler(rng);
        const Rational before = dom.metric(x, y);
        const Rational after = target.metric(phi(x), phi(y));
        if (before > after) {
            r.status = ObligationStatus::failed;
            r.witness = {{"trial", t},
                         {"x", to_json(x)},
                         {"y", to_json(y)},
                         {"domain_distance", to_json(before)},
                         {"image_distance", to_json(after)}};
            break;
        }
    }
    out.obligations.push_back(std::move(r));
    return out;
}

EpsEmbeddingCertificate chain_fiber_certificate(MetricSpaceHandle domain,
                                                std::function<Point(const Point&, std::int64_t)> shift,
                                                const std::vector<ChainBlock>& blocks,
                                                const std::vector<std::size_t>& itinerary, std::int64_t n,
                                                std::optional<Rational> a)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    if (itinerary.empty())
        throw PreconditionError("itinerary offsets inconsistent with block lengths (empty itinerary)");
    std::vector<std::int64_t> offsets, lengths, dims;
    std::int64_t total = 0;
    for (auto i : itinerary) {
        if (i >= blocks.size())
            throw PreconditionError("itinerary refers to unknown block " + std::to_string(i));
        if (blocks[i].length < 1)
            throw PreconditionError("block lengths must be >= 1");
        if (blocks[i].cert.epsilon != blocks[itinerary.front()].cert.epsilon)
            throw PreconditionError("mismatched epsilon between chain blocks");
        offsets.push_back(total);
        lengths.push_back(blocks[i].length);
        dims.push_back(blocks[i].cert.target_dim);
        total += blocks[i].length;
    }
    if (!(offsets.back() < n && n <= total))
        throw PreconditionError("itinerary offsets inconsistent with block lengths",
                                {{"N", n}, {"offsets", offsets}, {"lengths", lengths}});

    EpsEmbeddingCertificate c;
    c.epsilon = blocks[itinerary.front()].cert.epsilon;
    c.factor_dims = dims;
    for (auto d : dims)
        c.target_dim += d;

    std::vector<PointMap> evals;
    std::vector<PointMetric> metrics;
    std::vector<std::size_t> sizes;
    for (auto i : itinerary) {
        evals.push_back(blocks[i].cert.evaluator);
        metrics.push_back(blocks[i].cert.target_metric);
        sizes.push_back(blocks[i].cert.target_size);
        c.target_size += blocks[i].cert.target_size;
        for (const auto& r : blocks[i].cert.obligations)
            if (r.name != "product_rule")
                c.obligations.push_back(r);
    }
    c.evaluator = [evals, offsets, shift](const Point& x) {
        Point out;
        for (std::size_t j = 0; j < evals.size(); ++j) {
            Point part = evals[j](shift(x, offsets[j]));
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    };
    c.target_metric = [metrics, sizes](const Point& a, const Point& b) {
        Rational m = 0;
        std::size_t at = 0;
        for (std::size_t j = 0; j < metrics.size(); ++j) {
            Rational d = metrics[j](slice(a, at, sizes[j]), slice(b, at, sizes[j]));
            if (d > m)
                m = d;
            at += sizes[j];
        }
        return m;
    };
    json desc = {{"kind", "chain"}, {"N", n}, {"offsets", offsets}, {"lengths", lengths}, {"base", domain.descriptor}};
    c.domain = std::move(domain);
    c.domain.descriptor = std::move(desc);
    c.domain.kind = "chain";

    c.obligations.push_back(structural("chain_itinerary", true,
                                       {{"N", n},
                                        {"offsets", offsets},
                                        {"lengths", lengths},
                                        {"dims", dims},
                                        {"target_dim", c.target_dim}}));
    if (a) {
        std::int64_t n_bar = 0;
        for (const auto& b : blocks)
            n_bar = std::max(n_bar, b.length);
        bool premise = true;
        for (std::size_t j = 0; j < dims.size(); ++j)
            premise = premise && Rational(dims[j]) < *a * Rational(lengths[j]);
        const bool bound = Rational(c.target_dim) < *a * Rational(n + n_bar);
        c.obligations.push_back(structural("chain_dimension_bound", premise && bound,
                                           {{"a", to_json(*a)},
                                            {"N", n},
                                            {"N_bar", n_bar},
                                            {"dims", dims},
                                            {"lengths", lengths},
                                            {"target_dim", c.target_dim}}));
    }
    return c;
}

namespace {

struct TrialOutcome {
    bool collided = false;
    Rational domain_distance;
    Rational image_distance;
    Point x, y;
};

}  // namespace

DischargeRecord sample_fiber_check(const PointMap& evaluator, const PointMetric& target_metric,
                                   const MetricSpaceHandle& domain, const FiberCheckOptions& opts)
{
    if (opts.epsilon <= 0)
        throw PreconditionError("epsilon must be positive");
    const Rational eta = opts.eta ? *opts.eta : opts.epsilon / 100;
    if (eta <= 0)
        throw PreconditionError("eta must be positive");
    if (opts.trials < 1)
        throw PreconditionError("trials must be >= 1");

    DischargeRecord r;
    r.name = "sampled_fiber_check";
    r.kind = ObligationKind::sampled;
    r.status = ObligationStatus::sampled_only;
    r.data = {{"epsilon", to_json(opts.epsilon)}, {"eta", to_json(eta)}, {"trials", opts.trials}, {"seed", opts.seed}};
    if (!domain.sampler) {
        r.data["collisions"] = 0;
        r.data["note"] = "empty domain";
        return r;
    }

    std::vector<TrialOutcome> out(opts.trials);
    parallel_for(opts.trials, [&](std::size_t t) {
        Rng rng(derive_seed(opts.seed, t));
        Point x, y;
        if (domain.pair_sampler && t % 2 == 0) {
            std::tie(x, y) = domain.pair_sampler(rng);
        } else {
            x = domain.sampler(rng);
            y = domain.sampler(rng);
        }
        auto& o = out[t];
        o.image_distance = target_metric(evaluator(x), evaluator(y));
        if (o.image_distance <= eta) {
            o.collided = true;
            o.domain_distance = domain.metric(x, y);
            if (o.domain_distance >= opts.epsilon) {
                o.x = std::move(x);
                o.y = std::move(y);
            }
        }
    });

    std::size_t collisions = 0;
    Rational worst = 0;
    for (std::size_t t = 0; t < out.size(); ++t) {
        const auto& o = out[t];
        if (!o.collided)
            continue;
        ++collisions;
        if (o.domain_distance > worst)
            worst = o.domain_distance;
        if (o.domain_distance >= opts.epsilon && r.status != ObligationStatus::failed) {
            r.status = ObligationStatus::failed;
            r.witness = {{"trial", t},
                         {"x", to_json(o.x)},
                         {"y", to_json(o.y)},
                         {"domain_distance", to_json(o.domain_distance)},
                         {"image_distance", to_json(o.image_distance)}};
        }
    }
    r.data["collisions"] = collisions;
    r.data["max_collision_distance"] = to_json(worst);
    return r;
}

void attach_fiber_check(EpsEmbeddingCertificate& c, std::size_t trials, std::uint64_t seed, std::optional<Rational> eta)
{
    FiberCheckOptions o{c.epsilon, std::move(eta), trials, seed};
    c.obligations.push_back(sample_fiber_check(c.evaluator, c.target_metric, c.domain, o));
}

}  // namespace meandim
