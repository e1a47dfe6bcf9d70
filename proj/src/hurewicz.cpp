#include "meandim/hurewicz.hpp"

#include <algorithm>
#include <sstream>

#include "meandim/error.hpp"

namespace meandim {

namespace {

int smallest_m(const Rational& delta)
{
    // 1/m < delta, and m >= 2 so the block maps have a nontrivial target
    const mpz_class m = floor_z(Rational(1) / delta) + 1;
    if (m > 1'000'000)
        throw BudgetError("delta too small: m exceeds 10^6", {{"m", m.get_str()}});
    return std::max(2, static_cast<int>(m.get_si()));
}

Vec slice(const Vec& v, std::int64_t from, std::int64_t count)
{
    return Vec(v.begin() + from, v.begin() + from + count);
}

Word random_word(const Sft& s, std::size_t len, Rng& rng)
{
    Word w;
    if (len == 0)
        return w;
    w.push_back(static_cast<int>(rng.below(s.size())));
    while (w.size() < len) {
        const auto& next = s.successors(w.back());
        w.push_back(next[rng.below(next.size())]);
    }
    return w;
}

/// Resamples w outside [keep_lo, keep_hi) (indices into w) keeping it admissible.
void resample_outside(const Sft& s, Word& w, std::size_t keep_lo, std::size_t keep_hi, Rng& rng)
{
    for (std::size_t i = keep_lo; i-- > 0;) {
        const auto& prev = s.predecessors(w[i + 1]);
        w[i] = prev[rng.below(prev.size())];
    }
    for (std::size_t i = keep_hi; i < w.size(); ++i) {
        const auto& next = s.successors(w[i - 1]);
        w[i] = next[rng.below(next.size())];
    }
}

Word symbols_of(const Vec& v, std::size_t from, std::size_t count)
{
    Word w;
    for (std::size_t i = from; i < from + count; ++i)
        w.push_back(static_cast<int>(v[i].get_num().get_si()));
    return w;
}

json sets_json(const Sft& s, const std::vector<CylinderSet>& sets)
{
    json out = json::array();
    for (const auto& c : sets)
        out.push_back(to_json(s, c));
    return out;
}

CylinderSet union_of(const Sft& s, const std::vector<CylinderSet>& sets)
{
    CylinderSet u = empty_set();
    for (const auto& c : sets)
        u = unite(s, u, c);
    return u;
}

}  // namespace

int window_margin(const Rational& eps, const Rational& scale)
{
    if (eps <= 0)
        throw PreconditionError("eps must be positive");
    for (int m = 1; m <= 400; ++m) {
        const Rational t = pow2(2 - m);
        if (t < eps / 2 && (3 - t) * scale + t < eps)
            return m;
        if (3 * scale >= eps)
            break;
    }
    throw PreconditionError("no window margin M satisfies the tail inequalities",
                            {{"eps", to_json(eps)}, {"scale", to_json(scale)}});
}

CounterexampleParams CounterexampleParams::derive(const Rational& delta, const Rational& eps, std::uint64_t seed)
{
    if (delta <= 0 || eps <= 0)
        throw PreconditionError("delta and eps must be positive");
    const int m = smallest_m(delta);
    int k = 1;
    for (;; ++k) {
        if (k > 30)
            throw BudgetError("odometer level exceeds 30", {{"m", m}, {"delta", meandim::to_json(delta)}});
        const std::int64_t l = (std::int64_t{1} << k) - 1;
        if (l > m && make_rational(m, l) < delta / 2)
            break;
    }
    return with_level(delta, eps, k, false, seed);
}

CounterexampleParams CounterexampleParams::with_level(const Rational& delta, const Rational& eps, int k,
                                                      bool allow_density_violation, std::uint64_t seed)
{
    if (delta <= 0 || eps <= 0)
        throw PreconditionError("delta and eps must be positive");
    if (k < 1 || k > 30)
        throw PreconditionError("odometer level k must be in [1, 30]");
    CounterexampleParams p;
    p.delta = delta;
    p.eps = eps;
    p.m = smallest_m(delta);
    p.k = k;
    p.M = window_margin(eps, eps / 4);
    p.allow_density_violation = allow_density_violation;
    p.seed = seed;
    return p;
}

std::vector<Inequality> CounterexampleParams::inequalities() const
{
    std::vector<Inequality> out;
    const Rational t = tail();
    out.push_back({"1/m < delta", make_rational(1, m) < delta, true, {{"m", m}, {"delta", meandim::to_json(delta)}}});
    out.push_back({"L > m", L() > m, true, {{"L", L()}, {"m", m}}});
    out.push_back({"m/L < delta/2", make_rational(m, L()) < delta / 2, !allow_density_violation,
                   {{"m", m}, {"L", L()}, {"delta", meandim::to_json(delta)}}});
    out.push_back({"tail < eps/2", t < eps / 2, true, {{"M", M}, {"tail", meandim::to_json(t)}, {"eps", meandim::to_json(eps)}}});
    out.push_back({"(3 - tail) * eps/4 + tail < eps", (3 - t) * scale() + t < eps, true,
                   {{"M", M}, {"tail", meandim::to_json(t)}, {"eps", meandim::to_json(eps)}}});
    out.push_back({"L < 2^k < L'", L() < block() && block() < L_prime(), true, {{"k", k}}});
    return out;
}

void CounterexampleParams::validate() const
{
    if (delta <= 0 || eps <= 0)
        throw PreconditionError("delta and eps must be positive");
    if (m < 2 || k < 1 || k > 30 || M < 1)
        throw PreconditionError("parameters out of range", {{"m", m}, {"k", k}, {"M", M}});
    for (const auto& q : inequalities())
        if (q.fatal && !q.holds)
            throw PreconditionError("parameter inequality violated: " + q.name, q.data);
}

json CounterexampleParams::to_json() const
{
    return {{"delta", meandim::to_json(delta)},
            {"eps", meandim::to_json(eps)},
            {"m", m},
            {"k", k},
            {"M", M},
            {"allow_density_violation", allow_density_violation},
            {"seed", seed}};
}

CounterexampleParams CounterexampleParams::from_json(const json& j)
{
    try {
        auto p = with_level(rational_from_json(j.at("delta")), rational_from_json(j.at("eps")), j.at("k").get<int>(),
                            j.value("allow_density_violation", false), j.value("seed", std::uint64_t{0}));
        if (j.contains("m") && j.at("m").get<int>() != p.m)
            throw PreconditionError("recorded m does not match delta");
        if (j.contains("M") && j.at("M").get<int>() != p.M)
            throw PreconditionError("recorded M does not match eps");
        return p;
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("malformed counterexample parameters: ") + e.what());
    }
}

std::pair<std::int64_t, std::int64_t> FactorMapInstance::horizon(std::int64_t n) const
{
    return {-params.M - params.L_prime(), n + params.M + params.L_prime()};
}

Window FactorMapInstance::eval_f(const Window& x, std::int64_t r) const
{
    const std::int64_t b = params.block();
    Window out;
    out.lo = tower.next(r, x.lo);
    for (std::int64_t a = out.lo; a + b <= x.hi(); a += b) {
        Vec y = block.eval(slice(x.values, a - x.lo, b));
        out.values.insert(out.values.end(), y.begin(), y.end());
    }
    return out;
}

Image FactorMapInstance::pi(const SamplePoint& s) const
{
    return {eval_f(s.x, s.r), s.r};
}

SamplePoint FactorMapInstance::sample(std::int64_t n, std::uint64_t seed) const
{
    const auto [lo, hi] = horizon(n);
    Rng rng(seed);
    SamplePoint s;
    s.seed = seed;
    s.r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.block())));
    s.x.lo = lo;
    for (std::int64_t i = lo; i < hi; ++i)
        s.x.values.push_back(rng.unit_rational(64));
    return s;
}

FactorMapInstance build_counterexample(const CounterexampleParams& params)
{
    params.validate();
    FactorMapInstance inst{params, OdometerTower(params.k),
                           padded_block_map(static_cast<int>(params.block()), params.m, params.scale())};
    return inst;
}

std::int64_t nonzero_count(const FactorMapInstance& inst, const SamplePoint& s, std::int64_t n)
{
    const Window f = inst.eval_f(s.x, s.r);
    if (f.lo > 0 || f.hi() < n)
        throw PreconditionError("insufficient window: f is known on [" + std::to_string(f.lo) + ", " +
                                    std::to_string(f.hi()) + ")",
                                {{"required_lo", 0}, {"required_hi", n}});
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < n; ++i)
        if (f.values[static_cast<std::size_t>(i - f.lo)] != 0)
            ++count;
    return count;
}

std::int64_t image_dimension(const CounterexampleParams& p, std::int64_t n)
{
    const OdometerTower t(p.k);
    std::int64_t best = 0;
    for (std::int64_t r = 0; r < p.block(); ++r) {
        std::int64_t dim = 0;
        for (std::int64_t a = t.previous(r, 0); a < n; a += p.block()) {
            const std::int64_t lo = std::max<std::int64_t>(a, 0);
            const std::int64_t hi = std::min<std::int64_t>(a + p.m - 1, n);
            dim += std::max<std::int64_t>(0, hi - lo);
        }
        best = std::max(best, dim);
    }
    return best;
}

bool NonzeroReport::ok() const
{
    return std::all_of(obligations.begin(), obligations.end(), [](const auto& r) { return r.ok(); });
}

json NonzeroReport::to_json(const CounterexampleParams& p) const
{
    json obl = json::array();
    for (const auto& r : obligations)
        obl.push_back(r.to_json());
    json desc = p.to_json();
    desc["kind"] = "counterexample_counts";
    desc["N"] = N;
    desc["samples"] = samples;
    desc["sample_seed"] = seed;
    return {{"type", "obligation_report"},
            {"descriptor", desc},
            {"max_count", max_count},
            {"block_bound", block_bound},
            {"density_bound", meandim::to_json(density_bound)},
            {"image_dim", image_dim},
            {"obligations", obl}};
}

NonzeroReport nonzero_count_check(const FactorMapInstance& inst, std::size_t samples, std::int64_t n,
                                  std::uint64_t seed)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    if (samples < 1)
        throw PreconditionError("samples must be >= 1");
    const auto& p = inst.params;
    NonzeroReport rep;
    rep.N = n;
    rep.samples = samples;
    rep.seed = seed;
    const std::int64_t blocks = (n + p.block() - 1) / p.block() + 1;
    rep.block_bound = blocks * (p.m - 1);
    rep.density_bound = p.delta * n / 2 + 2 * p.m;
    rep.image_dim = image_dimension(p, n);

    std::vector<std::int64_t> counts(samples);
    std::vector<std::int64_t> residues(samples);
    parallel_for(samples, [&](std::size_t i) {
        const auto s = inst.sample(n, derive_seed(seed, i));
        residues[i] = s.r;
        counts[i] = nonzero_count(inst, s, n);
    });

    DischargeRecord r;
    r.name = "nonzero_count";
    r.kind = ObligationKind::sampled;
    r.status = ObligationStatus::sampled_only;
    for (std::size_t i = 0; i < samples; ++i) {
        rep.max_count = std::max(rep.max_count, counts[i]);
        const bool bad = counts[i] > rep.block_bound || !(Rational(counts[i]) < rep.density_bound) ||
                         counts[i] > rep.image_dim;
        if (bad && rep.witness.is_null())
            rep.witness = {{"sample", i}, {"seed", derive_seed(seed, i)}, {"r", residues[i]}, {"count", counts[i]}};
    }
    r.data = {{"N", n},
              {"samples", samples},
              {"seed", seed},
              {"max_count", rep.max_count},
              {"block_bound", rep.block_bound},
              {"density_bound", to_json(rep.density_bound)},
              {"image_dim", rep.image_dim}};
    if (!rep.witness.is_null()) {
        r.status = ObligationStatus::failed;
        r.witness = rep.witness;
    }
    rep.obligations.push_back(std::move(r));
    rep.obligations.push_back(structural(
        "image_dimension", rep.image_dim <= rep.block_bound && Rational(rep.image_dim) < rep.density_bound,
        {{"N", n},
         {"k", p.k},
         {"m", p.m},
         {"delta", to_json(p.delta)},
         {"image_dim", rep.image_dim},
         {"block_bound", rep.block_bound},
         {"density_bound", to_json(rep.density_bound)}}));
    return rep;
}

EpsEmbeddingCertificate fiber_dimension_certificate(const FactorMapInstance& inst, const Image& y,
                                                    const SamplePoint& base, std::int64_t n)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    const auto& p = inst.params;
    const std::int64_t b = p.block();
    const std::int64_t r = y.r;
    if (r < 0 || r >= b)
        throw PreconditionError("residue out of range [0, 2^k)");
    {
        const Image check = inst.pi(base);
        if (check.r != y.r || check.p.lo != y.p.lo || check.p.values != y.p.values)
            throw PreconditionError("y is not realized by the supplied sample");
    }
    const std::int64_t a0 = inst.tower.previous(r, -p.M);
    const std::int64_t a_end = inst.tower.next(r, n + p.M);
    if (a0 < y.p.lo || a_end > y.p.hi() || a0 < base.x.lo || a_end > base.x.hi())
        throw PreconditionError("insufficient window: need coordinates [" + std::to_string(a0) + ", " +
                                    std::to_string(a_end) + ")",
                                {{"required_lo", a0}, {"required_hi", a_end}});

    std::optional<EpsEmbeddingCertificate> prod;
    for (std::int64_t a = a0; a < a_end; a += b) {
        auto c = block_fiber_certificate(inst.block, slice(y.p.values, a - y.p.lo, b));
        if (c.find("empty_fiber"))
            throw PreconditionError("y is not realized: empty block fiber at " + std::to_string(a));
        prod = prod ? product_certificate(*prod, c) : std::move(c);
    }

    const std::int64_t lo = base.x.lo, hi = base.x.hi();
    const std::int64_t from = a0 - lo, width = a_end - a0;
    MetricSpaceHandle dom;
    dom.kind = "counterexample_fiber";
    json desc = p.to_json();
    desc["kind"] = "counterexample_fiber";
    desc["N"] = n;
    desc["r"] = r;
    desc["sample_seed"] = base.seed;
    desc["lo"] = lo;
    desc["hi"] = hi;
    dom.descriptor = desc;
    dom.point_size = static_cast<std::size_t>(hi - lo);
    dom.metric = [lo, n](const Point& u, const Point& v) {
        return rho_N(Window{lo, u}, Window{lo, v}, n).upper();
    };
    const Vec base_x = base.x.values;
    auto splice = [base_x, from](const Point& block_part) {
        Point x = base_x;
        std::copy(block_part.begin(), block_part.end(), x.begin() + from);
        return x;
    };
    dom.sampler = [s = prod->domain.sampler, splice](Rng& rng) { return splice(s(rng)); };
    if (prod->domain.pair_sampler)
        dom.pair_sampler = [s = prod->domain.pair_sampler, splice](Rng& rng) {
            auto [u, v] = s(rng);
            return std::make_pair(splice(u), splice(v));
        };
    PointMap phi = [from, width](const Point& x) { return slice(x, from, width); };

    NondecreasingWitness w;
    w.name = "window_projection";
    w.data = {{"a0", a0}, {"a_end", a_end}, {"lo", lo}, {"hi", hi}};
    auto c = pullback_certificate(*prod, dom, phi, w);
    c.epsilon = p.eps;

    const Rational t = p.tail();
    c.obligations.push_back(structural("window_tail_bound", t < p.eps / 2 && (3 - t) * p.scale() + t < p.eps,
                                       {{"M", p.M}, {"scale", to_json(p.scale())}, {"epsilon", to_json(p.eps)}}));
    const bool cover = (a0 + r) % b == 0 && (a_end + r) % b == 0 && a0 <= -p.M && -p.M < a0 + b &&
                       a_end >= n + p.M && a_end - b < n + p.M;
    c.obligations.push_back(structural(
        "window_cover", cover, {{"a0", a0}, {"a_end", a_end}, {"M", p.M}, {"N", n}, {"k", p.k}, {"residue", r}}));
    const Rational bound = make_rational(n + 2 * p.M + 2 * p.L_prime(), p.m);
    const Rational dim_bound = c.dim_bound ? *c.dim_bound : Rational(-1);
    c.obligations.push_back(structural(
        "fiber_dimension_bound", c.dim_bound && Rational(c.target_dim) <= dim_bound && dim_bound < bound,
        {{"target_dim", c.target_dim},
         {"dim_bound", to_json(dim_bound)},
         {"N", n},
         {"M", p.M},
         {"L_prime", p.L_prime()},
         {"m", p.m}}));
    return c;
}

EpsEmbeddingCertificate fiber_dimension_certificate(const FactorMapInstance& inst, const SamplePoint& base,
                                                    std::int64_t n)
{
    return fiber_dimension_certificate(inst, inst.pi(base), base, n);
}

Rational MdimRow::fiber_ratio_bound() const
{
    return make_rational(1, m) + make_rational(2 * M + 2 * L_prime, static_cast<std::int64_t>(m) * N);
}

std::int64_t uniform_fiber_dimension(const CounterexampleParams& p, std::int64_t n)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    const KuhnBucketMap km(static_cast<int>(p.block()), cube_grid_for(p.scale()), p.m);
    std::int64_t per_block = 0;
    for (int i = 1; i <= p.m; ++i)
        per_block = std::max(per_block, km.bucket_dim(i));
    const OdometerTower t(p.k);
    std::int64_t best = 0;
    for (std::int64_t r = 0; r < p.block(); ++r) {
        const std::int64_t blocks = (t.next(r, n + p.M) - t.previous(r, -p.M)) / p.block();
        best = std::max(best, blocks * per_block);
    }
    return best;
}

namespace {

MdimRow make_row(const CounterexampleParams& p, std::int64_t n, std::int64_t image_dim)
{
    MdimRow row;
    row.eps = p.eps;
    row.N = n;
    row.fiber_dim = uniform_fiber_dimension(p, n);
    row.image_dim = image_dim;
    row.m = p.m;
    row.M = p.M;
    row.L_prime = p.L_prime();
    row.delta = p.delta;
    return row;
}

}  // namespace

std::vector<MdimRow> mdim_report(const CounterexampleParams& base, const std::vector<Rational>& eps_list,
                                 const std::vector<std::int64_t>& n_list)
{
    if (eps_list.empty() || n_list.empty())
        throw PreconditionError("eps and N lists must be nonempty");
    std::vector<MdimRow> rows;
    for (const auto& eps : eps_list) {
        const auto p = CounterexampleParams::with_level(base.delta, eps, base.k, base.allow_density_violation,
                                                        base.seed);
        p.validate();
        for (auto n : n_list)
            rows.push_back(make_row(p, n, image_dimension(p, n)));
    }
    return rows;
}

std::vector<MdimRow> mdim_report_stacked(const Rational& delta, int j, const std::vector<std::int64_t>& n_list)
{
    if (j < 1 || n_list.empty())
        throw PreconditionError("stack depth and N list must be nonempty");
    std::vector<CounterexampleParams> ps;
    for (int i = 1; i <= j; ++i)
        ps.push_back(CounterexampleParams::derive(delta / pow2(i), make_rational(1, i)));
    std::vector<MdimRow> rows;
    for (const auto& p : ps)
        for (auto n : n_list) {
            std::int64_t image = 0;
            for (const auto& q : ps)
                image += image_dimension(q, n);
            rows.push_back(make_row(p, n, image));
        }
    return rows;
}

std::string mdim_csv(const std::vector<MdimRow>& rows)
{
    std::ostringstream out;
    out << "eps,N,fiber_dim_over_N,image_dim_over_N\n";
    for (const auto& r : rows)
        out << to_string(r.eps) << ',' << r.N << ',' << to_string(r.fiber_ratio()) << ','
            << to_string(r.image_ratio()) << '\n';
    return out.str();
}

namespace {

// Points of X = Y x [0,1]^Z on [lo, hi): symbols first, then the cube coordinates.
struct XLayout {
    std::int64_t lo = 0, hi = 0;
    std::size_t len() const { return static_cast<std::size_t>(hi - lo); }
};

Rational x_distance(const XLayout& l, const Point& a, const Point& b, std::int64_t n)
{
    const std::size_t len = l.len();
    const Word ya = symbols_of(a, 0, len), yb = symbols_of(b, 0, len);
    const Rational sym = rho_prime_N(l.lo, ya, yb, n).upper();
    const Rational cube = rho_N(Window{l.lo, slice(a, static_cast<std::int64_t>(len), static_cast<std::int64_t>(len))},
                                Window{l.lo, slice(b, static_cast<std::int64_t>(len), static_cast<std::int64_t>(len))},
                                n)
                              .upper();
    return std::max(sym, cube);
}

Point x_sample(const Sft& s, const XLayout& l, Rng& rng)
{
    Point x;
    for (int v : random_word(s, l.len(), rng))
        x.push_back(v);
    for (std::size_t i = 0; i < l.len(); ++i)
        x.push_back(rng.unit_rational(64));
    return x;
}

/// Second point agreeing with x on [keep_lo, keep_hi) (absolute coordinates).
Point x_partner(const Sft& s, const XLayout& l, const Point& x, std::int64_t keep_lo, std::int64_t keep_hi, Rng& rng)
{
    const std::size_t len = l.len();
    Word y = symbols_of(x, 0, len);
    const auto klo = static_cast<std::size_t>(keep_lo - l.lo), khi = static_cast<std::size_t>(keep_hi - l.lo);
    resample_outside(s, y, klo, khi, rng);
    Point out;
    for (int v : y)
        out.push_back(v);
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(i >= klo && i < khi ? x[len + i] : rng.unit_rational(64));
    return out;
}

MetricSpaceHandle x_space(const Sft& s, const XLayout& l, std::int64_t n, std::int64_t keep_lo, std::int64_t keep_hi)
{
    MetricSpaceHandle h;
    h.kind = "sbp_space";
    h.descriptor = {{"kind", "sbp_space"}, {"sft", to_json(s)}, {"N", n}, {"lo", l.lo}, {"hi", l.hi}};
    h.point_size = 2 * l.len();
    h.metric = [l, n](const Point& a, const Point& b) { return x_distance(l, a, b, n); };
    h.sampler = [s, l](Rng& rng) { return x_sample(s, l, rng); };
    h.pair_sampler = [s, l, keep_lo, keep_hi](Rng& rng) {
        Point x = x_sample(s, l, rng);
        Point y = x_partner(s, l, x, keep_lo, keep_hi, rng);
        return std::make_pair(std::move(x), std::move(y));
    };
    return h;
}

/// Sub-window [from, from + sub.len()) of a point on `l`, re-based on `sub`.
Point x_restrict(const XLayout& l, const Point& x, std::int64_t from, const XLayout& sub)
{
    const std::int64_t len = static_cast<std::int64_t>(l.len());
    const std::int64_t at = from - l.lo;
    Point out = slice(x, at, static_cast<std::int64_t>(sub.len()));
    Point cube = slice(x, len + at, static_cast<std::int64_t>(sub.len()));
    out.insert(out.end(), cube.begin(), cube.end());
    return out;
}

}  // namespace

EpsEmbeddingCertificate window_certificate(const Sft& base, std::int64_t n, const Rational& eps)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    const int m = window_margin(eps, 0);
    const XLayout l{-m - 2, n + m + 2};
    const std::int64_t w_lo = -m, w_hi = n + m;
    const auto width = static_cast<std::size_t>(w_hi - w_lo);
    EpsEmbeddingCertificate c;
    c.epsilon = eps;
    c.target_dim = static_cast<std::int64_t>(width);
    c.factor_dims = {c.target_dim};
    c.domain = x_space(base, l, n, w_lo, w_hi);
    c.evaluator = [l, w_lo, width](const Point& x) {
        const auto len = static_cast<std::int64_t>(l.len());
        const std::int64_t at = w_lo - l.lo;
        Point out = slice(x, at, static_cast<std::int64_t>(width));
        Point cube = slice(x, len + at, static_cast<std::int64_t>(width));
        out.insert(out.end(), cube.begin(), cube.end());
        return out;
    };
    c.target_metric = [](const Point& a, const Point& b) { return linf_distance(a, b); };
    c.target_size = 2 * width;
    const Rational t = pow2(2 - m);
    c.obligations.push_back(structural("window_tail_bound", t < eps / 2 && t < eps,
                                       {{"M", m}, {"scale", "0"}, {"epsilon", to_json(eps)}}));
    c.obligations.push_back(structural("window_embedding", c.target_dim == n + 2 * m,
                                       {{"M", m}, {"N", n}, {"target_dim", c.target_dim}}));
    return c;
}

SbpEmbeddingInstance sbp_instance_from_pieces(const Sft& base, const std::vector<CylinderSet>& pieces,
                                              const Rational& delta, const Rational& eps, std::int64_t n)
{
    if (delta <= 0 || eps <= 0)
        throw PreconditionError("delta and eps must be positive");
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            if (!intersect(base, pieces[i], pieces[j]).empty())
                throw PreconditionError("W_i not disjoint: pieces " + std::to_string(i + 1) + " and " +
                                            std::to_string(j + 1) + " intersect",
                                        {{"i", i + 1}, {"j", j + 1}});
    SbpEmbeddingInstance inst;
    inst.base = base;
    inst.pieces = pieces;
    inst.w = pieces;
    inst.complement = complement(base, union_of(base, pieces));
    inst.complement_ocap = ocap_limit(base, inst.complement);
    inst.delta = delta;
    inst.eps = eps;
    inst.M = window_margin(eps, 0);
    inst.N = n;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        inst.fiber_certs.push_back(window_certificate(base, n, eps));
    inst.global_cert = window_certificate(base, n, eps);
    return inst;
}

SbpEmbeddingInstance sbp_instance(const Sft& base, const std::vector<CylinderSet>& cover, const Rational& delta,
                                  const Rational& eps, std::int64_t n)
{
    const auto refined = sbp_cover_refine(base, cover, delta);
    auto inst = sbp_instance_from_pieces(base, refined.pieces, delta, eps, n);
    inst.cover = cover;
    return inst;
}

EpsEmbeddingCertificate wedge_cone_embedding(const SbpEmbeddingInstance& inst, std::int64_t n_iter)
{
    if (n_iter < 1)
        throw PreconditionError("n must be >= 1");
    if (!inst.global_cert)
        throw PreconditionError("global certificate g is missing");
    if (inst.fiber_certs.size() != inst.pieces.size() || inst.w.size() != inst.pieces.size())
        throw PreconditionError("one fiber certificate and one W_i per piece are required");
    const auto& s = inst.base;
    const auto& g = *inst.global_cert;
    auto check_eps = [&](const EpsEmbeddingCertificate& c) {
        if (c.epsilon != inst.eps)
            throw PreconditionError("mismatched epsilon (" + to_string(c.epsilon) + " vs " + to_string(inst.eps) + ")");
        if (c.domain.kind != "sbp_space")
            throw PreconditionError("fiber certificates must live on the product space");
    };
    check_eps(g);
    for (const auto& c : inst.fiber_certs)
        check_eps(c);
    for (std::size_t i = 0; i < inst.w.size(); ++i)
        for (std::size_t j = i + 1; j < inst.w.size(); ++j)
            if (!intersect(s, inst.w[i], inst.w[j]).empty())
                throw PreconditionError("W_i not disjoint", {{"i", i + 1}, {"j", j + 1}});

    const std::int64_t n = inst.N;
    auto layout_of = [](const EpsEmbeddingCertificate& c) {
        return XLayout{c.domain.descriptor.at("lo").get<std::int64_t>(), c.domain.descriptor.at("hi").get<std::int64_t>()};
    };
    // local window: every certificate window and every piece window
    XLayout local = layout_of(g);
    for (const auto& c : inst.fiber_certs) {
        local.lo = std::min(local.lo, layout_of(c).lo);
        local.hi = std::max(local.hi, layout_of(c).hi);
    }
    std::int64_t keep_lo = -inst.M, keep_hi = n + inst.M;
    for (const auto& e : inst.pieces)
        if (!e.empty() && e.len > 0) {
            local.lo = std::min(local.lo, e.lo);
            local.hi = std::max(local.hi, e.hi());
            keep_lo = std::min(keep_lo, e.lo);
            keep_hi = std::max(keep_hi, e.hi());
        }
    const XLayout whole{local.lo, (n_iter - 1) * n + local.hi};

    std::int64_t dim_fiber = 0;
    std::vector<std::int64_t> fiber_dims;
    std::size_t fiber_size = 0;
    for (const auto& c : inst.fiber_certs) {
        dim_fiber = std::max(dim_fiber, c.target_dim);
        fiber_dims.push_back(c.target_dim);
        fiber_size = std::max(fiber_size, c.target_size);
    }
    const std::int64_t dim_k = dim_fiber + 1;  // cone over the wedge
    const std::int64_t dim_l = g.target_dim + 1;
    const bool any_piece = std::any_of(inst.pieces.begin(), inst.pieces.end(), [](const auto& e) { return !e.empty(); });
    const std::int64_t visits = max_visits(s, inst.complement, n_iter * n);
    const std::int64_t target_dim = (any_piece ? n_iter * dim_k : 0) + std::min(n_iter, visits) * dim_l;
    const std::size_t part = 2 + fiber_size + 2 + g.target_size;

    EpsEmbeddingCertificate c;
    c.epsilon = inst.eps;
    c.target_dim = target_dim;
    c.factor_dims = {any_piece ? n_iter * dim_k : 0, std::min(n_iter, visits) * dim_l};
    c.domain = x_space(s, whole, n_iter * n, keep_lo, (n_iter - 1) * n + keep_hi);
    c.domain.kind = "wedge_cone";
    json desc = {{"kind", "wedge_cone"},
                 {"sft", to_json(s)},
                 {"pieces", sets_json(s, inst.pieces)},
                 {"w", sets_json(s, inst.w)},
                 {"delta", to_json(inst.delta)},
                 {"eps", to_json(inst.eps)},
                 {"N", n},
                 {"n", n_iter},
                 {"lo", whole.lo},
                 {"hi", whole.hi}};
    c.domain.descriptor = desc;
    c.target_size = static_cast<std::size_t>(n_iter) * part;
    c.target_metric = [](const Point& a, const Point& b) { return linf_distance(a, b); };

    std::vector<PointMap> fevals;
    std::vector<XLayout> flayouts;
    for (const auto& fc : inst.fiber_certs) {
        fevals.push_back(fc.evaluator);
        flayouts.push_back(layout_of(fc));
    }
    c.evaluator = [s, pieces = inst.pieces, fevals, flayouts, geval = g.evaluator, glayout = layout_of(g),
                   gsize = g.target_size, whole, fiber_size, n, n_iter](const Point& x) {
        Point out;
        const std::size_t len = whole.len();
        const Word y = symbols_of(x, 0, len);
        for (std::int64_t k = 0; k < n_iter; ++k) {
            const std::int64_t shift = k * n;
            int piece = -1;
            for (std::size_t i = 0; i < pieces.size() && piece < 0; ++i)
                if (pieces[i].contains(whole.lo - shift, y))
                    piece = static_cast<int>(i);
            // f' = rho f_i into the cone over K_i, apex when rho = 0
            if (piece >= 0) {
                const auto& fl = flayouts[static_cast<std::size_t>(piece)];
                Point v = fevals[static_cast<std::size_t>(piece)](x_restrict(whole, x, fl.lo + shift, fl));
                out.push_back(piece + 1);
                out.push_back(1);
                v.resize(fiber_size, Rational(0));
                out.insert(out.end(), v.begin(), v.end());
                out.push_back(0);
                out.push_back(0);
                out.insert(out.end(), gsize, Rational(0));
            } else {
                out.push_back(0);
                out.push_back(0);
                out.insert(out.end(), fiber_size, Rational(0));
                Point v = geval(x_restrict(whole, x, glayout.lo + shift, glayout));
                out.push_back(1);
                out.push_back(1);
                out.insert(out.end(), v.begin(), v.end());
            }
        }
        return out;
    };

    for (const auto& fc : inst.fiber_certs)
        for (const auto& r : fc.obligations)
            c.obligations.push_back(r);
    for (const auto& r : g.obligations)
        c.obligations.push_back(r);

    bool inside = true;
    for (std::size_t i = 0; i < inst.pieces.size(); ++i)
        inside = inside && subset(s, inst.pieces[i], inst.w[i]);
    c.obligations.push_back(structural("rho_dichotomy", inside,
                                       {{"sft", to_json(s)}, {"pieces", sets_json(s, inst.pieces)},
                                        {"w", sets_json(s, inst.w)}}));
    c.obligations.push_back(structural("w_disjoint", true, {{"sft", to_json(s)}, {"w", sets_json(s, inst.w)}}));

    const Rational ocap = inst.complement_ocap.value;
    const auto slack = static_cast<std::int64_t>(inst.complement_ocap.graph_size);
    const bool count_ok = Rational(visits) <= ocap * (n_iter * n) + slack && ocap < inst.delta;
    c.obligations.push_back(structural("orbit_count", count_ok,
                                       {{"sft", to_json(s)},
                                        {"pieces", sets_json(s, inst.pieces)},
                                        {"complement", to_json(s, inst.complement)},
                                        {"n", n_iter},
                                        {"N", n},
                                        {"count_bound", visits},
                                        {"ocap", to_json(ocap)},
                                        {"slack", slack},
                                        {"delta", to_json(inst.delta)}}));
    c.obligations.push_back(structural("cone_dimension", true,
                                       {{"fiber_dims", fiber_dims},
                                        {"global_dim", g.target_dim},
                                        {"dim_K_prime", dim_k},
                                        {"dim_L_prime", dim_l}}));
    const Rational density_bound = Rational(n_iter * dim_k) + inst.delta * (n_iter * n) * dim_l;
    c.obligations.push_back(structural("wedge_dimension", Rational(target_dim) < density_bound,
                                       {{"n", n_iter},
                                        {"N", n},
                                        {"dim_K_prime", dim_k},
                                        {"dim_L_prime", dim_l},
                                        {"count_bound", visits},
                                        {"any_piece", any_piece},
                                        {"degenerate", !any_piece},
                                        {"delta", to_json(inst.delta)},
                                        {"target_dim", target_dim}}));
    return c;
}

}  // namespace meandim
