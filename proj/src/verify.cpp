#include "meandim/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>

#include "meandim/error.hpp"
#include "meandim/gromov.hpp"
#include "meandim/hurewicz.hpp"
#include "meandim/json_io.hpp"

namespace meandim {

namespace {

Rational q(const json& j)
{
    return rational_from_json(j);
}

std::int64_t i64(const json& j)
{
    return j.get<std::int64_t>();
}

std::vector<CylinderSet> sets_from(const Sft& s, const json& j)
{
    std::vector<CylinderSet> out;
    for (const auto& c : j)
        out.push_back(cylinder_from_json(s, c));
    return out;
}

CylinderSet union_of(const Sft& s, const std::vector<CylinderSet>& sets)
{
    CylinderSet u = empty_set();
    for (const auto& c : sets)
        u = unite(s, u, c);
    return u;
}

bool pairwise_disjoint(const Sft& s, const std::vector<CylinderSet>& sets)
{
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            if (!intersect(s, sets[i], sets[j]).empty())
                return false;
    return true;
}

/// Mean number of visits to `a` along the periodic orbit of w.
std::optional<Rational> periodic_mean(const Sft& s, const CylinderSet& a, const Word& w)
{
    if (w.empty())
        return std::nullopt;
    const std::size_t p = w.size();
    for (std::size_t i = 0; i < p; ++i)
        if (!s.allowed(w[i], w[(i + 1) % p]))
            return std::nullopt;
    if (a.empty())
        return Rational(0);
    if (a.len == 0)
        return Rational(1);
    std::int64_t visits = 0;
    for (std::size_t j = 0; j < p; ++j) {
        Word window;
        for (std::int64_t i = a.lo; i < a.hi(); ++i) {
            const std::int64_t at = i + static_cast<std::int64_t>(j);
            const std::int64_t pp = static_cast<std::int64_t>(p);
            window.push_back(w[static_cast<std::size_t>(((at % pp) + pp) % pp)]);
        }
        if (a.words.count(window))
            ++visits;
    }
    return make_rational(visits, static_cast<std::int64_t>(p));
}

using Checker = std::function<bool(const json&)>;

const std::map<std::string, Checker>& checkers()
{
    static const std::map<std::string, Checker> table = {
        {"product_rule",
         [](const json& d) {
             std::int64_t sum = 0;
             for (const auto& v : d.at("factor_dims"))
                 sum += i64(v);
             return sum == i64(d.at("target_dim"));
         }},
        {"distance_nondecreasing",
         [](const json& d) {
             static const std::vector<std::string> known = {"identity", "isometric_slice", "coordinate_inclusion",
                                                            "window_projection"};
             const auto name = d.at("map").get<std::string>();
             if (name == "window_projection")
                 return i64(d.at("lo")) <= i64(d.at("a0")) && i64(d.at("a0")) < i64(d.at("a_end")) &&
                        i64(d.at("a_end")) <= i64(d.at("hi"));
             return std::find(known.begin(), known.end(), name) != known.end();
         }},
        {"chain_itinerary",
         [](const json& d) {
             const auto offsets = d.at("offsets").get<std::vector<std::int64_t>>();
             const auto lengths = d.at("lengths").get<std::vector<std::int64_t>>();
             const auto dims = d.at("dims").get<std::vector<std::int64_t>>();
             if (offsets.empty() || offsets.size() != lengths.size() || dims.size() != lengths.size())
                 return false;
             std::int64_t at = 0, sum = 0;
             for (std::size_t i = 0; i < offsets.size(); ++i) {
                 if (offsets[i] != at || lengths[i] < 1)
                     return false;
                 at += lengths[i];
                 sum += dims[i];
             }
             const std::int64_t n = i64(d.at("N"));
             return offsets.back() < n && n <= at && sum == i64(d.at("target_dim"));
         }},
        {"chain_dimension_bound",
         [](const json& d) {
             const Rational a = q(d.at("a"));
             const auto lengths = d.at("lengths").get<std::vector<std::int64_t>>();
             const auto dims = d.at("dims").get<std::vector<std::int64_t>>();
             if (dims.size() != lengths.size())
                 return false;
             std::int64_t sum = 0, longest = 0;
             for (std::size_t i = 0; i < dims.size(); ++i) {
                 if (!(Rational(dims[i]) < a * Rational(lengths[i])))
                     return false;
                 sum += dims[i];
                 longest = std::max(longest, lengths[i]);
             }
             const std::int64_t n_bar = i64(d.at("N_bar"));
             return sum == i64(d.at("target_dim")) && n_bar >= longest &&
                    Rational(sum) < a * Rational(i64(d.at("N")) + n_bar);
         }},
        {"declared_dimension", [](const json& d) { return i64(d.at("target_dim")) >= 0; }},
        {"star_mesh_below_eps",
         [](const json& d) {
             const Norm norm = parse_norm(d.at("norm").get<std::string>());
             const Rational measure = q(d.at("measure"));
             const Rational eps = q(d.at("epsilon"));
             if (measure < 0)
                 return false;
             if (norm == Norm::l_2)
                 return measure < eps * eps;
             return measure < eps && d.at("mesh").get<std::string>() == to_string(measure);
         }},
        {"fiber_in_star", [](const json& d) { return i64(d.at("bucket")) >= 1 && q(d.at("t_bucket")) > 0; }},
        {"bucket_dimension",
         [](const json& d) {
             const std::int64_t b = i64(d.at("bucket")), dim = i64(d.at("dim"));
             const std::int64_t src = i64(d.at("source_dim")), m = i64(d.at("m"));
             if (b < 1 || b > m || dim < 0)
                 return false;
             return b == 1 ? dim * m <= src : dim * m < src;
         }},
        {"subcomplex_dimension", [](const json& d) { return i64(d.at("dim")) >= 0 && i64(d.at("bucket")) >= 1; }},
        {"target_dim_bound", [](const json& d) { return Rational(i64(d.at("target_dim"))) <= q(d.at("bound")); }},
        {"empty_fiber", [](const json& d) { return d.contains("reason"); }},
        {"window_tail_bound",
         [](const json& d) {
             const std::int64_t m = i64(d.at("M"));
             if (m < 1)
                 return false;
             const Rational t = pow2(2 - m), s = q(d.at("scale")), eps = q(d.at("epsilon"));
             return s >= 0 && t < eps / 2 && (3 - t) * s + t < eps;
         }},
        {"window_cover",
         [](const json& d) {
             const std::int64_t a0 = i64(d.at("a0")), a1 = i64(d.at("a_end")), m = i64(d.at("M"));
             const std::int64_t n = i64(d.at("N")), r = i64(d.at("residue"));
             const std::int64_t k = i64(d.at("k"));
             if (k < 1 || k > 40)
                 return false;
             const std::int64_t b = std::int64_t{1} << k;
             auto mod = [b](std::int64_t x) { return ((x % b) + b) % b; };
             return r >= 0 && r < b && mod(a0 + r) == 0 && mod(a1 + r) == 0 && a0 <= -m && -m < a0 + b &&
                    a1 >= n + m && a1 - b < n + m;
         }},
        {"fiber_dimension_bound",
         [](const json& d) {
             const Rational bound =
                 make_rational(i64(d.at("N")) + 2 * i64(d.at("M")) + 2 * i64(d.at("L_prime")), i64(d.at("m")));
             const Rational dim_bound = q(d.at("dim_bound"));
             return Rational(i64(d.at("target_dim"))) <= dim_bound && dim_bound < bound;
         }},
        {"window_embedding",
         [](const json& d) { return i64(d.at("target_dim")) == i64(d.at("N")) + 2 * i64(d.at("M")); }},
        {"rho_dichotomy",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const auto pieces = sets_from(s, d.at("pieces"));
             const auto w = sets_from(s, d.at("w"));
             if (pieces.size() != w.size())
                 return false;
             for (std::size_t i = 0; i < pieces.size(); ++i)
                 if (!subset(s, pieces[i], w[i]))
                     return false;
             return true;
         }},
        {"w_disjoint",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             return pairwise_disjoint(s, sets_from(s, d.at("w")));
         }},
        {"orbit_count",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const auto pieces = sets_from(s, d.at("pieces"));
             const CylinderSet comp = cylinder_from_json(s, d.at("complement"));
             if (!same_set(s, comp, complement(s, union_of(s, pieces))))
                 return false;
             const std::int64_t steps = i64(d.at("n")) * i64(d.at("N"));
             const std::int64_t count = i64(d.at("count_bound"));
             const auto lim = ocap_limit(s, comp);
             const Rational ocap = q(d.at("ocap"));
             const std::int64_t slack = i64(d.at("slack"));
             return count == max_visits(s, comp, steps) && ocap == lim.value &&
                    slack == static_cast<std::int64_t>(lim.graph_size) && Rational(count) <= ocap * steps + slack &&
                    ocap < q(d.at("delta"));
         }},
        {"cone_dimension",
         [](const json& d) {
             std::int64_t fiber = 0;
             for (const auto& v : d.at("fiber_dims"))
                 fiber = std::max(fiber, i64(v));
             return i64(d.at("dim_K_prime")) == fiber + 1 && i64(d.at("dim_L_prime")) == i64(d.at("global_dim")) + 1;
         }},
        {"wedge_dimension",
         [](const json& d) {
             const std::int64_t n = i64(d.at("n")), nn = i64(d.at("N"));
             const std::int64_t dk = i64(d.at("dim_K_prime")), dl = i64(d.at("dim_L_prime"));
             const std::int64_t count = i64(d.at("count_bound"));
             const bool any = d.at("any_piece").get<bool>();
             const std::int64_t target = i64(d.at("target_dim"));
             return d.at("degenerate").get<bool>() == !any && target == (any ? n * dk : 0) + std::min(n, count) * dl &&
                    Rational(target) < Rational(n * dk) + q(d.at("delta")) * (n * nn) * dl;
         }},
        {"image_dimension",
         [](const json& d) {
             CounterexampleParams p;
             p.k = static_cast<int>(i64(d.at("k")));
             p.m = static_cast<int>(i64(d.at("m")));
             const std::int64_t n = i64(d.at("N"));
             if (p.k < 1 || p.k > 30 || p.m < 2 || n < 1)
                 return false;
             const std::int64_t image = i64(d.at("image_dim"));
             const std::int64_t blocks = (n + p.block() - 1) / p.block() + 1;
             const std::int64_t block_bound = blocks * (p.m - 1);
             const Rational density = q(d.at("delta")) * n / 2 + 2 * p.m;
             return image == image_dimension(p, n) && i64(d.at("block_bound")) == block_bound &&
                    q(d.at("density_bound")) == density && image <= block_bound && Rational(image) < density;
         }},
        {"ocap_limit",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const CylinderSet a = cylinder_from_json(s, d.at("set"));
             const auto lim = ocap_limit(s, a);
             Word w;
             for (const auto& l : d.at("witness"))
                 w.push_back(s.symbol(l.get<std::string>()));
             const auto mean = periodic_mean(s, a, w);
             const Rational value = q(d.at("value"));
             return value == lim.value && mean && *mean == value &&
                    i64(d.at("graph_size")) == static_cast<std::int64_t>(lim.graph_size);
         }},
        {"ocap_finite",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const CylinderSet a = cylinder_from_json(s, d.at("set"));
             const std::int64_t n = i64(d.at("N"));
             return q(d.at("value")) == ocap_finite_N(s, a, n) && i64(d.at("max_visits")) == max_visits(s, a, n);
         }},
        {"cover_refinement",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const auto cover = sets_from(s, d.at("cover"));
             const auto pieces = sets_from(s, d.at("pieces"));
             if (cover.size() != pieces.size() || !pairwise_disjoint(s, pieces))
                 return false;
             for (std::size_t i = 0; i < pieces.size(); ++i)
                 if (!subset(s, pieces[i], cover[i]))
                     return false;
             return same_set(s, union_of(s, pieces), union_of(s, cover)) &&
                    same_set(s, union_of(s, cover), whole_space());
         }},
        {"complement_ocap",
         [](const json& d) {
             const Sft s = sft_from_json(d.at("sft"));
             const auto pieces = sets_from(s, d.at("pieces"));
             const CylinderSet comp = cylinder_from_json(s, d.at("complement"));
             const Rational value = q(d.at("value"));
             return same_set(s, comp, complement(s, union_of(s, pieces))) && value == ocap_limit(s, comp).value &&
                    value < q(d.at("delta"));
         }},
        {"bucket_dimensions",
         [](const json& d) {
             const std::int64_t dim_k = i64(d.at("dim_k")), m = i64(d.at("m"));
             const auto dims = d.at("dims").get<std::vector<std::int64_t>>();
             if (m < 1 || static_cast<std::int64_t>(dims.size()) != m)
                 return false;
             for (std::int64_t i = 1; i <= m; ++i) {
                 const std::int64_t dim = dims[static_cast<std::size_t>(i - 1)];
                 if (dim > bucket_dimension_bound(dim_k, m, i))
                     return false;
                 if (dim >= 0 && !(i == 1 ? dim * m <= dim_k : dim * m < dim_k))
                     return false;
             }
             return true;
         }},
    };
    return table;
}

json obligations_json(const std::vector<DischargeRecord>& rs)
{
    json out = json::array();
    for (const auto& r : rs)
        out.push_back(r.to_json());
    return out;
}

std::int64_t subcomplex_dim(const SimplicialComplex& k, const std::vector<int>& block)
{
    if (block.empty())
        return -1;
    return full_subcomplex(k, block).dimension();
}

}  // namespace

std::optional<bool> check_structural(const DischargeRecord& r)
{
    const auto& table = checkers();
    const auto it = table.find(r.name);
    if (it == table.end())
        return std::nullopt;
    try {
        return it->second(r.data);
    } catch (const json::exception&) {
        return false;
    } catch (const PreconditionError&) {
        return false;
    }
}

json ocap_report(const Sft& s, const CylinderSet& a, std::optional<std::int64_t> n)
{
    json desc = {{"kind", "ocap"}, {"sft", to_json(s)}, {"set", to_json(s, a)}};
    std::vector<DischargeRecord> rs;
    json out = {{"type", "obligation_report"}};
    if (n) {
        desc["N"] = *n;
        const Rational v = ocap_finite_N(s, a, *n);
        const std::int64_t visits = max_visits(s, a, *n);
        out["value"] = to_json(v);
        rs.push_back(structural("ocap_finite", true,
                                {{"sft", to_json(s)}, {"set", to_json(s, a)}, {"N", *n}, {"value", to_json(v)},
                                 {"max_visits", visits}}));
    } else {
        const auto lim = ocap_limit(s, a);
        json witness = json::array();
        for (int x : lim.witness)
            witness.push_back(s.label(x));
        out["value"] = to_json(lim.value);
        out["witness"] = witness;
        rs.push_back(structural("ocap_limit", true,
                                {{"sft", to_json(s)},
                                 {"set", to_json(s, a)},
                                 {"value", to_json(lim.value)},
                                 {"witness", witness},
                                 {"graph_size", lim.graph_size}}));
    }
    out["descriptor"] = desc;
    out["obligations"] = obligations_json(rs);
    return out;
}

json sbp_report(const Sft& s, const std::vector<CylinderSet>& cover, const Rational& delta)
{
    const auto r = sbp_cover_refine(s, cover, delta);
    json cover_j = json::array(), pieces_j = json::array();
    for (const auto& v : cover)
        cover_j.push_back(to_json(s, v));
    for (const auto& e : r.pieces)
        pieces_j.push_back(to_json(s, e));
    json witness = json::array();
    for (int x : r.complement_ocap.witness)
        witness.push_back(s.label(x));
    std::vector<DischargeRecord> rs;
    rs.push_back(structural("cover_refinement", true, {{"sft", to_json(s)}, {"cover", cover_j}, {"pieces", pieces_j}}));
    rs.push_back(structural("complement_ocap", r.complement_ocap.value < delta,
                            {{"sft", to_json(s)},
                             {"pieces", pieces_j},
                             {"complement", to_json(s, r.complement)},
                             {"value", to_json(r.complement_ocap.value)},
                             {"delta", to_json(delta)}}));
    return {{"type", "obligation_report"},
            {"descriptor", {{"kind", "sbp"}, {"sft", to_json(s)}, {"cover", cover_j}, {"delta", to_json(delta)}}},
            {"pieces", pieces_j},
            {"complement", to_json(s, r.complement)},
            {"complement_ocap", to_json(r.complement_ocap.value)},
            {"complement_witness", witness},
            {"obligations", obligations_json(rs)}};
}

json bucket_report(const SimplicialComplex& k, int m)
{
    if (m < 1)
        throw PreconditionError("m must be >= 1");
    if (k.empty())
        throw PreconditionError("empty complex");
    const auto b = dimension_buckets(k, m);
    std::vector<std::int64_t> dims;
    for (const auto& block : b.partition.blocks)
        dims.push_back(subcomplex_dim(b.subdivision.complex, block));
    const int dim_k = k.dimension();
    std::vector<DischargeRecord> rs;
    const json data = {{"dim_k", dim_k}, {"m", m}, {"dims", dims}};
    rs.push_back(structural("bucket_dimensions", checkers().at("bucket_dimensions")(data), data));
    return {{"type", "obligation_report"},
            {"descriptor", {{"kind", "bucket_dimensions"}, {"complex", to_json(k)}, {"m", m}}},
            {"dim_k", dim_k},
            {"bucket_dims", dims},
            {"obligations", obligations_json(rs)}};
}

namespace {

void replay_sampled(EpsEmbeddingCertificate& c, const json& original)
{
    for (const auto& r : original.at("obligations")) {
        if (r.value("name", "") != "sampled_fiber_check" || r.value("kind", "") != "sampled")
            continue;
        const auto& d = r.at("data");
        std::optional<Rational> eta;
        if (d.contains("eta"))
            eta = q(d.at("eta"));
        attach_fiber_check(c, d.at("trials").get<std::size_t>(), d.at("seed").get<std::uint64_t>(), eta);
    }
}

/// Maps are deterministic in their parameters; sets often share one.
CubeWidthMap cached_cube_map(int n, int m, const Rational& scale, bool implicit)
{
    static std::mutex mutex;
    static std::map<std::string, CubeWidthMap> cache;
    const std::string key = std::to_string(n) + "/" + std::to_string(m) + "/" + to_string(scale) + "/" + (implicit ? "i" : "m");
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, cube_width_map(n, m, scale, implicit)).first;
    return it->second;
}

/// The certificate named by the artifact's domain descriptor, without sampled records.
std::optional<EpsEmbeddingCertificate> rebuild_base(const json& a)
{
    const json& desc = a.at("domain");
    const std::string kind = desc.value("kind", "");
    std::optional<EpsEmbeddingCertificate> c;
    if (kind == "gromov_cube_fiber") {
        const auto f = cached_cube_map(desc.at("n").get<int>(), desc.at("m").get<int>(), q(desc.at("scale")),
                                       desc.at("implicit").get<bool>());
        c = cube_fiber_certificate(f, vec_from_json(desc.at("p")));
    } else if (kind == "gromov_block_fiber") {
        const auto g = padded_block_map(desc.at("n").get<int>(), desc.at("m").get<int>(), q(desc.at("scale")));
        c = block_fiber_certificate(g, vec_from_json(desc.at("p")));
    } else if (kind == "counterexample_fiber") {
        const auto inst = build_counterexample(CounterexampleParams::from_json(desc));
        const std::int64_t n = i64(desc.at("N"));
        const auto s = inst.sample(n, desc.at("sample_seed").get<std::uint64_t>());
        c = fiber_dimension_certificate(inst, s, n);
    } else if (kind == "wedge_cone") {
        const Sft s = sft_from_json(desc.at("sft"));
        const auto inst = sbp_instance_from_pieces(s, sets_from(s, desc.at("pieces")), q(desc.at("delta")),
                                                   q(desc.at("eps")), i64(desc.at("N")));
        c = wedge_cone_embedding(inst, i64(desc.at("n")));
    } else {
        return std::nullopt;
    }
    return c;
}

std::optional<json> rebuild_certificate(const json& a)
{
    auto c = rebuild_base(a);
    if (!c)
        return std::nullopt;
    replay_sampled(*c, a);
    return c->to_json();
}

json without_sampled(json a)
{
    auto& obs = a.at("obligations");
    json kept = json::array();
    for (auto& r : obs)
        if (r.value("kind", "") != "sampled")
            kept.push_back(std::move(r));
    obs = std::move(kept);
    return a;
}

std::optional<json> rebuild_report(const json& a)
{
    const json& desc = a.at("descriptor");
    const std::string kind = desc.value("kind", "");
    if (kind == "counterexample_counts") {
        const auto p = CounterexampleParams::from_json(desc);
        const auto inst = build_counterexample(p);
        return nonzero_count_check(inst, desc.at("samples").get<std::size_t>(), i64(desc.at("N")),
                                   desc.at("sample_seed").get<std::uint64_t>())
            .to_json(p);
    }
    if (kind == "ocap") {
        const Sft s = sft_from_json(desc.at("sft"));
        std::optional<std::int64_t> n;
        if (desc.contains("N"))
            n = i64(desc.at("N"));
        return ocap_report(s, cylinder_from_json(s, desc.at("set")), n);
    }
    if (kind == "sbp") {
        const Sft s = sft_from_json(desc.at("sft"));
        return sbp_report(s, sets_from(s, desc.at("cover")), q(desc.at("delta")));
    }
    if (kind == "bucket_dimensions")
        return bucket_report(complex_from_json(desc.at("complex")), desc.at("m").get<int>());
    return std::nullopt;
}

/// Name of the first obligation whose serialized form differs.
std::string first_difference(const json& a, const json& b)
{
    const auto& oa = a.at("obligations");
    const auto& ob = b.at("obligations");
    for (std::size_t i = 0; i < std::max(oa.size(), ob.size()); ++i) {
        if (i >= oa.size())
            return ob[i].value("name", "?");
        if (i >= ob.size() || oa[i] != ob[i])
            return oa[i].value("name", "?");
    }
    for (const auto& [key, value] : a.items())
        if (!b.contains(key) || b.at(key) != value)
            return key;
    for (const auto& [key, value] : b.items())
        if (!a.contains(key))
            return key;
    return "";
}

VerifyResult fail(const std::string& obligation, const std::string& message, json detail = nullptr)
{
    return {static_cast<int>(ExitCode::obligation_failed), obligation, message, std::move(detail)};
}

VerifyResult verify_one(const json& a)
{
    const std::string type = a.value("type", "");
    if (type != "eps_embedding_certificate" && type != "obligation_report")
        throw PreconditionError("unknown artifact type \"" + type + "\"");
    if (!a.contains("obligations") || !a.at("obligations").is_array())
        throw PreconditionError("artifact has no obligations");

    for (const auto& j : a.at("obligations")) {
        const auto r = DischargeRecord::from_json(j);
        if (r.status == ObligationStatus::failed)
            return fail(r.name, "obligation recorded as failed", r.witness);
        if (r.kind == ObligationKind::structural) {
            const auto ok = check_structural(r);
            if (!ok)
                return fail(r.name, "no checker for structural obligation");
            if (!*ok)
                return fail(r.name, "structural obligation does not hold", r.data);
        }
    }
    if (type == "eps_embedding_certificate") {
        std::int64_t sum = 0;
        for (const auto& v : a.at("factor_dims"))
            sum += v.get<std::int64_t>();
        if (sum != a.at("target_dim").get<std::int64_t>())
            return fail("target_dim", "target_dim differs from the sum of factor dimensions");
    }

    std::optional<json> rebuilt;
    if (type == "eps_embedding_certificate") {
        auto base = rebuild_base(a);
        if (base) {
            // Exact fields first; sampled replays are the expensive part.
            const json exact = without_sampled(a);
            const json rebuilt_exact = base->to_json();
            if (rebuilt_exact != exact) {
                const auto name = first_difference(exact, rebuilt_exact);
                return fail(name, "artifact differs from its rebuild", {{"field", name}});
            }
            replay_sampled(*base, a);
            rebuilt = base->to_json();
        }
    } else {
        rebuilt = rebuild_report(a);
    }
    if (!rebuilt)
        return {0, "", "structural obligations re-discharged; artifact kind not rebuildable", nullptr};
    if (*rebuilt != a) {
        const auto name = first_difference(a, *rebuilt);
        return fail(name, "artifact differs from its rebuild", {{"field", name}});
    }
    return {0, "", "all obligations re-discharged", nullptr};
}

}  // namespace

std::optional<json> rebuild_artifact(const json& artifact)
{
    const std::string type = artifact.value("type", "");
    if (type == "eps_embedding_certificate")
        return rebuild_certificate(artifact);
    if (type == "obligation_report")
        return rebuild_report(artifact);
    return std::nullopt;
}

VerifyResult verify_artifact(const json& artifact)
{
    try {
        if (artifact.value("type", "") == "artifact_set") {
            const auto& items = artifact.at("artifacts");
            for (std::size_t i = 0; i < items.size(); ++i) {
                auto r = verify_one(items[i]);
                if (r.exit_code != 0) {
                    r.message = "artifact " + std::to_string(i) + ": " + r.message;
                    return r;
                }
            }
            return {0, "", "all artifacts verified", nullptr};
        }
        return verify_one(artifact);
    } catch (const Error& e) {
        return {static_cast<int>(e.code()), "", e.what(), e.witness()};
    } catch (const json::exception& e) {
        return {static_cast<int>(ExitCode::precondition), "", std::string("malformed artifact: ") + e.what(), nullptr};
    }
}

}  // namespace meandim
