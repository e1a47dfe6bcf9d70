#include "meandim/cli.hpp"

#include <cstdlib>
#include <sstream>

#include <CLI11.hpp>

#include "meandim/error.hpp"
#include "meandim/gromov.hpp"
#include "meandim/hurewicz.hpp"
#include "meandim/json_io.hpp"
#include "meandim/verify.hpp"

namespace meandim {

namespace {

struct Output {
    std::ostream& out;
    std::string path;

    void write(const std::string& text) const
    {
        if (path.empty())
            out << text;
        else
            write_text_file(path, text);
    }
    void write(const json& j) const { write(j.dump(2) + "\n"); }
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::int64_t parse_int(const std::string& s)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw PreconditionError("malformed integer \"" + s + "\"");
    }
    if (used != s.size())
        throw PreconditionError("malformed integer \"" + s + "\"");
    return v;
}

int status_code(bool ok)
{
    return ok ? 0 : static_cast<int>(ExitCode::obligation_failed);
}

std::vector<CylinderSet> read_cover(const Sft& s, const json& j)
{
    const json& list = j.is_object() ? j.at("cover") : j;
    std::vector<CylinderSet> out;
    for (const auto& v : list)
        out.push_back(cylinder_from_json(s, v));
    return out;
}

json first_failure(const EpsEmbeddingCertificate& c)
{
    for (const auto& r : c.obligations)
        if (!r.ok())
            return {{"obligation", r.name}, {"witness", r.witness}};
    return nullptr;
}

std::string summary(const EpsEmbeddingCertificate& c)
{
    std::ostringstream s;
    s << "target_dim=" << c.target_dim << " epsilon=" << to_string(c.epsilon);
    if (c.dim_bound)
        s << " dim_bound=" << to_string(*c.dim_bound);
    s << (c.all_discharged() ? " ok" : " FAILED");
    return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"meandim: width maps, eps-embedding certificates, orbit capacity"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (also MEANDIM_THREADS)");
    std::string witness_path;
    app.add_option("--witness", witness_path, "on a nonzero exit, write the failure witness JSON here");

    // complex
    auto* cx = app.add_subcommand("complex", "load, subdivide or bucket a simplicial complex");
    std::string cx_in, cx_out;
    int cx_simplex = -1, cx_subdivide = 0, cx_buckets = 0;
    cx->add_option("--in", cx_in, "complex JSON");
    cx->add_option("--simplex", cx_simplex, "use the standard d-simplex");
    cx->add_option("--subdivide", cx_subdivide, "barycentric subdivision rounds");
    cx->add_option("--buckets", cx_buckets, "report dim K'(A_i) for m dimension buckets");
    cx->add_option("--out", cx_out);

    // gromov
    auto* gr = app.add_subcommand("gromov", "width maps and their fiber certificates");
    gr->require_subcommand(1);
    auto* gb = gr->add_subcommand("build", "build a bucket map");
    int gb_cube = 0, gb_m = 0;
    std::string gb_eps, gb_complex, gb_out;
    bool gb_implicit = false;
    gb->add_option("--cube", gb_cube, "cube dimension n");
    gb->add_option("--complex", gb_complex, "geometric complex JSON");
    gb->add_option("--m", gb_m, "number of buckets")->required();
    gb->add_option("--eps", gb_eps, "scale p/q")->required();
    gb->add_flag("--implicit", gb_implicit, "closed-form Kuhn evaluation");
    gb->add_option("--out", gb_out);
    auto* gf = gr->add_subcommand("fiber-check", "certificates for sampled target points");
    std::string gf_map, gf_out;
    std::size_t gf_samples = 10, gf_trials = 1000;
    std::uint64_t gf_seed = 0, gf_den = 16;
    gf->add_option("map", gf_map, "map JSON from gromov build")->required();
    gf->add_option("--samples", gf_samples);
    gf->add_option("--trials", gf_trials, "sampled fiber pairs per certificate");
    gf->add_option("--seed", gf_seed);
    gf->add_option("--den", gf_den, "denominator of sampled coordinates");
    gf->add_option("--out", gf_out);

    // ocap
    auto* oc = app.add_subcommand("ocap", "orbit capacity of a cylinder set");
    std::string oc_sft, oc_set, oc_out;
    std::int64_t oc_n = 0;
    bool oc_limit = false;
    oc->add_option("--sft", oc_sft)->required();
    oc->add_option("--set", oc_set)->required();
    auto* oc_n_opt = oc->add_option("--N", oc_n, "finite horizon");
    auto* oc_limit_opt = oc->add_flag("--limit", oc_limit, "inf over N");
    oc_n_opt->excludes(oc_limit_opt);
    oc->add_option("--out", oc_out, "report JSON");

    // sbp
    auto* sb = app.add_subcommand("sbp", "refine a clopen cover into disjoint pieces");
    std::string sb_sft, sb_cover, sb_pieces, sb_delta, sb_eps = "1/2", sb_out;
    std::int64_t sb_n = 0, sb_iter = 1;
    std::size_t sb_trials = 0;
    std::uint64_t sb_seed = 0;
    sb->add_option("--sft", sb_sft)->required();
    sb->add_option("--cover", sb_cover, "cover V_1..V_m");
    sb->add_option("--pieces", sb_pieces, "disjoint pieces E_1..E_m (complement may be nonempty)");
    sb->add_option("--delta", sb_delta)->required();
    sb->add_option("--N", sb_n, "build the wedge-cone certificate at horizon N");
    sb->add_option("--n", sb_iter, "number of N-blocks");
    sb->add_option("--eps", sb_eps);
    sb->add_option("--trials", sb_trials, "sampled fiber pairs");
    sb->add_option("--seed", sb_seed);
    sb->add_option("--out", sb_out, "report or certificate JSON");

    // counterexample
    auto* ce = app.add_subcommand("counterexample", "finite-horizon counterexample factor map");
    ce->require_subcommand(1);
    std::string ce_delta, ce_eps = "1/2", ce_out, ce_n_list, ce_eps_list;
    int ce_k = 0, ce_stacked = 0;
    bool ce_allow = false;
    std::int64_t ce_n = 0;
    std::size_t ce_samples = 20, ce_trials = 0;
    std::uint64_t ce_seed = 0;
    auto common = [&](CLI::App* c, bool with_n) {
        c->add_option("--delta", ce_delta)->required();
        c->add_option("--eps", ce_eps);
        c->add_option("--k", ce_k, "odometer level (default: smallest valid)");
        c->add_flag("--allow-density-violation", ce_allow);
        c->add_option("--seed", ce_seed);
        c->add_option("--out", ce_out);
        if (with_n) {
            c->add_option("--N", ce_n)->required();
            c->add_option("--samples", ce_samples);
        }
    };
    auto* ce_build = ce->add_subcommand("build", "parameters and their inequalities");
    common(ce_build, false);
    auto* ce_counts = ce->add_subcommand("check-counts", "nonzero entries of f on [0, N)");
    common(ce_counts, true);
    auto* ce_fiber = ce->add_subcommand("fiber-cert", "fiber certificates for sampled y");
    common(ce_fiber, true);
    ce_fiber->add_option("--trials", ce_trials, "sampled fiber pairs per certificate");
    auto* ce_report = ce->add_subcommand("report", "CSV of certified ratios");
    common(ce_report, false);
    ce_report->add_option("--N-list", ce_n_list, "comma-separated horizons")->required();
    ce_report->add_option("--eps-list", ce_eps_list, "comma-separated scales (default --eps)");
    ce_report->add_option("--stacked", ce_stacked, "stack pi_1..pi_j instead");

    // verify
    auto* ve = app.add_subcommand("verify", "re-discharge the obligations of an artifact");
    std::string ve_file;
    ve->add_option("file", ve_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::precondition);
    }

    if (threads > 0)
        setenv("MEANDIM_THREADS", std::to_string(threads).c_str(), 1);

    json failure = nullptr;
    auto report = [&](const json& w) {
        err << "obligation failed: " << w.dump() << "\n";
        failure = w;
    };
    auto checked = [&](const VerifyResult& r) {
        if (r.exit_code != 0) {
            err << "obligation failed [" << r.obligation << "]: " << r.message << "\n";
            failure = {{"obligation", r.obligation}, {"message", r.message}, {"witness", r.detail}};
        }
        return r.exit_code;
    };
    auto dispatch = [&]() -> int {
        try {
            if (*cx) {
                if (cx_in.empty() == (cx_simplex < 0))
                    throw PreconditionError("give exactly one of --in and --simplex");
                SimplicialComplex k;
                if (cx_simplex >= 0) {
                    Simplex s;
                    for (int i = 0; i <= cx_simplex; ++i)
                        s.push_back(i);
                    k = SimplicialComplex::from_simplices(cx_simplex + 1, {s});
                } else {
                    k = complex_from_json(read_json_file(cx_in));
                }
                const Output o{out, cx_out};
                if (cx_buckets > 0) {
                    const json rep = bucket_report(k, cx_buckets);
                    o.write(rep);
                    return checked(verify_artifact(rep));
                }
                for (int i = 0; i < cx_subdivide; ++i)
                    k = barycentric_subdivide(k).complex;
                if (cx_subdivide > 0) {
                    o.write(to_json(k));
                } else {
                    o.write(json{{"vertices", k.vertex_count()},
                                 {"simplices", k.simplex_count()},
                                 {"dimension", k.dimension()}});
                }
                return 0;
            }

            if (*gb) {
                const Rational eps = parse_rational(gb_eps);
                json map;
                if (gb_cube > 0 && gb_complex.empty()) {
                    const auto f = cube_width_map(gb_cube, gb_m, eps, gb_implicit);
                    map = f.descriptor();
                    map["type"] = "gromov_map";
                } else if (gb_cube == 0 && !gb_complex.empty()) {
                    auto g = std::make_shared<const GeometricComplex>(geometric_from_json(read_json_file(gb_complex)));
                    const auto bw = bucket_width_map(g, gb_m, eps);
                    std::vector<std::int64_t> dims;
                    for (int i = 1; i <= gb_m; ++i)
                        dims.push_back(bw.map->bucket_dim(i));
                    map = {{"type", "gromov_map"},
                           {"kind", "complex_width_map"},
                           {"complex", to_json(*g)},
                           {"m", gb_m},
                           {"scale", to_json(eps)},
                           {"rounds", bw.refinement.rounds},
                           {"mesh", bw.map->mesh().str()},
                           {"bucket_dims", dims}};
                } else {
                    throw PreconditionError("give exactly one of --cube and --complex");
                }
                Output{out, gb_out}.write(map);
                return 0;
            }

            if (*gf) {
                const json map = read_json_file(gf_map);
                if (map.value("type", "") != "gromov_map")
                    throw PreconditionError(gf_map + " is not a gromov map");
                const int m = map.at("m").get<int>();
                const Rational scale = rational_from_json(map.at("scale"));
                std::function<EpsEmbeddingCertificate(Rng&)> make;
                std::optional<CubeWidthMap> cube;
                std::shared_ptr<const PartitionMap> pm;
                if (map.at("kind") == "cube_width_map") {
                    cube = cube_width_map(map.at("n").get<int>(), m, scale, map.at("implicit").get<bool>());
                    make = [&](Rng& rng) {
                        Vec p;
                        for (int i = 0; i + 1 < m; ++i)
                            p.push_back(rng.unit_rational(gf_den));
                        return cube_fiber_certificate(*cube, p);
                    };
                } else {
                    auto g = std::make_shared<const GeometricComplex>(geometric_from_json(map.at("complex")));
                    pm = bucket_width_map(g, m, scale).map;
                    make = [&](Rng& rng) {
                        std::vector<std::int64_t> w(static_cast<std::size_t>(m));
                        std::int64_t total = 0;
                        while (total == 0) {
                            total = 0;
                            for (auto& x : w) {
                                x = static_cast<std::int64_t>(rng.below(gf_den + 1));
                                total += x;
                            }
                        }
                        Vec t;
                        for (auto x : w)
                            t.push_back(make_rational(x, total));
                        return bucket_fiber_certificate(pm, t, scale,
                                                        {{"kind", "gromov_complex_fiber"}, {"m", m}, {"t", to_json(t)}});
                    };
                }
                json set = {{"type", "artifact_set"}, {"artifacts", json::array()}};
                bool ok = true;
                json witness = nullptr;
                for (std::size_t i = 0; i < gf_samples; ++i) {
                    Rng rng(derive_seed(gf_seed, i));
                    auto c = make(rng);
                    if (gf_trials > 0)
                        attach_fiber_check(c, gf_trials, derive_seed(gf_seed, i));
                    if (!c.all_discharged() && ok) {
                        ok = false;
                        witness = first_failure(c);
                    }
                    if (!gf_out.empty())
                        out << "sample " << i << ": " << summary(c) << "\n";
                    set["artifacts"].push_back(c.to_json());
                }
                Output{out, gf_out}.write(set);
                if (!ok)
                    report(witness);
                return status_code(ok);
            }

            if (*oc) {
                const Sft s = sft_from_json(read_json_file(oc_sft));
                const CylinderSet a = cylinder_from_json(s, read_json_file(oc_set));
                std::optional<std::int64_t> n;
                if (oc_n_opt->count() > 0)
                    n = oc_n;
                else if (!oc_limit)
                    throw PreconditionError("give --N k or --limit");
                const json rep = ocap_report(s, a, n);
                out << rep.at("value").get<std::string>() << "\n";
                if (!oc_out.empty())
                    write_text_file(oc_out, rep.dump(2) + "\n");
                return 0;
            }

            if (*sb) {
                const Sft s = sft_from_json(read_json_file(sb_sft));
                if (sb_cover.empty() == sb_pieces.empty())
                    throw PreconditionError("give exactly one of --cover and --pieces");
                const Rational delta = parse_rational(sb_delta);
                const Output o{out, sb_out};
                if (sb_n < 1) {
                    if (sb_cover.empty())
                        throw PreconditionError("the refinement report needs --cover");
                    const json rep = sbp_report(s, read_cover(s, read_json_file(sb_cover)), delta);
                    o.write(rep);
                    return checked(verify_artifact(rep));
                }
                const Rational eps = parse_rational(sb_eps);
                const auto inst = sb_cover.empty()
                                      ? sbp_instance_from_pieces(s, read_cover(s, read_json_file(sb_pieces)), delta, eps, sb_n)
                                      : sbp_instance(s, read_cover(s, read_json_file(sb_cover)), delta, eps, sb_n);
                auto c = wedge_cone_embedding(inst, sb_iter);
                if (sb_trials > 0)
                    attach_fiber_check(c, sb_trials, sb_seed);
                o.write(c.to_json());
                if (!c.all_discharged())
                    report(first_failure(c));
                return status_code(c.all_discharged());
            }

            if (*ce) {
                const Rational delta = parse_rational(ce_delta);
                const Rational eps = parse_rational(ce_eps);
                const auto params = ce_k > 0 ? CounterexampleParams::with_level(delta, eps, ce_k, ce_allow, ce_seed)
                                             : CounterexampleParams::derive(delta, eps, ce_seed);
                const Output o{out, ce_out};
                if (*ce_build) {
                    json ineq = json::array();
                    for (const auto& q : params.inequalities())
                        ineq.push_back({{"name", q.name}, {"holds", q.holds}, {"fatal", q.fatal}, {"data", q.data}});
                    json j = params.to_json();
                    j["type"] = "counterexample_params";
                    j["L"] = params.L();
                    j["L_prime"] = params.L_prime();
                    j["inequalities"] = ineq;
                    params.validate();
                    const auto inst = build_counterexample(params);
                    j["grid"] = inst.block.cube.grid;
                    j["f_at_zero"] = to_json(inst.block.eval(Vec(static_cast<std::size_t>(params.block()), Rational(0))));
                    o.write(j);
                    return 0;
                }
                if (*ce_counts) {
                    const auto inst = build_counterexample(params);
                    const auto rep = nonzero_count_check(inst, ce_samples, ce_n, ce_seed);
                    o.write(rep.to_json(params));
                    if (!rep.ok())
                        report(rep.witness);
                    return status_code(rep.ok());
                }
                if (*ce_fiber) {
                    const auto inst = build_counterexample(params);
                    json set = {{"type", "artifact_set"}, {"artifacts", json::array()}};
                    bool ok = true;
                    json witness = nullptr;
                    for (std::size_t i = 0; i < ce_samples; ++i) {
                        const auto s = inst.sample(ce_n, derive_seed(ce_seed, i));
                        auto c = fiber_dimension_certificate(inst, s, ce_n);
                        if (ce_trials > 0)
                            attach_fiber_check(c, ce_trials, derive_seed(ce_seed, i));
                        if (!c.all_discharged() && ok) {
                            ok = false;
                            witness = first_failure(c);
                        }
                        set["artifacts"].push_back(c.to_json());
                    }
                    o.write(set);
                    if (!ok)
                        report(witness);
                    return status_code(ok);
                }
                if (*ce_report) {
                    std::vector<std::int64_t> ns;
                    for (const auto& s : split(ce_n_list, ','))
                        ns.push_back(parse_int(s));
                    std::vector<MdimRow> rows;
                    if (ce_stacked > 0) {
                        rows = mdim_report_stacked(delta, ce_stacked, ns);
                    } else {
                        std::vector<Rational> es;
                        for (const auto& s : split(ce_eps_list.empty() ? ce_eps : ce_eps_list, ','))
                            es.push_back(parse_rational(s));
                        rows = mdim_report(params, es, ns);
                    }
                    o.write(mdim_csv(rows));
                    return 0;
                }
            }

            if (*ve) {
                const auto r = verify_artifact(read_json_file(ve_file));
                if (r.exit_code == 0) {
                    out << "ok: " << r.message << "\n";
                } else {
                    err << "verify failed";
                    if (!r.obligation.empty())
                        err << " [" << r.obligation << "]";
                    err << ": " << r.message << "\n";
                    if (!r.detail.is_null())
                        err << r.detail.dump() << "\n";
                    failure = {{"obligation", r.obligation}, {"message", r.message}, {"witness", r.detail}};
                }
                return r.exit_code;
            }
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            if (!e.witness().is_null() && !e.witness().empty())
                err << e.witness().dump() << "\n";
            failure = {{"message", e.what()}, {"witness", e.witness()}};
            return static_cast<int>(e.code());
        } catch (const json::exception& e) {
            err << "error: malformed JSON: " << e.what() << "\n";
            failure = {{"message", std::string("malformed JSON: ") + e.what()}};
            return static_cast<int>(ExitCode::precondition);
        }
        return 0;
    };

    const int code = dispatch();
    if (code != 0 && !witness_path.empty()) {
        json doc = failure.is_object() ? failure : json{{"witness", failure}};
        doc["exit_code"] = code;
        write_text_file(witness_path, doc.dump(2) + "\n");
    }
    return code;
}

}  // namespace meandim
