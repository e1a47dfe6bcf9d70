#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "meandim/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "meandim");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = meandim::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("meandim_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    std::string write(const std::string& name, const json& j) const
    {
        std::ofstream(file(name)) << j.dump(2);
        return file(name);
    }
};

std::string slurp(const std::string& p)
{
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

json pairs(std::initializer_list<std::pair<const char*, const char*>> ps)
{
    json out = json::array();
    for (const auto& [a, b] : ps)
        out.push_back(json::array({a, b}));
    return out;
}

json golden() { return {{"alphabet", json::array({"0", "1"})}, {"allowed", pairs({{"0", "0"}, {"0", "1"}, {"1", "0"}})}}; }

json one_cylinder(const char* word)
{
    return {{"cylinders", json::array({json{{"offset", 0}, {"word", word}}})}};
}

}  // namespace

TEST_CASE("help and argument errors")
{
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"ocap", "--bogus"}).code == 2);
    CHECK(run({"complex", "--simplex", "2", "--unknown-key", "1"}).code == 2);
}

TEST_CASE("complex buckets")
{
    const auto r = run({"complex", "--simplex", "2", "--buckets", "2"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("bucket_dims") == json::array({1, 0}));

    TempDir t;
    const auto in = t.write("k.json", {{"vertices", json::array({0, 1, 2})},
                                        {"maximal_simplices", json::array({json::array({0, 1}), json::array({1, 2})})}});
    const auto s = run({"complex", "--in", in, "--subdivide", "1"});
    CHECK(s.code == 0);
    CHECK(json::parse(s.out).at("vertices").size() == 5);
    CHECK(run({"complex"}).code == 2);
}

TEST_CASE("ocap")
{
    TempDir t;
    const auto sft = t.write("golden.json", golden());
    const auto one = t.write("one.json", one_cylinder("1"));
    auto r = run({"ocap", "--sft", sft, "--set", one, "--limit"});
    CHECK(r.code == 0);
    CHECK(r.out == "1/2\n");
    r = run({"ocap", "--sft", sft, "--set", one, "--N", "2", "--out", t.file("rep.json")});
    CHECK(r.out == "1/2\n");
    CHECK(run({"verify", t.file("rep.json")}).code == 0);
    CHECK(run({"ocap", "--sft", sft, "--set", one}).code == 2);

    const auto bad = t.write("bad.json", {{"alphabet", json::array({"0", "1"})}, {"allowed", pairs({{"0", "1"}})}});
    const auto e = run({"ocap", "--sft", bad, "--set", one, "--limit"});
    CHECK(e.code == 2);
    CHECK(e.err.find("essential") != std::string::npos);
}

TEST_CASE("malformed rationals")
{
    const auto r = run({"gromov", "build", "--cube", "2", "--m", "2", "--eps", "1.5"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK(run({"counterexample", "build", "--delta", "1e3"}).code == 2);
}

TEST_CASE("gromov build, fiber-check and verify")
{
    TempDir t;
    CHECK(run({"gromov", "build", "--cube", "2", "--m", "2", "--eps", "1/2", "--out", t.file("map.json")}).code == 0);
    const auto r = run({"gromov", "fiber-check", t.file("map.json"), "--samples", "4", "--trials", "100", "--seed", "3",
                        "--out", t.file("fc.json")});
    CHECK(r.code == 0);
    const auto set = json::parse(slurp(t.file("fc.json")));
    REQUIRE(set.at("artifacts").size() == 4);
    for (const auto& a : set.at("artifacts"))
        CHECK(a.at("target_dim").get<int>() <= 1);
    CHECK(run({"verify", t.file("fc.json")}).code == 0);

    // Same seed, same bytes.
    CHECK(run({"gromov", "fiber-check", t.file("map.json"), "--samples", "4", "--trials", "100", "--seed", "3", "--out",
               t.file("fc2.json")})
              .code == 0);
    CHECK(slurp(t.file("fc.json")) == slurp(t.file("fc2.json")));

    // Tampered star mesh value.
    auto tampered = set;
    for (auto& o : tampered["artifacts"][0]["obligations"])
        if (o.at("name") == "star_mesh_below_eps")
            o["data"]["measure"] = "1/100";
    const auto v = run({"verify", t.write("tampered.json", tampered)});
    CHECK(v.code == 3);
    CHECK(v.err.find("star_mesh_below_eps") != std::string::npos);

    const auto w = run({"--witness", t.file("w.json"), "verify", t.file("tampered.json")});
    CHECK(w.code == 3);
    const auto doc = json::parse(slurp(t.file("w.json")));
    CHECK(doc.at("exit_code") == 3);
    CHECK(doc.at("obligation") == "star_mesh_below_eps");
    CHECK(doc.at("witness").at("measure") == "1/100");

    // Success leaves no witness file behind.
    CHECK(run({"--witness", t.file("none.json"), "verify", t.file("fc.json")}).code == 0);
    CHECK_FALSE(fs::exists(t.file("none.json")));
}

TEST_CASE("counterexample subcommands")
{
    TempDir t;
    const std::vector<std::string> base{"--delta", "1/2", "--k", "3", "--allow-density-violation"};
    auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), base.begin(), base.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };
    const auto b = run(with({"counterexample", "build"}, {}));
    CHECK(b.code == 0);
    const auto params = json::parse(b.out);
    CHECK(params.at("m") == 3);
    CHECK(params.at("M") == 5);
    for (const auto& x : params.at("f_at_zero"))
        CHECK(x == "0");
    CHECK(run({"counterexample", "build", "--delta", "1/2", "--k", "3"}).code == 2);

    CHECK(run(with({"counterexample", "check-counts"}, {"--N", "40", "--samples", "30", "--out", t.file("c.json")})).code == 0);
    CHECK(run({"verify", t.file("c.json")}).code == 0);
    auto counts = json::parse(slurp(t.file("c.json")));
    counts["max_count"] = counts["max_count"].get<int>() + 1;
    CHECK(run({"verify", t.write("c_bad.json", counts)}).code == 3);

    CHECK(run(with({"counterexample", "fiber-cert"}, {"--N", "16", "--samples", "2", "--trials", "50", "--out", t.file("f.json")}))
              .code == 0);
    CHECK(run({"verify", t.file("f.json")}).code == 0);

    const auto rep = run(with({"counterexample", "report"}, {"--N-list", "8,16"}));
    CHECK(rep.code == 0);
    CHECK(rep.out.rfind("eps,N,fiber_dim_over_N,image_dim_over_N\n", 0) == 0);
    CHECK(std::count(rep.out.begin(), rep.out.end(), '\n') == 3);
}

TEST_CASE("sbp refinement and wedge certificate")
{
    TempDir t;
    const auto sft = t.write("golden.json", golden());
    const auto cover = t.write("cover.json", json::array({one_cylinder("0"), one_cylinder("1")}));
    auto r = run({"sbp", "--sft", sft, "--cover", cover, "--delta", "1/10", "--out", t.file("sbp.json")});
    CHECK(r.code == 0);
    CHECK(run({"verify", t.file("sbp.json")}).code == 0);

    r = run({"sbp", "--sft", sft, "--cover", cover, "--delta", "1/10", "--N", "2", "--n", "4", "--eps", "1/2", "--trials",
             "50", "--out", t.file("w.json")});
    CHECK(r.code == 0);
    CHECK(json::parse(slurp(t.file("w.json"))).at("target_dim") == 52);
    CHECK(run({"verify", t.file("w.json")}).code == 0);

    const auto partial = t.write("partial.json", json::array({one_cylinder("0")}));
    const auto e = run({"sbp", "--sft", sft, "--cover", partial, "--delta", "1/10"});
    CHECK(e.code == 2);
    CHECK(e.err.find("not a cover") != std::string::npos);
}
