#include "meandim/json_io.hpp"

#include <fstream>
#include <sstream>

#include "meandim/error.hpp"

namespace meandim {

nlohmann::json to_json(const SimplicialComplex& k)
{
    nlohmann::json j;
    j["vertices"] = k.vertices();
    j["maximal_simplices"] = k.maximal_simplices();
    bool plain = true;
    for (int v : k.vertices())
        plain = plain && k.label(v) == std::to_string(v);
    if (!plain)
        j["labels"] = k.labels();
    return j;
}

SimplicialComplex complex_from_json(const nlohmann::json& j)
{
    try {
        auto vertices = j.at("vertices").get<std::vector<int>>();
        auto simplices = j.at("maximal_simplices").get<std::vector<Simplex>>();
        std::vector<std::string> labels;
        if (j.contains("labels"))
            labels = j.at("labels").get<std::vector<std::string>>();
        return SimplicialComplex::from_simplices(std::move(vertices), simplices, std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed complex JSON: ") + e.what());
    }
}

nlohmann::json to_json(const GeometricComplex& g)
{
    nlohmann::json j = to_json(g.complex());
    nlohmann::json coords = nlohmann::json::object();
    for (int v : g.complex().vertices())
        coords[std::to_string(v)] = to_json(g.coords(v));
    j["coords"] = coords;
    j["norm"] = to_string(g.norm());
    return j;
}

GeometricComplex geometric_from_json(const nlohmann::json& j)
{
    SimplicialComplex k = complex_from_json(j);
    try {
        std::vector<Vec> coords;
        const auto& c = j.at("coords");
        for (int v : k.vertices()) {
            const auto key = std::to_string(v);
            if (!c.contains(key))
                throw PreconditionError("missing coordinates for vertex " + key);
            coords.push_back(vec_from_json(c.at(key)));
        }
        const Norm norm = parse_norm(j.value("norm", std::string("l_inf")));
        return GeometricComplex(std::move(k), std::move(coords), norm);
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed geometric complex JSON: ") + e.what());
    }
}

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw PreconditionError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw PreconditionError("cannot write " + path);
    out << text;
}

}  // namespace meandim
