#pragma once

#include <json.hpp>

#include "meandim/complex.hpp"
#include "meandim/geometry.hpp"

namespace meandim {

/// {"vertices":[...], "maximal_simplices":[[...],...]} with optional "labels".
nlohmann::json to_json(const SimplicialComplex& k);
SimplicialComplex complex_from_json(const nlohmann::json& j);

/// Complex JSON plus "coords" (vertex id -> list of "p/q") and "norm".
nlohmann::json to_json(const GeometricComplex& g);
GeometricComplex geometric_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace meandim
