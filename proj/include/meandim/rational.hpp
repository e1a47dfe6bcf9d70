#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace meandim {

/// Exact rational number. Always kept in canonical (reduced) form.
using Rational = mpq_class;

/// A point in R^n with exact coordinates.
using Vec = std::vector<Rational>;

/// Parses "p", "p/q" or "-p/q" (decimal integers only). Rejects "1.5", "1e3",
/// zero denominators and surrounding junk with PreconditionError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& r);

Rational make_rational(std::int64_t num, std::int64_t den = 1);

Rational abs(const Rational& r);
Rational floor_div(const Rational& r);  // floor as a rational with denominator 1
mpz_class floor_z(const Rational& r);
mpz_class ceil_z(const Rational& r);

/// 2^e for any integer e.
Rational pow2(std::int64_t e);

nlohmann::json to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json to_json(std::span<const Rational> v);
Vec vec_from_json(const nlohmann::json& j);

}  // namespace meandim
