#include "meandim/rational.hpp"

#include <cctype>

#include "meandim/error.hpp"

namespace meandim {

namespace {

bool is_integer_literal(std::string_view s, bool allow_sign)
{
    if (s.empty())
        return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+'))
        i = 1;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!is_integer_literal(num, true) || !is_integer_literal(den, false))
        throw PreconditionError("malformed rational \"" + std::string(text) + "\" (expected p or p/q)");
    std::string n(num);
    if (!n.empty() && n[0] == '+')
        n.erase(0, 1);
    mpz_class p(n, 10), q(std::string(den), 10);
    if (q == 0)
        throw PreconditionError("malformed rational \"" + std::string(text) + "\" (zero denominator)");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r)
{
    return r.get_str(10);
}

Rational make_rational(std::int64_t num, std::int64_t den)
{
    Rational r{mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den))};
    r.canonicalize();
    return r;
}

Rational abs(const Rational& r)
{
    return r < 0 ? Rational(-r) : r;
}

mpz_class floor_z(const Rational& r)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

mpz_class ceil_z(const Rational& r)
{
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Rational floor_div(const Rational& r)
{
    return Rational(floor_z(r));
}

Rational pow2(std::int64_t e)
{
    mpz_class p = 1;
    const auto a = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), a);
    return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

nlohmann::json to_json(const Rational& r)
{
    return to_string(r);
}

Rational rational_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    if (j.is_number_integer())
        return make_rational(j.get<std::int64_t>());
    throw PreconditionError("expected a rational string \"p/q\", got " + j.dump());
}

nlohmann::json to_json(std::span<const Rational> v)
{
    auto arr = nlohmann::json::array();
    for (const auto& x : v)
        arr.push_back(to_string(x));
    return arr;
}

Vec vec_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw PreconditionError("expected an array of rationals, got " + j.dump());
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j)
        v.push_back(rational_from_json(x));
    return v;
}

}  // namespace meandim
