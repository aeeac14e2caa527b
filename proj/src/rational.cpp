#include "friction/rational.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <regex>
#include <stdexcept>

namespace friction {

Rational parse_rational(std::string_view text)
{
    static const std::regex pattern(R"(^[+-]?[0-9]+(/[0-9]+)?$)");
    std::string s(text);
    if (!std::regex_match(s, pattern))
        throw std::invalid_argument("not an exact rational literal: \"" + s + "\"");
    if (s.front() == '+') s.erase(0, 1);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        auto den = s.substr(slash + 1);
        if (den.find_first_not_of('0') == std::string::npos)
            throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
    }
    Rational r;
    if (mpq_set_str(r.backend().data(), s.c_str(), 10) != 0)
        throw std::invalid_argument("not an exact rational literal: \"" + s + "\"");
    mpq_canonicalize(r.backend().data());
    return r;
}

std::string to_string(const Rational& value)
{
    return value.str();
}

std::string to_decimal_string(const Rational& value, int digits)
{
    using Decimal = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<60>>;
    Decimal num(Integer(numerator(value)).str());
    Decimal den(Integer(denominator(value)).str());
    Decimal q = num / den;
    return q.str(digits);
}

Vec parse_vector(const std::vector<std::string>& entries)
{
    Vec v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_rational(entries[i]);
    return v;
}

std::vector<std::string> to_strings(const Vec& v)
{
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v[i]));
    return out;
}

Vec primitive_direction(const Vec& v)
{
    if (is_zero(v)) return v;
    Integer lcm_den(1);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!is_zero(v[i])) lcm_den = boost::multiprecision::lcm(lcm_den, Integer(denominator(v[i])));
    Integer g(0);
    std::vector<Integer> ints(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Rational scaled = v[i] * Rational(lcm_den);
        ints[static_cast<std::size_t>(i)] = Integer(numerator(scaled));
        g = boost::multiprecision::gcd(g, ints[static_cast<std::size_t>(i)]);
    }
    g = abs(g);
    Vec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = Rational(ints[static_cast<std::size_t>(i)] / g);
    return out;
}

Vec primitive_line(const Vec& v)
{
    Vec p = primitive_direction(v);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (is_zero(p[i])) continue;
        if (sign(p[i]) < 0) p = -p;
        break;
    }
    return p;
}

Vec unit_vector(Eigen::Index dim, Eigen::Index i)
{
    Vec e = Vec::Zero(dim);
    e[i] = 1;
    return e;
}

std::strong_ordering lex_compare(const Vec& a, const Vec& b)
{
    for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
        int c = mpq_cmp(a[i].backend().data(), b[i].backend().data());
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
    }
    return a.size() <=> b.size();
}

bool equal(const Vec& a, const Vec& b)
{
    return a.size() == b.size() && lex_compare(a, b) == 0;
}

const Rational& Extended::value() const
{
    if (kind_ != Kind::Finite) throw std::logic_error("value() on an infinite extended rational");
    return value_;
}

bool operator==(const Extended& a, const Extended& b)
{
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Extended::Kind::Finite || a.value_ == b.value_;
}

std::partial_ordering operator<=>(const Extended& a, const Extended& b)
{
    auto rank = [](const Extended& e) {
        switch (e.kind_) {
        case Extended::Kind::MinusInfinity: return -1;
        case Extended::Kind::Finite: return 0;
        default: return 1;
        }
    };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra <=> rb;
    if (ra != 0) return std::partial_ordering::equivalent;
    int c = mpq_cmp(a.value_.backend().data(), b.value_.backend().data());
    return c <=> 0;
}

std::string to_string(const Extended& value)
{
    switch (value.kind()) {
    case Extended::Kind::PlusInfinity: return "inf";
    case Extended::Kind::MinusInfinity: return "-inf";
    default: return to_string(value.value());
    }
}

}  // namespace friction
