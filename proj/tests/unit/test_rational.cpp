#include "friction/rational.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace friction;
using testing_support::V;

TEST_CASE("parse accepts integers and fractions in lowest terms")
{
    CHECK(to_string(parse_rational("-12/8")) == "-3/2");
    CHECK(to_string(parse_rational("+4/2")) == "2");
    CHECK(to_string(parse_rational("0/5")) == "0");
    CHECK(parse_rational("7") == Rational(7));
}

TEST_CASE("parse rejects decimals, exponents and zero denominators")
{
    CHECK_THROWS_AS(parse_rational("0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1e3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/-2"), std::invalid_argument);
}

TEST_CASE("decimal rendering has 20 significant digits")
{
    CHECK(to_decimal_string(parse_rational("7/3")) == "2.3333333333333333333");
    CHECK(to_decimal_string(parse_rational("-1/4")) == "-0.25");
    CHECK(to_decimal_string(Rational(2)) == "2");
}

TEST_CASE("primitive directions")
{
    CHECK(equal(primitive_direction(V({"1/2", "-3/4", "0"})), V({"2", "-3", "0"})));
    CHECK(equal(primitive_direction(V({"-6", "4"})), V({"-3", "2"})));
    CHECK(equal(primitive_line(V({"-6", "4"})), V({"3", "-2"})));
    CHECK(is_zero(primitive_direction(V({"0", "0"}))));
}

TEST_CASE("extended values order and print")
{
    Extended a(parse_rational("1/2")), inf = Extended::plus_infinity(), ninf = Extended::minus_infinity();
    CHECK(ninf < a);
    CHECK(a < inf);
    CHECK(inf == Extended::plus_infinity());
    CHECK(to_string(a) == "1/2");
    CHECK(to_string(inf) == "inf");
    CHECK(to_string(ninf) == "-inf");
    CHECK_THROWS(inf.value());
}
