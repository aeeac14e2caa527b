#ifndef FRICTION_RATIONAL_HPP
#define FRICTION_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace friction {

/// Exact arbitrary-precision rational. Expression templates are disabled so
/// the type behaves as a plain value inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VectorX<Rational>;
using Mat = MatrixX<Rational>;

/// Parses "p/q", "p" or "-p/q". Decimal and exponent literals are rejected.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" for integers).
std::string to_string(const Rational& value);

/// Decimal rendering with `digits` significant digits, for human display only.
std::string to_decimal_string(const Rational& value, int digits = 20);

Vec parse_vector(const std::vector<std::string>& entries);
std::vector<std::string> to_strings(const Vec& v);

inline bool is_zero(const Rational& x) { return mpq_sgn(x.backend().data()) == 0; }
inline int sign(const Rational& x) { return mpq_sgn(x.backend().data()); }

inline bool is_zero(const Vec& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!is_zero(v[i])) return false;
    return true;
}

/// Eigen's dot() conjugates and accumulates through temporaries; for exact
/// scalars a plain loop is both clearer and faster.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dot(const Eigen::MatrixBase<DerivedA>& a,
                              const Eigen::MatrixBase<DerivedB>& b)
{
    typename DerivedA::Scalar acc(0);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!is_zero(a[i]) && !is_zero(b[i])) acc += a[i] * b[i];
    return acc;
}

/// Scales a nonzero vector to the primitive integer vector on the same ray
/// (cleared denominators, gcd of entries 1). The zero vector is returned as is.
Vec primitive_direction(const Vec& v);

/// Primitive direction with the first nonzero entry made positive; used for
/// lines, where the orientation carries no meaning.
Vec primitive_line(const Vec& v);

Vec unit_vector(Eigen::Index dim, Eigen::Index i);

/// Total lexicographic order on equal-length vectors.
std::strong_ordering lex_compare(const Vec& a, const Vec& b);
inline bool lex_less(const Vec& a, const Vec& b) { return lex_compare(a, b) < 0; }
bool equal(const Vec& a, const Vec& b);

/// Value on the extended real line; used wherever an optimization may be
/// infeasible (+inf for a minimization) or unbounded.
class Extended {
public:
    enum class Kind { Finite, PlusInfinity, MinusInfinity };

    Extended() = default;
    Extended(Rational v) : kind_(Kind::Finite), value_(std::move(v)) {}  // NOLINT(implicit)

    static Extended plus_infinity() { Extended e; e.kind_ = Kind::PlusInfinity; return e; }
    static Extended minus_infinity() { Extended e; e.kind_ = Kind::MinusInfinity; return e; }

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::Finite; }
    const Rational& value() const;

    friend bool operator==(const Extended& a, const Extended& b);
    friend std::partial_ordering operator<=>(const Extended& a, const Extended& b);

private:
    Kind kind_ = Kind::Finite;
    Rational value_{0};
};

/// "p/q", "inf" or "-inf".
std::string to_string(const Extended& value);

}  // namespace friction

#endif  // FRICTION_RATIONAL_HPP
