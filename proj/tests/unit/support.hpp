#pragma once

#include "friction/cone.hpp"
#include "friction/rational.hpp"

#include <random>
#include <vector>

namespace testing_support {

using friction::Rational;
using friction::Vec;

inline Rational R(const char* s) { return friction::parse_rational(s); }

inline Vec V(std::initializer_list<const char*> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (auto x : xs) v[i++] = R(x);
    return v;
}

inline Rational random_rational(std::mt19937& rng, int num_range, int den_max)
{
    std::uniform_int_distribution<int> num(-num_range, num_range), den(1, den_max);
    return Rational(num(rng)) / Rational(den(rng));
}

inline Vec random_vector(std::mt19937& rng, Eigen::Index d, int num_range = 4, int den_max = 3)
{
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = random_rational(rng, num_range, den_max);
    return v;
}

inline Vec random_nonzero_vector(std::mt19937& rng, Eigen::Index d)
{
    for (;;) {
        Vec v = random_vector(rng, d);
        if (!friction::is_zero(v)) return v;
    }
}

/// Random cone given by 0..max_gens generators, occasionally a full line.
inline friction::PolyhedralCone random_cone(std::mt19937& rng, Eigen::Index d, int max_gens = 5)
{
    std::uniform_int_distribution<int> count(0, max_gens);
    std::vector<Vec> gens;
    int n = count(rng);
    for (int i = 0; i < n; ++i) gens.push_back(random_nonzero_vector(rng, d));
    if (!gens.empty() && rng() % 5 == 0) gens.push_back(-gens.front());
    return friction::PolyhedralCone::from_generators(d, std::move(gens));
}

}  // namespace testing_support
