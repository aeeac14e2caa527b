#pragma once

#include "friction/cone.hpp"
#include "friction/market.hpp"
#include "markets.hpp"

#include <algorithm>
#include <vector>

namespace testing_support {

using friction::Extended;
using friction::Rational;
using friction::Vec;

// Independent price of a one-period two-asset market without constraints.
// With k = (k1, k2) bought at time 0, k in K_0 forces k2 >= -s k1 for s in
// the root band, and the leaf condition reads y >= s (k1 + G1) + k2 + G2 for
// s at both ends of each charged leaf band. The price is the minimum over k1
// of a maximum of affine functions, attained at a crossing of two of them.
inline Extended one_period_oracle(const Band& root, const std::vector<Band>& leaves, const std::vector<Vec>& payoff,
                                  const std::vector<bool>& charged)
{
    std::vector<std::pair<Rational, Rational>> pieces;  // slope, intercept
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        if (!charged[l]) continue;
        for (const auto& s : {leaves[l].lo, leaves[l].hi})
            for (const auto& r : {root.lo, root.hi}) pieces.emplace_back(s - r, s * payoff[l][0] + payoff[l][1]);
    }
    bool up = false, down = false;
    for (const auto& [a, b] : pieces) {
        up = up || a >= 0;
        down = down || a <= 0;
    }
    if (!up || !down) return Extended::minus_infinity();
    auto f = [&](const Rational& x) {
        Rational best = pieces.front().first * x + pieces.front().second;
        for (const auto& [a, b] : pieces) best = std::max(best, a * x + b);
        return best;
    };
    Rational best = f(Rational(0));
    for (const auto& [a1, b1] : pieces)
        for (const auto& [a2, b2] : pieces)
            if (a1 != a2) best = std::min(best, f((b2 - b1) / (a1 - a2)));
    return best;
}

/// Second-kind arbitrage test for a one-period market without constraints:
/// some position is solvent at every charged leaf but not at the root, i.e.
/// when the intersection of the charged leaves' solvency cones escapes K at
/// the root.
inline bool na2_fails_one_period(const friction::MarketSpec& spec)
{
    const auto& tree = spec.tree;
    const auto polar = friction::polar_classification(tree);
    std::vector<friction::PolyhedralCone> charged;
    for (int c : tree.node(tree.root).children)
        if (!polar.is_polar(c)) charged.push_back(spec.K(c));
    friction::PolyhedralCone cap = charged.front();
    for (std::size_t i = 1; i < charged.size(); ++i) cap = friction::intersect(cap, charged[i]);
    return !friction::is_subset(cap, spec.K(tree.root));
}

}  // namespace testing_support
