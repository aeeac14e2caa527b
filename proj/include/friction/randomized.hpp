#ifndef FRICTION_RANDOMIZED_HPP
#define FRICTION_RANDOMIZED_HPP

#include "friction/market.hpp"
#include "friction/pricing.hpp"
#include "friction/recursion.hpp"

#include <optional>
#include <string>
#include <vector>

namespace friction {

/// Finite frictionless enlargement: at every non-polar node the price Ŝ
/// ranges over finitely many atoms, each strictly inside the reduced dual
/// cone and scaled so that the numeraire entry is 1.
struct EnlargedMarket {
    MarketSpec spec;
    PolarClassification polar;
    Rational epsilon{0};
    std::vector<std::vector<Vec>> atoms;  // per node, empty at polar nodes
    std::vector<std::optional<Vec>> center;

    const std::vector<Vec>& atoms_at(int node) const { return atoms[static_cast<std::size_t>(node)]; }
    int atom_count() const;
};

/// Atoms (1-eps) v + eps c for the section vertices v, the center c, and
/// c + r/eps for the section rays r, where c is an interior point of the
/// reduced dual cone. `extra` adds points per node; each must be strictly
/// interior. Throws std::invalid_argument when 0 < eps < 1 fails, when C is
/// not canonical, or when some reduced dual cone has empty interior.
EnlargedMarket build_enlarged_market(const MarketSpec& spec, const RecursionResult& recursion, const Rational& epsilon,
                                     const std::vector<std::vector<Vec>>& extra = {});

/// Claim values per node and atom; only leaves are read.
using AtomPayoff = std::vector<std::vector<Rational>>;

/// g(leaf, atom) = G(leaf) . atom.
AtomPayoff payoff_on_atoms(const EnlargedMarket& market);

enum class StrategyClass {
    Randomized,  // holdings may depend on the current atom
    Consistent,  // holdings depend on the node only; cash pays the worst atom
};

/// Frictionless superhedging price over every atom path, as one LP.
Extended frictionless_superhedge(const EnlargedMarket& market, const AtomPayoff& g, StrategyClass kind);

/// Backward induction: at each (node, atom), the largest expected continuation
/// value over one-step measures on (child, atom) pairs that make every
/// admissible holding a supermartingale. The root value is the maximum over
/// root atoms. -inf when some one-step set is empty.
Extended dp_value(const EnlargedMarket& market, const AtomPayoff& g);

/// Price systems whose normalized prices stay in the convex hull of the atoms
/// at every non-polar node; the LP dual of the consistent price.
DualResult atom_restricted_dual(const EnlargedMarket& market);

struct OneStepCheck {
    bool pass = true;
    int checked = 0;
    std::vector<std::string> failures;  // "node:atom"
};

/// No-arbitrage of every one-step frictionless market at (node, atom): no
/// admissible holding gains weakly against every point of the charged
/// children's reduced dual sections and strictly against one.
OneStepCheck one_step_na_check(const EnlargedMarket& market, const RecursionResult& recursion);

struct EpsilonRow {
    Rational epsilon;
    int atoms = 0;
    Extended dual, randomized, consistent, dp;
    std::optional<Rational> gap;  // price - randomized
    bool one_step_na = true;
};

struct EqualityReport {
    Extended price;  // superhedging price in K
    std::vector<EpsilonRow> rows;
    bool sandwich = true;            // dual <= randomized <= price
    bool classes_agree = true;       // randomized = consistent
    bool dp_agrees = true;           // dp = randomized
    bool gaps_nonincreasing = true;  // along the schedule order
    bool one_step_na = true;
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }
};

/// Runs the enlargement for each epsilon of the schedule. The normalized
/// prices of an atom-restricted dual optimum are added as atoms before the
/// frictionless prices are computed. Requires no strict arbitrage; throws
/// std::invalid_argument otherwise.
EqualityReport equality_check(const MarketSpec& spec, const std::vector<Rational>& schedule);

}  // namespace friction

#endif  // FRICTION_RANDOMIZED_HPP
