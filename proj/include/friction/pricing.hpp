#ifndef FRICTION_PRICING_HPP
#define FRICTION_PRICING_HPP

#include "friction/market.hpp"
#include "friction/recursion.hpp"

#include <optional>
#include <string>
#include <vector>

namespace friction {

enum class ConeChoice { K, KTilde };

/// Cones that carry transfers (primal) and price vectors (dual), per node.
/// At leaves both choices coincide with K and K*.
struct ConeSet {
    ConeChoice choice = ConeChoice::K;
    std::vector<PolyhedralCone> primal, dual;

    static ConeSet unreduced(const MarketSpec& spec);
    static ConeSet reduced(const RecursionResult& recursion);

    const PolyhedralCone& primal_at(int node) const { return primal[static_cast<std::size_t>(node)]; }
    const PolyhedralCone& dual_at(int node) const { return dual[static_cast<std::size_t>(node)]; }
};

struct HedgingStrategy {
    Rational y{0};
    std::vector<std::optional<Vec>> transfers;  // non-polar non-leaf nodes
    std::vector<std::optional<Vec>> positions;  // every non-polar node
    std::vector<Rational> alpha;                // static option holdings, 2e entries
};

struct PrimalResult {
    Extended value;
    std::optional<HedgingStrategy> strategy;
};

/// State-price vectors m(node) at non-polar nodes.
struct PriceSystem {
    std::vector<std::optional<Vec>> m;
};

struct DualResult {
    Extended value;
    std::optional<PriceSystem> prices;
};

/// Minimal superhedging capital: y e_num + eta_T + Phi alpha - G in K_T at
/// every non-polar leaf, with eta in C along the way.
PrimalResult primal_superhedge(const MarketSpec& spec, const ConeSet& cones, const SemiStaticSpec* options = nullptr);

/// Maximal sum_leaves G . m over price systems; option constraints
/// b_k <= sum_leaves phi_k . m <= a_k when options are given.
DualResult dual_scps(const MarketSpec& spec, const ConeSet& cones, const SemiStaticSpec* options = nullptr);

/// Static trade columns phi_j - p_j e_num at a leaf, with p = (a, -b).
std::vector<Vec> option_columns(const MarketSpec& spec, const SemiStaticSpec& options, int leaf);

/// Re-checks a strategy by exact membership. Empty string when valid.
std::string verify_superhedge(const MarketSpec& spec, const HedgingStrategy& strategy, const ConeSet& cones,
                              const SemiStaticSpec* options = nullptr);

struct RecoveredScps {
    std::vector<std::optional<Vec>> Z;       // m / m_num where m_num > 0
    std::vector<std::optional<Rational>> q;  // m_num at non-polar nodes
    Rational expectation{0};                 // E_Q[G . Z_T]
    std::vector<std::string> problems;       // empty when every invariant holds
};

/// Splits m into a probability q = m_num and normalized prices Z, and checks
/// the price system invariants against the given cones.
RecoveredScps recover_scps(const MarketSpec& spec, const PriceSystem& prices, const ConeSet& cones,
                           const SemiStaticSpec* options = nullptr);

struct SemiStaticVerdict {
    bool pass = true;
    ArbitrageVerdict dynamic;
    Rational static_gain{0};     // max sum(alpha) under the normalization, 0 when passing
    std::vector<Rational> alpha;
    std::optional<HedgingStrategy> witness;
};

/// No strict arbitrage for the dynamic market plus: eta_T + Phi alpha in K_T
/// at every non-polar leaf forces alpha = 0.
SemiStaticVerdict na_semistatic_check(const MarketSpec& spec, const SemiStaticSpec& options);

/// Largest s such that some price system has every generator weight >= s and
/// prices every option in [b + s, a - s]; s is capped at 1. A positive value
/// certifies a strictly consistent system pricing options inside the spread.
/// The margin may come out negative; it is empty only when no price system
/// exists even with the quotes relaxed.
std::optional<Rational> slater_margin(const MarketSpec& spec, const SemiStaticSpec& options);

struct PriceReport {
    ArbitrageVerdict arbitrage;
    std::optional<InteriorDiagnostic> interior;
    Extended primal_K, primal_K_tilde, dual_K, dual_K_tilde;
    std::optional<Rational> gap;
    std::optional<HedgingStrategy> strategy;
    std::optional<PriceSystem> prices;
    std::optional<RecoveredScps> scps;
    bool reduction_identity = true;
    bool duals_agree = true;
    std::string strategy_check;  // empty when the strategy verifies
    bool prices_verified = true;
    std::optional<SemiStaticVerdict> semistatic;
    std::optional<Extended> price_without_options;  // set when options are given
};

/// Full chain: arbitrage search, recursion, primal in K and K-tilde, dual in
/// K-tilde and K, certificates. Stops after the arbitrage search on FAIL.
PriceReport duality_report(const MarketSpec& spec, const SemiStaticSpec* options = nullptr);

}  // namespace friction

#endif  // FRICTION_PRICING_HPP
