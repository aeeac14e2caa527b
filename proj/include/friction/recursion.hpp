#ifndef FRICTION_RECURSION_HPP
#define FRICTION_RECURSION_HPP

#include "friction/cone.hpp"
#include "friction/market.hpp"

#include <optional>
#include <string>
#include <vector>

namespace friction {

/// Backward dual-cone recursion: at the leaves the reduced dual cone is K*,
/// above them K* intersected with (hull of charged children's reduced duals + C*).
struct RecursionResult {
    PolarClassification polar;
    std::vector<PolyhedralCone> dual_solvency;             // K* per node
    std::vector<PolyhedralCone> tilde_dual;                // reduced dual cone per node
    std::vector<PolyhedralCone> tilde_primal;              // its dual
    std::vector<std::optional<PolyhedralCone>> gamma_hull; // non-polar non-leaf nodes only
    std::vector<std::string> empty_interior_nodes;         // non-polar nodes, storage order

    const PolyhedralCone& tilde_dual_at(int node) const { return tilde_dual[static_cast<std::size_t>(node)]; }
    const PolyhedralCone& tilde_primal_at(int node) const { return tilde_primal[static_cast<std::size_t>(node)]; }
};

RecursionResult backward_dual_cones(const MarketSpec& spec);

/// Checks tilde_primal = K + (gamma_hull* intersect C) at every non-polar
/// non-leaf node, and tilde_primal = K at the leaves.
bool tilde_decomposition_check(const RecursionResult& result, const MarketSpec& spec);

struct InteriorDiagnostic {
    bool necessary_condition_holds = true;
    std::vector<std::string> flagged_nodes;
    std::string message;
};
InteriorDiagnostic interior_diagnostic(const RecursionResult& result);

/// A zero-cost position that is solvent at time t without being zero.
struct ArbitrageWitness {
    int time = 0;
    std::vector<std::optional<Vec>> transfers;  // k_s at non-polar nodes of time <= t
    std::vector<std::optional<Vec>> positions;  // resulting position at non-polar time-t nodes
    int nonzero_node = -1;
};

enum class ArbitrageSearch {
    Aggregated,  // one LP per time, weighted by interior points of K*
    Exhaustive,  // one LP per node, coordinate and sign
};

struct ArbitrageVerdict {
    bool pass = true;
    std::vector<bool> pass_at_time;
    std::optional<ArbitrageWitness> witness;
    int lps_solved = 0;
};

ArbitrageVerdict strict_arbitrage_search(const MarketSpec& spec, ArbitrageSearch mode = ArbitrageSearch::Aggregated);

/// Re-checks every witness invariant by direct cone membership. Returns an
/// empty string when valid, otherwise a description of the first failure.
std::string verify_arbitrage_witness(const MarketSpec& spec, const ArbitrageWitness& witness);

}  // namespace friction

#endif  // FRICTION_RECURSION_HPP
