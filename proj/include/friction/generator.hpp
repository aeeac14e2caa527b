#ifndef FRICTION_GENERATOR_HPP
#define FRICTION_GENERATOR_HPP

#include "friction/market.hpp"

#include <cstdint>
#include <random>

namespace friction {

/// Engine used by every generator; the helpers below avoid the standard
/// distributions so that a seed yields the same instance on every platform.
using Engine = std::mt19937_64;

struct GeneratorOptions {
    int min_dimension = 2, max_dimension = 4;
    int min_horizon = 1, max_horizon = 3;
    int max_children = 3;
    int max_kernels = 3;
    int max_nodes = 40;
    bool constraints = true;
};

/// Bid-ask market around a multiplicative mid-price walk, with random
/// kernels (some entries zero), nested conic constraints that leave the
/// numeraire free, and small rational payoffs.
MarketSpec random_market(Engine& rng, const GeneratorOptions& options = {});

/// Unconstrained market in which one non-polar node sits strictly below the
/// bid of every child in asset 0, so its reduced dual cone loses interior.
MarketSpec random_empty_interior_market(Engine& rng, const GeneratorOptions& options = {});

/// Random payoff per leaf with entries num/den, |num| <= range, den <= den_max.
std::vector<Vec> random_payoff(Engine& rng, const MarketSpec& spec, int range = 3, int den_max = 2);

/// The bundled instance for a seed, as emitted by the CLI for input "@random".
MarketSpec seeded_market(std::uint64_t seed);

}  // namespace friction

#endif  // FRICTION_GENERATOR_HPP
