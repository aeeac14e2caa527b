#include "friction/generator.hpp"
#include "friction/market_io.hpp"
#include "friction/pricing.hpp"
#include "markets.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace friction;
using testing_support::Band;
using testing_support::one_period;
using testing_support::one_period_oracle;
using testing_support::R;
using testing_support::V;

namespace {

std::string data(const char* name) { return std::string(FRICTION_TEST_DATA) + "/" + name; }

Band random_band(Engine& rng)
{
    const std::vector<Rational> lows{R("1/4"), R("1/3"), R("1/2"), R("2/3"), R("1"), R("3/2"), R("2"), R("3")};
    const std::vector<Rational> widths{R("5/4"), R("3/2"), R("2"), R("3")};
    Rational lo = lows[rng() % lows.size()];
    return {lo, lo * widths[rng() % widths.size()]};
}

GeneratorOptions battery()
{
    GeneratorOptions o;
    o.max_nodes = 14;
    return o;
}

Rational finite(const Extended& e)
{
    REQUIRE(e.finite());
    return e.value();
}

}  // namespace

TEST_CASE("instance A prices at 2 in every formulation")
{
    auto spec = load_market(data("instance_a.market"));
    auto rec = backward_dual_cones(spec);
    auto plain = ConeSet::unreduced(spec);
    auto reduced = ConeSet::reduced(rec);
    auto oracle = one_period_oracle({R("1/2"), R("2")}, {{R("3/2"), R("3")}, {R("1/4"), R("1/2")}},
                                    {V({"1", "0"}), V({"0", "0"})}, {true, true});
    CHECK(oracle == Extended(R("2")));
    auto pk = primal_superhedge(spec, plain);
    CHECK(pk.value == oracle);
    CHECK(primal_superhedge(spec, reduced).value == oracle);
    CHECK(dual_scps(spec, plain).value == oracle);
    auto dk = dual_scps(spec, reduced);
    CHECK(dk.value == oracle);
    REQUIRE(pk.strategy);
    CHECK(verify_superhedge(spec, *pk.strategy, plain) == "");
    REQUIRE(dk.prices);
    auto scps = recover_scps(spec, *dk.prices, reduced);
    CHECK(scps.problems.empty());
    CHECK(scps.expectation == R("2"));
    // Z at the root lies in the root band.
    const Vec& z = *scps.Z[static_cast<std::size_t>(spec.tree.root)];
    CHECK(z[1] == 1);
    CHECK(z[0] >= R("1/2"));
    CHECK(z[0] <= R("2"));
}

TEST_CASE("one-period markets agree with the closed-form oracle")
{
    Engine rng(21);
    std::mt19937 values(21);
    for (int trial = 0; trial < 150; ++trial) {
        Band root = random_band(rng);
        int n = 1 + static_cast<int>(rng() % 3);
        std::vector<Band> leaves;
        std::vector<Vec> payoff;
        for (int i = 0; i < n; ++i) {
            leaves.push_back(random_band(rng));
            payoff.push_back(testing_support::random_vector(values, 2));
        }
        // Second kernel puts all mass on the last leaf; the first is uniform.
        std::vector<bool> charged(static_cast<std::size_t>(n), true);
        std::vector<std::vector<const char*>> kernels;
        if (n > 1 && rng() % 2) {
            std::vector<const char*> dirac(static_cast<std::size_t>(n), "0");
            dirac.back() = "1";
            kernels.push_back(dirac);
            std::fill(charged.begin(), charged.end() - 1, false);
        }
        auto spec = one_period(root, leaves, payoff, kernels);
        auto expected = one_period_oracle(root, leaves, payoff, charged);
        auto plain = ConeSet::unreduced(spec);
        auto primal = primal_superhedge(spec, plain);
        CHECK(primal.value == expected);
        auto dual = dual_scps(spec, plain);
        if (expected.finite()) {
            CHECK(dual.value == expected);
            CHECK(verify_superhedge(spec, *primal.strategy, plain) == "");
        } else {
            CHECK(dual.value == Extended::minus_infinity());
            CHECK_FALSE(strict_arbitrage_search(spec).pass);
        }
    }
}

TEST_CASE("trivial payoffs")
{
    auto spec = load_market(data("instance_c.market"));
    auto plain = ConeSet::unreduced(spec);
    for (int leaf : spec.tree.leaves()) spec.payoff[static_cast<std::size_t>(leaf)] = V({"0", "7/3"});
    auto cash = primal_superhedge(spec, plain);
    CHECK(cash.value == Extended(R("7/3")));
    for (const auto& k : cash.strategy->transfers)
        if (k) CHECK(is_zero(*k));
    CHECK(dual_scps(spec, plain).value == Extended(R("7/3")));

    for (int leaf : spec.tree.leaves()) spec.payoff[static_cast<std::size_t>(leaf)] = V({"-1", "-1"});
    CHECK(finite(primal_superhedge(spec, plain).value) <= 0);
    CHECK(finite(dual_scps(spec, plain).value) <= 0);

    for (int leaf : spec.tree.leaves()) spec.payoff[static_cast<std::size_t>(leaf)] = V({"0", "0"});
    HedgingStrategy zero;
    zero.transfers.assign(3, std::nullopt);
    zero.positions.assign(3, Vec(Vec::Zero(2)));
    CHECK(verify_superhedge(spec, zero, plain) == "");
    auto report = duality_report(spec);
    CHECK(report.primal_K == Extended(R("0")));
    CHECK(report.dual_K_tilde == Extended(R("0")));
}

TEST_CASE("tampered strategies are rejected")
{
    auto spec = load_market(data("instance_a.market"));
    auto plain = ConeSet::unreduced(spec);
    auto s = *primal_superhedge(spec, plain).strategy;
    const auto root = static_cast<std::size_t>(spec.tree.root);
    REQUIRE(s.transfers[root]);
    REQUIRE_FALSE(is_zero(*s.transfers[root]));
    auto bad = s;
    *bad.transfers[root] = -*bad.transfers[root];
    CHECK(verify_superhedge(spec, bad, plain) != "");
    bad = s;
    bad.y -= R("1/100");
    CHECK(verify_superhedge(spec, bad, plain).find("terminal position not solvent") == 0);
}

TEST_CASE("deterministic single branch")
{
    auto spec = one_period({R("1/2"), R("2")}, {{R("1"), R("3/2")}}, {V({"0", "5"})});
    auto plain = ConeSet::unreduced(spec);
    auto dual = dual_scps(spec, plain);
    CHECK(dual.value == Extended(R("5")));
    auto scps = recover_scps(spec, *dual.prices, plain);
    CHECK(scps.problems.empty());
    CHECK(*scps.q[1] == 1);
    CHECK(*scps.Z[0] == *dual.prices->m[0]);
}

TEST_CASE("instance C: second-kind arbitrage fails yet duality holds")
{
    auto spec = load_market(data("instance_c.market"));
    CHECK(testing_support::na2_fails_one_period(spec));
    CHECK_FALSE(testing_support::na2_fails_one_period(load_market(data("instance_a.market"))));
    auto oracle = one_period_oracle({R("1/2"), R("2")}, {{R("1"), R("3")}, {R("1"), R("3")}}, {V({"1", "0"}), V({"0", "1"})},
                                    {true, true});
    CHECK(oracle == Extended(R("2")));
    auto r = duality_report(spec);
    CHECK(r.arbitrage.pass);
    CHECK(r.primal_K == oracle);
    CHECK(r.gap == R("0"));
    CHECK(r.reduction_identity);
    CHECK(r.duals_agree);
    CHECK(r.strategy_check == "");
    CHECK(r.prices_verified);
}

TEST_CASE("instance B report stops at the arbitrage")
{
    auto r = duality_report(load_market(data("instance_b.market")));
    CHECK_FALSE(r.arbitrage.pass);
    CHECK(r.arbitrage.witness);
    CHECK_FALSE(r.gap);
    CHECK_FALSE(r.strategy);
}

TEST_CASE("random battery: zero gap, reduction identity, certificates")
{
    Engine rng(101);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto spec = random_market(rng, battery());
        auto r = duality_report(spec);
        if (!r.arbitrage.pass) continue;
        ++checked;
        CHECK(r.primal_K.finite());
        CHECK(r.gap == R("0"));
        CHECK(r.reduction_identity);
        CHECK(r.duals_agree);
        CHECK(r.strategy_check == "");
        CHECK(r.prices_verified);
    }
    CHECK(checked > 10);
}

TEST_CASE("price axioms")
{
    Engine rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        auto spec = random_market(rng, battery());
        if (!strict_arbitrage_search(spec).pass) continue;
        auto plain = ConeSet::unreduced(spec);
        auto price = [&](const std::vector<Vec>& g) {
            auto s = spec;
            s.payoff = g;
            return finite(primal_superhedge(s, plain).value);
        };
        const auto g1 = spec.payoff;
        const auto g2 = random_payoff(rng, spec);
        const Vec e = unit_vector(spec.dimension, spec.numeraire);
        const Rational c = R("5/3"), lambda = R("3/2");
        auto shifted = g1, scaled = g1, sum = g1, lower = g1;
        for (int leaf : spec.tree.leaves()) {
            const auto i = static_cast<std::size_t>(leaf);
            shifted[i] += c * e;
            scaled[i] *= lambda;
            sum[i] += g2[i];
            // Subtract a solvent position: G' - G in -K_T.
            const auto& gens = spec.K(leaf).generators();
            lower[i] -= gens[rng() % gens.size()];
        }
        const Rational p1 = price(g1);
        CHECK(price(shifted) == p1 + c);
        CHECK(price(scaled) == lambda * p1);
        CHECK(price(sum) <= p1 + price(g2));
        CHECK(price(lower) <= p1);
    }
}

TEST_CASE("extra disposable asset leaves prices unchanged")
{
    Engine rng(8);
    auto check = [](const MarketSpec& spec) {
        auto bar = bar_extension(spec);
        validate_market(bar, ValidationOptions{.require_numeraire_line = false});
        CHECK(primal_superhedge(bar, ConeSet::unreduced(bar)).value == primal_superhedge(spec, ConeSet::unreduced(spec)).value);
    };
    check(load_market(data("instance_a.market")));
    for (int trial = 0; trial < 10; ++trial) check(random_market(rng, battery()));
}

TEST_CASE("semi-static trading")
{
    auto spec = load_market(data("instance_a.market"));
    auto plain = ConeSet::unreduced(spec);
    SemiStaticSpec none;
    CHECK(primal_superhedge(spec, plain, &none).value == primal_superhedge(spec, plain).value);

    // Buying G itself at 3/2 superhedges.
    SemiStaticSpec exact;
    exact.options.push_back({spec.payoff, R("3/2"), R("3/2")});
    CHECK(finite(primal_superhedge(spec, plain, &exact).value) <= R("3/2"));

    // A quote strictly inside the dual range keeps a Slater point and zero gap.
    SemiStaticSpec quoted;
    std::vector<Vec> call(3);
    call[1] = V({"1", "-2"});
    call[2] = V({"0", "0"});
    quoted.options.push_back({call, R("-1/2"), R("1/2")});
    auto margin = slater_margin(spec, quoted);
    REQUIRE(margin);
    CHECK(*margin > 0);
    auto r = duality_report(spec, &quoted);
    CHECK(r.gap == R("0"));
    CHECK(r.strategy_check == "");
    CHECK(r.prices_verified);
    CHECK(r.primal_K <= *r.price_without_options);
    REQUIRE(r.semistatic);
    CHECK(r.semistatic->pass);

    // Cash for half its value is a free lunch.
    SemiStaticSpec cheap;
    std::vector<Vec> cash(3);
    cash[1] = cash[2] = V({"0", "1"});
    cheap.options.push_back({cash, R("1/4"), R("1/2")});
    auto verdict = na_semistatic_check(spec, cheap);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.dynamic.pass);
    CHECK(verdict.alpha[0] > 0);
    REQUIRE(verdict.witness);
    HedgingStrategy w = *verdict.witness;
    for (int leaf : spec.tree.leaves()) spec.payoff[static_cast<std::size_t>(leaf)] = Vec::Zero(2);
    CHECK(verify_superhedge(spec, w, plain, &cheap) == "");
    auto cheap_margin = slater_margin(spec, cheap);
    REQUIRE(cheap_margin);
    CHECK(*cheap_margin <= 0);
}

TEST_CASE("options never raise the price")
{
    Engine rng(55);
    for (int trial = 0; trial < 15; ++trial) {
        auto spec = random_market(rng, battery());
        if (!strict_arbitrage_search(spec).pass) continue;
        auto plain = ConeSet::unreduced(spec);
        SemiStaticSpec opts;
        Extended previous = primal_superhedge(spec, plain).value;
        for (int k = 0; k < 3; ++k) {
            opts.options.push_back({random_payoff(rng, spec), R("-1"), R("1")});
            auto p = primal_superhedge(spec, plain, &opts).value;
            CHECK(p <= previous);
            auto d = dual_scps(spec, plain, &opts).value;
            CHECK(p == d);
            previous = p;
        }
    }
}
