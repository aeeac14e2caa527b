#include "friction/market.hpp"
#include "friction/market_io.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace friction;
using nlohmann::json;
using testing_support::R;
using testing_support::V;

namespace {

std::string data(const char* name) { return std::string(FRICTION_TEST_DATA) + "/" + name; }

std::string error_of(const std::string& path)
{
    try {
        load_market(path);
    } catch (const MarketError& e) {
        return e.what();
    }
    return "";
}

Mat bidask(const char* p12, const char* p21)
{
    Mat pi(2, 2);
    pi << Rational(1), R(p12), R(p21), Rational(1);
    return pi;
}

// root -> {u, w} with the given kernels over (u, w).
json one_period(const std::vector<std::pair<const char*, const char*>>& kernels)
{
    json k = json::array();
    for (auto [pu, pw] : kernels) k.push_back({{{"child", "u"}, {"prob", pu}}, {{"child", "w"}, {"prob", pw}}});
    json spread = {{"bid_ask", json::array({json::array({"1", "2"}), json::array({"2", "1"})})}};
    return {{"dimension", 2},
            {"horizon", 1},
            {"nodes", {{{"id", "root"}, {"time", 0}, {"parent", nullptr}, {"kernels", k}},
                       {{"id", "u"}, {"time", 1}, {"parent", "root"}},
                       {{"id", "w"}, {"time", 1}, {"parent", "root"}}}},
            {"cones", {{"root", spread}, {"u", spread}, {"w", spread}}},
            {"payoff", {{"u", {"1", "0"}}, {"w", {"0", "1"}}}}};
}

}  // namespace

TEST_CASE("load instance A")
{
    auto spec = load_market(data("instance_a.market"));
    CHECK(spec.tree.size() == 3);
    CHECK(spec.dimension == 2);
    CHECK(spec.numeraire == 1);
    CHECK(spec.tree.node(spec.tree.root).kernels.size() == 2);
    for (int v = 0; v < 3; ++v) {
        CHECK(spec.K(v).synced());
        CHECK(spec.C(v).synced());
    }
    auto s = normalized_section(dual_cone(spec.K(spec.tree.index_of("u"))), 1);
    REQUIRE(s.vertices.size() == 2);
    CHECK(s.vertices[0][0] == R("3/2"));
    CHECK(s.vertices[1][0] == R("3"));
}

TEST_CASE("serialize then parse is the identity")
{
    for (const char* f : {"instance_a.market", "instance_b.market", "instance_c.market"}) {
        auto spec = load_market(data(f));
        auto again = parse_market(serialize_market(spec));
        REQUIRE(again.tree.size() == spec.tree.size());
        CHECK(serialize_market(again) == serialize_market(spec));
        for (int v = 0; v < spec.tree.size(); ++v) {
            CHECK(again.tree.id(v) == spec.tree.id(v));
            CHECK(again.tree.node(v).parent == spec.tree.node(v).parent);
            CHECK(again.tree.node(v).kernels == spec.tree.node(v).kernels);
            CHECK(same_set(again.K(v), spec.K(v)));
            CHECK(same_set(again.C(v), spec.C(v)));
            if (spec.tree.node(v).is_leaf()) CHECK(equal(again.G(v), spec.G(v)));
        }
    }
}

TEST_CASE("loader errors name the node and the invariant")
{
    CHECK(error_of(data("broken_kernel.market")) == "kernel not stochastic at node u");
    CHECK(error_of(data("broken_frictionless.market")) == "efficient friction violated at node root");
    CHECK(error_of(data("broken_decimal.market")).find("decimal literal rejected") != std::string::npos);
    CHECK(error_of(data("does_not_exist.market")).find("cannot open") != std::string::npos);
}

TEST_CASE("loader rejects structural problems")
{
    auto doc = one_period({{"1/2", "1/2"}});
    doc["nodes"][2]["time"] = 2;
    CHECK_THROWS_AS(parse_market(doc), MarketError);

    doc = one_period({{"1/2", "1/2"}});
    doc["payoff"].erase("w");
    CHECK_THROWS_WITH_AS(parse_market(doc), "payoff missing at node w in payoff", MarketError);

    doc = one_period({{"1/2", "1/2"}});
    doc["constraints"] = {{"root", {{"generators", json::array({json::array({"1", "0"}), json::array({"0", "1"}), json::array({"0", "-1"})})}}},
                          {"u", {{"generators", json::array({json::array({"0", "1"}), json::array({"0", "-1"})})}}}};
    CHECK_THROWS_WITH_AS(parse_market(doc), "constraint cone not nested on edge root -> u", MarketError);

    doc = one_period({{"1/2", "1/2"}});
    doc["constraints"] = {{"root", {{"generators", json::array({json::array({"1", "0"})})}}}};
    CHECK_THROWS_WITH_AS(parse_market(doc), "constraint cone misses the numeraire line at node root", MarketError);

    doc = one_period({{"1/2", "1/2"}});
    doc["cones"]["u"] = {{"generators", json::array({json::array({"1", "0"})})}};
    CHECK_THROWS_WITH_AS(parse_market(doc), "nonnegative positions not solvent at node u", MarketError);

    doc = one_period({{"1/2", "1/2"}});
    doc["nodes"][0]["kernels"][0][0]["prob"] = 1;
    CHECK_THROWS_AS(parse_market(doc), MarketError);
}

TEST_CASE("solvency cones from bid-ask matrices")
{
    auto frictionless = solvency_from_bidask(bidask("1", "1"));
    CHECK(same_set(frictionless, PolyhedralCone::from_halfspaces(2, {V({"1", "1"})})));
    CHECK(same_set(dual_cone(frictionless), PolyhedralCone::from_generators(2, {V({"1", "1"})})));
    CHECK_FALSE(has_nonempty_interior(dual_cone(frictionless)).nonempty);

    auto k = solvency_from_bidask(bidask("2", "2"));
    CHECK(same_set(dual_cone(k), PolyhedralCone::from_generators(2, {V({"1", "2"}), V({"2", "1"})})));
    auto s = normalized_section(dual_cone(k), 1);
    CHECK(s.vertices[0][0] == R("1/2"));
    CHECK(s.vertices[1][0] == R("2"));

    // pi12 = 3, pi21 = 2/3 under the generator recipe gives [1/3, 2/3]; the
    // transposed matrix gives [3/2, 3].
    auto t = normalized_section(dual_cone(solvency_from_bidask(bidask("3", "2/3"))), 1);
    CHECK(t.vertices[0][0] == R("1/3"));
    CHECK(t.vertices[1][0] == R("2/3"));
    auto u = normalized_section(dual_cone(solvency_from_bidask(bidask("2/3", "3"))), 1);
    CHECK(u.vertices[0][0] == R("3/2"));
    CHECK(u.vertices[1][0] == R("3"));

    CHECK_THROWS_AS(solvency_from_bidask(bidask("0", "1")), std::invalid_argument);
    Mat bad = bidask("2", "2");
    bad(0, 0) = 2;
    CHECK_THROWS_AS(solvency_from_bidask(bad), std::invalid_argument);
}

TEST_CASE("polar classification")
{
    auto a = parse_market(one_period({{"1", "0"}}));
    auto pa = polar_classification(a.tree);
    CHECK(pa.polar_nodes == std::vector<std::string>{"w"});
    CHECK_FALSE(pa.is_polar(a.tree.root));

    auto b = parse_market(one_period({{"1", "0"}, {"0", "1"}}));
    CHECK(polar_classification(b.tree).polar_nodes.empty());

    auto spread = json{{"bid_ask", json::array({json::array({"1", "2"}), json::array({"2", "1"})})}};
    json deep = {{"dimension", 2},
                 {"horizon", 2},
                 {"nodes", {{{"id", "r"}, {"time", 0}, {"parent", nullptr},
                             {"kernels", {{{{"child", "u"}, {"prob", "0"}}, {{"child", "w"}, {"prob", "1"}}}}}},
                            {{"id", "u"}, {"time", 1}, {"parent", "r"}, {"kernels", {{{{"child", "uu"}, {"prob", "1"}}}}}},
                            {{"id", "w"}, {"time", 1}, {"parent", "r"}, {"kernels", {{{{"child", "ww"}, {"prob", "1"}}}}}},
                            {{"id", "uu"}, {"time", 2}, {"parent", "u"}},
                            {{"id", "ww"}, {"time", 2}, {"parent", "w"}}}},
                 {"cones", {{"r", spread}, {"u", spread}, {"w", spread}, {"uu", spread}, {"ww", spread}}},
                 {"payoff", {{"uu", {"0", "0"}}, {"ww", {"0", "0"}}}}};
    auto c = parse_market(deep);
    CHECK(polar_classification(c.tree).polar_nodes == std::vector<std::string>{"u", "uu"});
}

TEST_CASE("polar classification is monotone in kernels")
{
    std::mt19937 rng(3);
    const char* probs[] = {"0", "1/3", "2/3", "1"};
    for (int trial = 0; trial < 50; ++trial) {
        int i = static_cast<int>(rng() % 4);
        auto base = parse_market(one_period({{probs[i], probs[3 - i]}}));
        int j = static_cast<int>(rng() % 4);
        auto more = parse_market(one_period({{probs[i], probs[3 - i]}, {probs[j], probs[3 - j]}}));
        auto pb = polar_classification(base.tree), pm = polar_classification(more.tree);
        for (int v = 0; v < base.tree.size(); ++v)
            if (!pb.is_polar(v)) CHECK_FALSE(pm.is_polar(v));
    }
}

TEST_CASE("quasi-sure support")
{
    auto spec = load_market(data("instance_a.market"));
    std::vector<PolyhedralCone> duals;
    for (const auto& k : spec.solvency) duals.push_back(dual_cone(k));
    auto hull = quasi_sure_support(spec.tree, spec.tree.root, duals);
    auto s = normalized_section(hull, 1);
    REQUIRE(s.vertices.size() == 2);
    CHECK(s.vertices[0][0] == R("1/4"));
    CHECK(s.vertices[1][0] == R("3"));

    auto one = parse_market(one_period({{"1", "0"}}));
    std::vector<PolyhedralCone> fam = {PolyhedralCone::orthant(2), PolyhedralCone::from_generators(2, {V({"1", "2"})}),
                                       PolyhedralCone::from_generators(2, {V({"5", "1"})})};
    CHECK(same_set(quasi_sure_support(one.tree, one.tree.root, fam), fam[1]));
    auto both = parse_market(one_period({{"1", "0"}, {"0", "1"}}));
    auto big = quasi_sure_support(both.tree, both.tree.root, fam);
    CHECK(is_subset(fam[1], big));
    CHECK(is_subset(fam[2], big));
    fam[2] = fam[1];
    CHECK(same_set(quasi_sure_support(both.tree, both.tree.root, fam), fam[1]));
    CHECK_THROWS(quasi_sure_support(both.tree, both.tree.index_of("u"), fam));
}

TEST_CASE("bar extension")
{
    auto doc = one_period({{"1/2", "1/2"}});
    auto spec = parse_market(doc, {.require_numeraire_line = false});
    for (auto& c : spec.constraint) c = convert(PolyhedralCone::from_generators(2, {V({"1", "0"})}));
    validate_market(spec, {.require_numeraire_line = false});
    auto ext = bar_extension(spec);
    CHECK(ext.dimension == 3);
    CHECK(ext.numeraire == 1);
    validate_market(ext, {.require_numeraire_line = false});
    auto expected = PolyhedralCone::from_generators(3, {V({"1", "0", "0"}), V({"0", "0", "1"}), V({"0", "0", "-1"})});
    CHECK(same_set(ext.C(0), expected));
    CHECK(same_set(ext.K(0), product(spec.K(0), PolyhedralCone::orthant(1))));
    CHECK(equal(ext.G(ext.tree.index_of("u")), V({"1", "0", "0"})));

    auto canonical = load_market(data("instance_a.market"));
    validate_market(bar_extension(canonical));
}

TEST_CASE("options section")
{
    auto doc = one_period({{"1/2", "1/2"}});
    auto spec = parse_market(doc);
    CHECK(parse_options(doc, spec).options.empty());
    doc["options"] = {{{"payoff", {{"u", {"1", "0"}}, {"w", {"0", "0"}}}}, {"bid", "1"}, {"ask", "2"}}};
    auto opts = parse_options(doc, spec);
    REQUIRE(opts.options.size() == 1);
    CHECK(opts.options[0].ask == 2);
    CHECK(serialize_options(spec, opts) == doc["options"]);
    doc["options"][0]["bid"] = "3";
    CHECK_THROWS_AS(parse_options(doc, spec), MarketError);
}
