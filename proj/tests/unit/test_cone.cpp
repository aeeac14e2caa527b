#include "friction/cone.hpp"
#include "friction/linalg.hpp"
#include "friction/simplex.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace friction;
using testing_support::R;
using testing_support::V;

namespace {

PolyhedralCone gens(std::vector<Vec> g)
{
    Eigen::Index d = g.front().size();
    return PolyhedralCone::from_generators(d, std::move(g));
}

PolyhedralCone halfs(Eigen::Index d, std::vector<Vec> h)
{
    return PolyhedralCone::from_halfspaces(d, std::move(h));
}

// Membership in cone(G) decided by a feasibility LP on the coefficients,
// independent of the double-description code.
bool lp_member(const std::vector<Vec>& g, const Vec& x)
{
    LinearProgram<Rational> lp;
    int first = lp.add_variables(static_cast<int>(g.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        std::vector<LinearProgram<Rational>::Term> t;
        for (std::size_t k = 0; k < g.size(); ++k) t.emplace_back(first + static_cast<int>(k), g[k][i]);
        lp.add_constraint(t, Relation::Equal, x[i]);
    }
    lp.set_objective(Objective::Minimize, {});
    return lp.solve().status == LpStatus::Optimal;
}

bool same_list(const std::vector<Vec>& a, const std::vector<Vec>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equal(a[i], b[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("convert: orthant")
{
    auto c = convert(gens({V({"1", "0"}), V({"0", "1"})}), RepKind::Halfspaces);
    CHECK(same_list(c.halfspaces(), {V({"0", "1"}), V({"1", "0"})}));
}

TEST_CASE("convert: full space")
{
    auto c = convert(halfs(2, {}));
    CHECK(same_list(c.generators(), {V({"-1", "0"}), V({"0", "-1"}), V({"0", "1"}), V({"1", "0"})}));
    CHECK(c.lines().size() == 2);
    CHECK(c.halfspaces().empty());
}

TEST_CASE("convert: bid-ask solvency cone with spread 2")
{
    std::vector<Vec> g = {V({"2", "-1"}), V({"-1", "2"}), V({"1", "0"}), V({"0", "1"})};
    auto c = convert(gens(g), RepKind::Halfspaces);
    CHECK(same_list(c.halfspaces(), {V({"1", "2"}), V({"2", "1"})}));
    CHECK(same_list(c.generators(), {V({"-1", "2"}), V({"2", "-1"})}));
    // Angular grid oracle: H-rep membership agrees with LP membership.
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b) {
            Vec x(2);
            x << Rational(a), Rational(b);
            CHECK(contains(c, x) == lp_member(g, x));
        }
}

TEST_CASE("dual cone examples")
{
    auto orth = PolyhedralCone::orthant(2);
    CHECK(same_set(dual_cone(orth), orth));
    auto full = PolyhedralCone::full_space(2);
    auto d = dual_cone(full);
    CHECK(d.generators().empty());
    CHECK(same_set(d, PolyhedralCone::zero(2)));

    auto k = gens({V({"2", "-1"}), V({"-1", "2"}), V({"1", "0"}), V({"0", "1"})});
    auto ks = dual_cone(k);
    CHECK(same_list(ks.generators(), {V({"1", "2"}), V({"2", "1"})}));
    CHECK(contains(ks, V({"1", "1"})));
    CHECK_FALSE(contains(ks, V({"1", "3"})));
}

TEST_CASE("intersect examples")
{
    auto c = convert(gens({V({"1", "2"}), V({"2", "1"})}));
    CHECK(same_set(intersect(c, c), c));
    auto left = halfs(2, {V({"-1", "0"})});
    auto r = intersect(PolyhedralCone::orthant(2), left);
    CHECK(same_list(r.generators(), {V({"0", "1"})}));
    auto wide = gens({V({"1", "4"}), V({"4", "1"})});
    CHECK(same_set(intersect(c, wide), c));
}

TEST_CASE("minkowski sum examples")
{
    auto c = convert(gens({V({"1", "2"}), V({"2", "1"})}));
    CHECK(same_set(minkowski_sum(c, PolyhedralCone::zero(2)), c));
    CHECK(same_set(minkowski_sum(gens({V({"1", "0"})}), gens({V({"0", "1"})})), PolyhedralCone::orthant(2)));
    CHECK(same_set(minkowski_sum(gens({V({"1", "2"})}), gens({V({"2", "1"})})), c));
}

TEST_CASE("conic hull of union examples")
{
    auto c = gens({V({"1", "2"}), V({"2", "1"})});
    CHECK(same_set(conic_hull_of_union({c}), c));
    auto line = conic_hull_of_union({gens({V({"1", "0"})}), gens({V({"-1", "0"})})});
    CHECK(line.lines().size() == 1);
    CHECK(line.rays().empty());
    CHECK_THROWS(conic_hull_of_union({}));

    auto high = gens({V({"3", "2"}), V({"3", "1"})});   // section [3/2, 3]
    auto low = gens({V({"1", "4"}), V({"1", "2"})});    // section [1/4, 1/2]
    auto s = normalized_section(conic_hull_of_union({high, low}), 1);
    REQUIRE(s.vertices.size() == 2);
    CHECK(equal(s.vertices[0], V({"1/4", "1"})));
    CHECK(equal(s.vertices[1], V({"3", "1"})));
}

TEST_CASE("interior tests")
{
    auto o = has_nonempty_interior(PolyhedralCone::orthant(2));
    REQUIRE(o.nonempty);
    CHECK(equal(*o.witness, V({"1", "1"})));
    CHECK_FALSE(has_nonempty_interior(gens({V({"1", "1"})})).nonempty);
    auto c = gens({V({"1", "2"}), V({"2", "1"})});
    auto w = has_nonempty_interior(c);
    REQUIRE(w.nonempty);
    CHECK(equal(*w.witness, V({"1", "1"})));
    CHECK(interior_margin(c, *w.witness) > 0);
}

TEST_CASE("membership examples")
{
    auto c = gens({V({"1", "2"}), V({"2", "1"})});
    // H-rep computed by convert: 2x1 - x2 >= 0 and -x1 + 2x2 >= 0.
    CHECK(same_list(convert(c).halfspaces(), {V({"-1", "2"}), V({"2", "-1"})}));
    CHECK(contains(c, V({"0", "0"})));
    CHECK(contains(c, V({"1", "1"})));
    CHECK_FALSE(contains(PolyhedralCone::orthant(2), V({"-1", "0"})));
}

TEST_CASE("normalized sections")
{
    auto s = normalized_section(PolyhedralCone::orthant(2), 1);
    REQUIRE(s.vertices.size() == 1);
    CHECK(equal(s.vertices[0], V({"0", "1"})));
    REQUIRE(s.rays.size() == 1);
    CHECK(equal(s.rays[0], V({"1", "0"})));

    auto t = normalized_section(gens({V({"1", "2"}), V({"2", "1"})}), 1);
    REQUIRE(t.vertices.size() == 2);
    CHECK(equal(t.vertices[0], V({"1/2", "1"})));
    CHECK(equal(t.vertices[1], V({"2", "1"})));
    CHECK(t.rays.empty());

    CHECK(normalized_section(gens({V({"1", "0"})}), 1).empty());
    CHECK_THROWS(normalized_section(gens({V({"1", "-1"})}), 1));
}

TEST_CASE("subset examples")
{
    auto c = gens({V({"1", "2"}), V({"2", "1"})});
    CHECK(is_subset(c, c));
    CHECK(is_subset(c, PolyhedralCone::orthant(2)));
    CHECK_FALSE(is_subset(PolyhedralCone::orthant(2), c));
}

TEST_CASE("generators never contain the zero vector and dimensions are checked")
{
    auto c = gens({V({"0", "0"}), V({"1", "0"})});
    CHECK(c.generators().size() == 1);
    CHECK_THROWS_AS(PolyhedralCone::from_generators(2, {V({"1", "0", "0"})}), std::invalid_argument);
}

TEST_CASE("synced representations satisfy each other")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
        auto c = convert(testing_support::random_cone(rng, d));
        for (const auto& g : c.generators())
            for (const auto& n : c.halfspaces()) CHECK(sign(dot(g, n)) >= 0);
    }
}

TEST_CASE("properties on random cones")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
        auto a = convert(testing_support::random_cone(rng, d));
        auto b = convert(testing_support::random_cone(rng, d));
        CHECK(same_set(dual_cone(dual_cone(a)), a));
        CHECK(same_set(convert(PolyhedralCone::from_halfspaces(d, a.halfspaces())), a));
        CHECK(same_set(conic_hull_of_union({a, b}), minkowski_sum(a, b)));
        CHECK(same_set(dual_cone(minkowski_sum(a, b)), intersect(dual_cone(a), dual_cone(b))));
        bool full_rank = !a.generators().empty() && rank<Rational>(stack_rows(a.generators(), d)) == d;
        CHECK(has_nonempty_interior(a).nonempty == full_rank);
        for (int k = 0; k < 5; ++k) {
            Vec x = testing_support::random_vector(rng, d);
            CHECK(contains(a, x) == lp_member(a.generators(), x));
        }
    }
}
