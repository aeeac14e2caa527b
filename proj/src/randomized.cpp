#include "friction/randomized.hpp"

#include "lp_support.hpp"

#include <algorithm>
#include <stdexcept>

namespace friction {

using detail::Affine;
using detail::Lp;
using detail::Term;

int EnlargedMarket::atom_count() const
{
    int n = 0;
    for (const auto& a : atoms) n += static_cast<int>(a.size());
    return n;
}

namespace {

std::vector<int> charged_children(const EnlargedMarket& m, int v)
{
    std::vector<int> out;
    for (int c : m.spec.tree.node(v).children)
        if (!m.polar.is_polar(c)) out.push_back(c);
    return out;
}

bool active_inner(const EnlargedMarket& m, int v)
{
    return !m.polar.is_polar(v) && !m.spec.tree.node(v).is_leaf();
}

Extended lp_value(const LpResult<Rational>& r, Objective sense)
{
    if (r.status == LpStatus::Optimal) return r.value;
    const bool low = (r.status == LpStatus::Infeasible) == (sense == Objective::Maximize);
    return low ? Extended::minus_infinity() : Extended::plus_infinity();
}

Affine free_vector(int first, Eigen::Index d)
{
    Affine a(d);
    for (Eigen::Index i = 0; i < d; ++i) a.coords[static_cast<std::size_t>(i)].emplace_back(first + static_cast<int>(i), Rational(1));
    return a;
}

const Rational& leaf_value(const AtomPayoff& g, int leaf, std::size_t k)
{
    return g[static_cast<std::size_t>(leaf)][k];
}

}  // namespace

EnlargedMarket build_enlarged_market(const MarketSpec& spec, const RecursionResult& recursion, const Rational& epsilon,
                                     const std::vector<std::vector<Vec>>& extra)
{
    if (!(Rational(0) < epsilon && epsilon < Rational(1))) throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (!constraints_canonical(spec)) throw std::invalid_argument("enlargement needs the numeraire line in every C");
    if (!recursion.empty_interior_nodes.empty())
        throw std::invalid_argument("reduced dual cone has empty interior at node " + recursion.empty_interior_nodes.front());

    const auto& tree = spec.tree;
    const auto n = static_cast<std::size_t>(tree.size());
    const Eigen::Index num = spec.numeraire;
    EnlargedMarket m;
    m.spec = spec;
    m.polar = recursion.polar;
    m.epsilon = epsilon;
    m.atoms.assign(n, {});
    m.center.assign(n, std::nullopt);
    for (int v = 0; v < tree.size(); ++v) {
        if (m.polar.is_polar(v)) continue;
        const auto& cone = recursion.tilde_dual_at(v);
        auto inner = has_nonempty_interior(cone);
        if (!inner.nonempty || !inner.witness)
            throw std::invalid_argument("reduced dual cone has empty interior at node " + tree.node(v).id);
        const Vec c = *inner.witness / (*inner.witness)[num];
        const auto section = normalized_section(cone, num);
        auto& atoms = m.atoms[static_cast<std::size_t>(v)];
        for (const auto& x : section.vertices) atoms.push_back((1 - epsilon) * x + epsilon * c);
        atoms.push_back(c);
        for (const auto& r : section.rays) atoms.push_back(c + r / epsilon);
        if (static_cast<std::size_t>(v) < extra.size())
            for (const auto& x : extra[static_cast<std::size_t>(v)]) {
                if (is_zero(x[num])) throw std::invalid_argument("extra atom with zero numeraire entry at node " + tree.node(v).id);
                atoms.push_back(x / x[num]);
            }
        for (const auto& a : atoms)
            if (sign(interior_margin(cone, a)) <= 0)
                throw std::invalid_argument("atom not strictly inside the reduced dual cone at node " + tree.node(v).id);
        std::sort(atoms.begin(), atoms.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
        atoms.erase(std::unique(atoms.begin(), atoms.end(), [](const Vec& a, const Vec& b) { return a == b; }), atoms.end());
        m.center[static_cast<std::size_t>(v)] = c;
    }
    return m;
}

AtomPayoff payoff_on_atoms(const EnlargedMarket& market)
{
    AtomPayoff g(market.atoms.size());
    for (int leaf : market.spec.tree.leaves())
        for (const auto& a : market.atoms_at(leaf)) g[static_cast<std::size_t>(leaf)].push_back(dot(market.spec.G(leaf), a));
    return g;
}

namespace {

// Value function V(v, atom) and holdings H(v, atom) at inner nodes. Each
// state dominates every continuation less the frictionless gain.
Extended randomized_lp(const EnlargedMarket& m, const AtomPayoff& g)
{
    const auto& tree = m.spec.tree;
    const Eigen::Index d = m.spec.dimension;
    Lp lp;
    const int y = lp.add_variable(false);
    std::vector<int> value(static_cast<std::size_t>(tree.size()), -1), holding(static_cast<std::size_t>(tree.size()), -1);
    for (int v = 0; v < tree.size(); ++v) {
        if (!active_inner(m, v)) continue;
        const int k = static_cast<int>(m.atoms_at(v).size());
        value[static_cast<std::size_t>(v)] = lp.add_variables(k, false);
        holding[static_cast<std::size_t>(v)] = lp.add_variables(k * static_cast<int>(d), false);
    }
    auto state = [&](int v, std::size_t k, std::vector<Term>& terms, Rational& constant, const Rational& coef) {
        if (tree.node(v).is_leaf()) constant += coef * leaf_value(g, v, k);
        else terms.emplace_back(value[static_cast<std::size_t>(v)] + static_cast<int>(k), coef);
    };
    const int root = tree.root;
    for (std::size_t k = 0; k < m.atoms_at(root).size(); ++k) {
        std::vector<Term> terms{{y, Rational(1)}};
        Rational constant(0);
        state(root, k, terms, constant, Rational(-1));
        lp.add_constraint(std::move(terms), Relation::GreaterEqual, -constant);
    }
    for (int v = 0; v < tree.size(); ++v) {
        if (!active_inner(m, v)) continue;
        const auto& atoms = m.atoms_at(v);
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            const int h = holding[static_cast<std::size_t>(v)] + static_cast<int>(k * static_cast<std::size_t>(d));
            detail::require_in_cone(lp, free_vector(h, d), m.spec.C(v));
            for (int c : charged_children(m, v))
                for (std::size_t j = 0; j < m.atoms_at(c).size(); ++j) {
                    std::vector<Term> terms{{value[static_cast<std::size_t>(v)] + static_cast<int>(k), Rational(1)}};
                    const Vec step = m.atoms_at(c)[j] - atoms[k];
                    for (Eigen::Index i = 0; i < d; ++i)
                        if (!is_zero(step[i])) terms.emplace_back(h + static_cast<int>(i), step[i]);
                    Rational constant(0);
                    state(c, j, terms, constant, Rational(-1));
                    lp.add_constraint(std::move(terms), Relation::GreaterEqual, -constant);
                }
        }
    }
    lp.set_objective(Objective::Minimize, {{y, Rational(1)}});
    return lp_value(lp.solve(), Objective::Minimize);
}

// Holdings H(v) per node and the worst-case cash u(v) <= -(H(v) - H(parent)).atom
// released by the rebalancing at v. Gains telescope to
// H_T.S_T - sum_t (H_{t+1} - H_t).S_t, so each leaf atom must satisfy
// y + sum_ancestors u + H(parent).atom >= g.
Extended consistent_lp(const EnlargedMarket& m, const AtomPayoff& g)
{
    const auto& tree = m.spec.tree;
    const Eigen::Index d = m.spec.dimension;
    Lp lp;
    const int y = lp.add_variable(false);
    std::vector<int> holding(static_cast<std::size_t>(tree.size()), -1), cash(static_cast<std::size_t>(tree.size()), -1);
    for (int v = 0; v < tree.size(); ++v) {
        if (!active_inner(m, v)) continue;
        holding[static_cast<std::size_t>(v)] = lp.add_variables(static_cast<int>(d), false);
        cash[static_cast<std::size_t>(v)] = lp.add_variable(false);
        detail::require_in_cone(lp, free_vector(holding[static_cast<std::size_t>(v)], d), m.spec.C(v));
    }
    auto add_dot = [&](std::vector<Term>& terms, int v, const Vec& a, const Rational& coef) {
        for (Eigen::Index i = 0; i < d; ++i)
            if (!is_zero(a[i])) terms.emplace_back(holding[static_cast<std::size_t>(v)] + static_cast<int>(i), coef * a[i]);
    };
    for (int v = 0; v < tree.size(); ++v) {
        if (!active_inner(m, v)) continue;
        const int p = tree.node(v).parent;
        for (const auto& a : m.atoms_at(v)) {
            std::vector<Term> terms{{cash[static_cast<std::size_t>(v)], Rational(1)}};
            add_dot(terms, v, a, Rational(1));
            if (p >= 0) add_dot(terms, p, a, Rational(-1));
            lp.add_constraint(Affine::merge(std::move(terms)), Relation::LessEqual, Rational(0));
        }
    }
    for (int leaf : tree.leaves()) {
        if (m.polar.is_polar(leaf)) continue;
        const int p = tree.node(leaf).parent;
        std::vector<Term> base{{y, Rational(1)}};
        for (int u = p; u >= 0; u = tree.node(u).parent) base.emplace_back(cash[static_cast<std::size_t>(u)], Rational(1));
        const auto& atoms = m.atoms_at(leaf);
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            auto terms = base;
            if (p >= 0) add_dot(terms, p, atoms[k], Rational(1));
            lp.add_constraint(Affine::merge(std::move(terms)), Relation::GreaterEqual, leaf_value(g, leaf, k));
        }
    }
    lp.set_objective(Objective::Minimize, {{y, Rational(1)}});
    return lp_value(lp.solve(), Objective::Minimize);
}

}  // namespace

Extended frictionless_superhedge(const EnlargedMarket& market, const AtomPayoff& g, StrategyClass kind)
{
    return kind == StrategyClass::Randomized ? randomized_lp(market, g) : consistent_lp(market, g);
}

Extended dp_value(const EnlargedMarket& m, const AtomPayoff& g)
{
    const auto& tree = m.spec.tree;
    std::vector<std::vector<Extended>> value(static_cast<std::size_t>(tree.size()));
    for (int t = tree.horizon; t >= 0; --t)
        for (int v : tree.level(t)) {
            if (m.polar.is_polar(v)) continue;
            const auto& atoms = m.atoms_at(v);
            auto& out = value[static_cast<std::size_t>(v)];
            if (tree.node(v).is_leaf()) {
                for (std::size_t k = 0; k < atoms.size(); ++k) out.emplace_back(leaf_value(g, v, k));
                continue;
            }
            const auto children = charged_children(m, v);
            const auto& C = m.spec.C(v);
            for (const auto& theta : atoms) {
                Lp lp;
                std::vector<Term> objective, mass;
                std::vector<std::pair<Vec, int>> steps;
                for (int c : children)
                    for (std::size_t j = 0; j < m.atoms_at(c).size(); ++j) {
                        const Extended& w = value[static_cast<std::size_t>(c)][j];
                        if (w.kind() == Extended::Kind::MinusInfinity) continue;
                        const int p = lp.add_variable();
                        mass.emplace_back(p, Rational(1));
                        objective.emplace_back(p, w.value());
                        steps.emplace_back(m.atoms_at(c)[j] - theta, p);
                    }
                if (steps.empty()) {
                    out.push_back(Extended::minus_infinity());
                    continue;
                }
                lp.add_constraint(mass, Relation::Equal, Rational(1));
                auto drift = [&](const Vec& y) {
                    std::vector<Term> terms;
                    for (const auto& [s, p] : steps)
                        if (Rational r = dot(y, s); !is_zero(r)) terms.emplace_back(p, r);
                    return terms;
                };
                for (const auto& l : C.lines()) lp.add_constraint(drift(l), Relation::Equal, Rational(0));
                for (const auto& r : C.rays()) lp.add_constraint(drift(r), Relation::LessEqual, Rational(0));
                lp.set_objective(Objective::Maximize, std::move(objective));
                out.push_back(lp_value(lp.solve(), Objective::Maximize));
            }
        }
    const auto& root = value[static_cast<std::size_t>(tree.root)];
    Extended best = Extended::minus_infinity();
    for (const auto& v : root)
        if (best < v) best = v;
    return best;
}

DualResult atom_restricted_dual(const EnlargedMarket& market)
{
    ConeSet cones = ConeSet::unreduced(market.spec);
    cones.choice = ConeChoice::KTilde;
    for (int v = 0; v < market.spec.tree.size(); ++v) {
        if (market.polar.is_polar(v)) continue;
        cones.dual[static_cast<std::size_t>(v)] = PolyhedralCone::from_generators(market.spec.dimension, market.atoms_at(v));
        cones.primal[static_cast<std::size_t>(v)] = dual_cone(cones.dual[static_cast<std::size_t>(v)]);
    }
    return dual_scps(market.spec, cones);
}

OneStepCheck one_step_na_check(const EnlargedMarket& m, const RecursionResult& recursion)
{
    const auto& tree = m.spec.tree;
    const Eigen::Index d = m.spec.dimension;
    const Eigen::Index num = m.spec.numeraire;
    OneStepCheck out;
    for (int v = 0; v < tree.size(); ++v) {
        if (!active_inner(m, v)) continue;
        std::vector<Vec> outcomes;
        for (int c : charged_children(m, v))
            for (const auto& z : recursion.tilde_dual_at(c).generators()) outcomes.push_back(z);
        const auto& atoms = m.atoms_at(v);
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            Lp lp;
            const int h = lp.add_variables(static_cast<int>(d), false);
            const Affine holding = free_vector(h, d);
            detail::require_in_cone(lp, holding, m.spec.C(v));
            for (Eigen::Index i = 0; i < d; ++i) {
                lp.add_constraint({{h + static_cast<int>(i), Rational(1)}}, Relation::LessEqual, Rational(1));
                lp.add_constraint({{h + static_cast<int>(i), Rational(1)}}, Relation::GreaterEqual, Rational(-1));
            }
            std::vector<Term> total;
            for (const auto& z : outcomes) {
                auto [terms, constant] = holding.dot(Vec(z - z[num] * atoms[k]));
                total.insert(total.end(), terms.begin(), terms.end());
                lp.add_constraint(std::move(terms), Relation::GreaterEqual, Rational(0));
            }
            lp.set_objective(Objective::Maximize, Affine::merge(std::move(total)));
            auto res = lp.solve();
            ++out.checked;
            if (res.status != LpStatus::Optimal || !is_zero(res.value)) {
                out.pass = false;
                out.failures.push_back(tree.node(v).id + ":" + std::to_string(k));
            }
        }
    }
    return out;
}

EqualityReport equality_check(const MarketSpec& spec, const std::vector<Rational>& schedule)
{
    const auto verdict = strict_arbitrage_search(spec);
    if (!verdict.pass) throw std::invalid_argument("strict arbitrage exists; the enlargement is undefined");
    const auto recursion = backward_dual_cones(spec);
    EqualityReport report;
    report.price = primal_superhedge(spec, ConeSet::unreduced(spec)).value;
    auto problem = [&](const Rational& eps, const std::string& what) {
        report.problems.push_back("epsilon " + to_string(eps) + ": " + what);
    };
    std::optional<Rational> previous_gap;
    for (const auto& eps : schedule) {
        const auto base = build_enlarged_market(spec, recursion, eps);
        const auto dual = atom_restricted_dual(base);
        std::vector<std::vector<Vec>> extra(static_cast<std::size_t>(spec.tree.size()));
        if (dual.prices)
            for (int v = 0; v < spec.tree.size(); ++v) {
                const auto& mv = dual.prices->m[static_cast<std::size_t>(v)];
                if (mv && sign((*mv)[spec.numeraire]) > 0) extra[static_cast<std::size_t>(v)].push_back(*mv);
            }
        const auto market = build_enlarged_market(spec, recursion, eps, extra);
        const auto g = payoff_on_atoms(market);

        EpsilonRow row;
        row.epsilon = eps;
        row.atoms = market.atom_count();
        row.dual = dual.value;
        row.randomized = frictionless_superhedge(market, g, StrategyClass::Randomized);
        row.consistent = frictionless_superhedge(market, g, StrategyClass::Consistent);
        row.dp = dp_value(market, g);
        row.one_step_na = one_step_na_check(market, recursion).pass;

        if (row.dual > row.randomized || row.randomized > report.price) {
            report.sandwich = false;
            problem(eps, "sandwich dual <= randomized <= price fails");
        }
        if (row.randomized != row.consistent) {
            report.classes_agree = false;
            problem(eps, "randomized " + to_string(row.randomized) + " differs from consistent " + to_string(row.consistent));
        }
        if (row.dp != row.randomized) {
            report.dp_agrees = false;
            problem(eps, "dynamic programming value " + to_string(row.dp) + " differs from " + to_string(row.randomized));
        }
        if (!row.one_step_na) {
            report.one_step_na = false;
            problem(eps, "one-step no-arbitrage fails");
        }
        if (report.price.finite() && row.randomized.finite()) {
            row.gap = report.price.value() - row.randomized.value();
            if (previous_gap && *row.gap > *previous_gap) {
                report.gaps_nonincreasing = false;
                problem(eps, "gap increased");
            }
            previous_gap = row.gap;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace friction
