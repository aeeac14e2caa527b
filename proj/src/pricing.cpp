#include "friction/pricing.hpp"

#include "lp_support.hpp"

namespace friction {

using detail::Affine;
using detail::Lp;
using detail::Term;
using detail::TransferColumns;

ConeSet ConeSet::unreduced(const MarketSpec& spec)
{
    ConeSet s;
    s.choice = ConeChoice::K;
    s.primal = spec.solvency;
    for (const auto& k : spec.solvency) s.dual.push_back(dual_cone(k));
    return s;
}

ConeSet ConeSet::reduced(const RecursionResult& recursion)
{
    ConeSet s;
    s.choice = ConeChoice::KTilde;
    s.primal = recursion.tilde_primal;
    s.dual = recursion.tilde_dual;
    return s;
}

std::vector<Vec> option_columns(const MarketSpec& spec, const SemiStaticSpec& options, int leaf)
{
    std::vector<Vec> out;
    const Vec e = unit_vector(spec.dimension, spec.numeraire);
    for (const auto& o : options.options) out.push_back(o.payoff[static_cast<std::size_t>(leaf)] - o.ask * e);
    for (const auto& o : options.options) out.push_back(-o.payoff[static_cast<std::size_t>(leaf)] + o.bid * e);
    return out;
}

namespace {

bool has_options(const SemiStaticSpec* options) { return options && !options->options.empty(); }

std::vector<int> non_polar_children(const MarketSpec& spec, const PolarClassification& polar, int v)
{
    std::vector<int> out;
    for (int c : spec.tree.node(v).children)
        if (!polar.is_polar(c)) out.push_back(c);
    return out;
}

/// Columns and terminal rows shared by the superhedging LP and the static
/// arbitrage LP: transfers at non-polar non-leaf nodes, eta in C there, and
/// shift + eta_T + Phi alpha - G in K_T at non-polar leaves.
struct HedgeLp {
    Lp lp;
    TransferColumns columns;
    int alpha_first = -1;
    int alpha_count = 0;

    explicit HedgeLp(int nodes) : columns(nodes) {}
};

HedgeLp hedge_lp(const MarketSpec& spec, const PolarClassification& polar, const ConeSet& cones,
                 const SemiStaticSpec* options, int y, bool with_payoff)
{
    const auto& tree = spec.tree;
    HedgeLp h(tree.size());
    if (y >= 0) h.lp.add_variable(false);
    for (int v = 0; v < tree.size(); ++v)
        if (!polar.is_polar(v) && !tree.node(v).is_leaf()) h.columns.add(h.lp, v, cones.primal_at(v).generators());
    if (has_options(options)) {
        h.alpha_count = 2 * static_cast<int>(options->options.size());
        h.alpha_first = h.lp.add_variables(h.alpha_count);
    }
    for (int v = 0; v < tree.size(); ++v) {
        if (polar.is_polar(v)) continue;
        Affine eta = h.columns.position(tree.path(v), spec.dimension);
        if (!tree.node(v).is_leaf()) {
            detail::require_in_cone(h.lp, eta, spec.C(v));
            continue;
        }
        if (y >= 0) eta.coords[static_cast<std::size_t>(spec.numeraire)].emplace_back(y, Rational(1));
        if (h.alpha_count > 0) {
            auto cols = option_columns(spec, *options, v);
            for (int j = 0; j < h.alpha_count; ++j)
                for (Eigen::Index i = 0; i < spec.dimension; ++i)
                    if (!is_zero(cols[static_cast<std::size_t>(j)][i]))
                        eta.coords[static_cast<std::size_t>(i)].emplace_back(h.alpha_first + j, cols[static_cast<std::size_t>(j)][i]);
        }
        if (with_payoff) eta.constant = -spec.G(v);
        detail::require_in_cone(h.lp, eta, spec.K(v));
    }
    return h;
}

HedgingStrategy extract_strategy(const MarketSpec& spec, const PolarClassification& polar, const HedgeLp& h,
                                 const std::vector<Rational>& x, bool with_y)
{
    const auto& tree = spec.tree;
    const auto n = static_cast<std::size_t>(tree.size());
    HedgingStrategy s;
    if (with_y) s.y = x[0];
    s.transfers.assign(n, std::nullopt);
    s.positions.assign(n, std::nullopt);
    for (int v = 0; v < tree.size(); ++v)
        if (h.columns.active(v)) s.transfers[static_cast<std::size_t>(v)] = h.columns.transfer(x, v, spec.dimension);
    for (int t = 0; t <= tree.horizon; ++t)
        for (int v : tree.level(t)) {
            if (polar.is_polar(v)) continue;
            const int p = tree.node(v).parent;
            Vec eta = p < 0 ? Vec(Vec::Zero(spec.dimension)) : *s.positions[static_cast<std::size_t>(p)];
            if (s.transfers[static_cast<std::size_t>(v)]) eta -= *s.transfers[static_cast<std::size_t>(v)];
            s.positions[static_cast<std::size_t>(v)] = std::move(eta);
        }
    for (int j = 0; j < h.alpha_count; ++j) s.alpha.push_back(x[static_cast<std::size_t>(h.alpha_first + j)]);
    return s;
}

Extended lp_value(const LpResult<Rational>& r, Objective sense)
{
    switch (r.status) {
    case LpStatus::Optimal:
        return r.value;
    case LpStatus::Infeasible:
        return sense == Objective::Minimize ? Extended::plus_infinity() : Extended::minus_infinity();
    case LpStatus::Unbounded:
        break;
    }
    return sense == Objective::Minimize ? Extended::minus_infinity() : Extended::plus_infinity();
}

/// Price vectors m(v) = sum mu_j z_j over generators z_j of the dual cone.
struct PriceLp {
    Lp lp;
    std::vector<int> first;
    std::vector<std::vector<Vec>> gens;

    Affine m(int v, Eigen::Index d) const
    {
        Affine a(d);
        const auto& g = gens[static_cast<std::size_t>(v)];
        for (std::size_t j = 0; j < g.size(); ++j)
            for (Eigen::Index i = 0; i < d; ++i)
                if (!is_zero(g[j][i])) a.coords[static_cast<std::size_t>(i)].emplace_back(first[static_cast<std::size_t>(v)] + static_cast<int>(j), g[j][i]);
        return a;
    }

    Vec value(const std::vector<Rational>& x, int v, Eigen::Index d) const
    {
        Vec out = Vec::Zero(d);
        const auto& g = gens[static_cast<std::size_t>(v)];
        for (std::size_t j = 0; j < g.size(); ++j) {
            const Rational& c = x[static_cast<std::size_t>(first[static_cast<std::size_t>(v)]) + j];
            if (!is_zero(c)) out += c * g[j];
        }
        return out;
    }
};

std::vector<Term> sum_terms(const Affine& a, const Vec& w)
{
    return a.dot(w).first;
}

Affine difference(const Affine& plus, const Affine& minus)
{
    Affine out = plus;
    for (std::size_t i = 0; i < out.coords.size(); ++i)
        for (const auto& [v, c] : minus.coords[i]) out.coords[i].emplace_back(v, -c);
    out.constant -= minus.constant;
    return out;
}

/// Dual feasible set shared by dual_scps and slater_margin. With a margin,
/// column 0 is a free variable s bounding every weight and quote slack.
PriceLp price_lp(const MarketSpec& spec, const PolarClassification& polar, const ConeSet& cones,
                 const SemiStaticSpec* options, bool with_margin)
{
    const auto& tree = spec.tree;
    const Eigen::Index d = spec.dimension;
    PriceLp p;
    p.first.assign(static_cast<std::size_t>(tree.size()), -1);
    p.gens.resize(static_cast<std::size_t>(tree.size()));
    int margin = with_margin ? p.lp.add_variable(false) : -1;
    for (int v = 0; v < tree.size(); ++v) {
        if (polar.is_polar(v)) continue;
        const auto& cone = cones.dual_at(v);
        p.gens[static_cast<std::size_t>(v)] = cone.generators();
        p.first[static_cast<std::size_t>(v)] = p.lp.add_variables(static_cast<int>(cone.generators().size()));
        if (margin >= 0)
            for (std::size_t j = 0; j < cone.generators().size(); ++j)
                p.lp.add_constraint({{p.first[static_cast<std::size_t>(v)] + static_cast<int>(j), Rational(1)}, {margin, Rational(-1)}},
                                    Relation::GreaterEqual, Rational(0));
    }
    for (int v = 0; v < tree.size(); ++v) {
        if (polar.is_polar(v) || tree.node(v).is_leaf()) continue;
        Affine children(d);
        for (int c : non_polar_children(spec, polar, v)) {
            Affine mc = p.m(c, d);
            for (std::size_t i = 0; i < children.coords.size(); ++i)
                children.coords[i].insert(children.coords[i].end(), mc.coords[i].begin(), mc.coords[i].end());
        }
        Affine drift = difference(children, p.m(v, d));
        for (const auto& l : spec.C(v).lines()) p.lp.add_constraint(sum_terms(drift, l), Relation::Equal, Rational(0));
        for (const auto& r : spec.C(v).rays()) p.lp.add_constraint(sum_terms(drift, r), Relation::LessEqual, Rational(0));
    }
    std::vector<Term> mass;
    const Vec e = unit_vector(d, spec.numeraire);
    for (int leaf : tree.leaves()) {
        if (polar.is_polar(leaf)) continue;
        auto t = sum_terms(p.m(leaf, d), e);
        mass.insert(mass.end(), t.begin(), t.end());
    }
    p.lp.add_constraint(Affine::merge(std::move(mass)), Relation::Equal, Rational(1));
    if (has_options(options)) {
        for (const auto& o : options->options) {
            std::vector<Term> value;
            for (int leaf : tree.leaves()) {
                if (polar.is_polar(leaf)) continue;
                auto t = sum_terms(p.m(leaf, d), o.payoff[static_cast<std::size_t>(leaf)]);
                value.insert(value.end(), t.begin(), t.end());
            }
            value = Affine::merge(std::move(value));
            auto lower = value, upper = value;
            if (margin >= 0) {
                lower.emplace_back(margin, Rational(-1));
                upper.emplace_back(margin, Rational(1));
            }
            p.lp.add_constraint(std::move(lower), Relation::GreaterEqual, o.bid);
            p.lp.add_constraint(std::move(upper), Relation::LessEqual, o.ask);
        }
    }
    if (margin >= 0) p.lp.add_constraint({{margin, Rational(1)}}, Relation::LessEqual, Rational(1));
    return p;
}

std::vector<Term> payoff_objective(const MarketSpec& spec, const PolarClassification& polar, const PriceLp& p)
{
    std::vector<Term> obj;
    for (int leaf : spec.tree.leaves()) {
        if (polar.is_polar(leaf)) continue;
        auto t = sum_terms(p.m(leaf, spec.dimension), spec.G(leaf));
        obj.insert(obj.end(), t.begin(), t.end());
    }
    return Affine::merge(std::move(obj));
}

}  // namespace

PrimalResult primal_superhedge(const MarketSpec& spec, const ConeSet& cones, const SemiStaticSpec* options)
{
    const auto polar = polar_classification(spec.tree);
    HedgeLp h = hedge_lp(spec, polar, cones, options, 0, true);
    h.lp.set_objective(Objective::Minimize, {{0, Rational(1)}});
    auto res = h.lp.solve();
    PrimalResult out;
    out.value = lp_value(res, Objective::Minimize);
    if (res.status == LpStatus::Optimal) out.strategy = extract_strategy(spec, polar, h, res.x, true);
    return out;
}

DualResult dual_scps(const MarketSpec& spec, const ConeSet& cones, const SemiStaticSpec* options)
{
    const auto polar = polar_classification(spec.tree);
    PriceLp p = price_lp(spec, polar, cones, options, false);
    p.lp.set_objective(Objective::Maximize, payoff_objective(spec, polar, p));
    auto res = p.lp.solve();
    DualResult out;
    out.value = lp_value(res, Objective::Maximize);
    if (res.status == LpStatus::Optimal) {
        PriceSystem ps;
        ps.m.assign(static_cast<std::size_t>(spec.tree.size()), std::nullopt);
        for (int v = 0; v < spec.tree.size(); ++v)
            if (!polar.is_polar(v)) ps.m[static_cast<std::size_t>(v)] = p.value(res.x, v, spec.dimension);
        out.prices = std::move(ps);
    }
    return out;
}

std::string verify_superhedge(const MarketSpec& spec, const HedgingStrategy& s, const ConeSet& cones,
                              const SemiStaticSpec* options)
{
    const auto& tree = spec.tree;
    const auto polar = polar_classification(tree);
    const auto n = static_cast<std::size_t>(tree.size());
    if (s.transfers.size() != n || s.positions.size() != n) return "strategy does not match the tree";
    const std::size_t m = has_options(options) ? 2 * options->options.size() : 0;
    if (s.alpha.size() != m) return "static holdings do not match the option list";
    for (const auto& a : s.alpha)
        if (sign(a) < 0) return "negative static holding";
    const Vec e = unit_vector(spec.dimension, spec.numeraire);
    for (int t = 0; t <= tree.horizon; ++t) {
        for (int v : tree.level(t)) {
            if (polar.is_polar(v)) continue;
            const auto i = static_cast<std::size_t>(v);
            const auto& id = tree.id(v);
            Vec expected = Vec::Zero(spec.dimension);
            for (int a : tree.path(v))
                if (s.transfers[static_cast<std::size_t>(a)]) expected -= *s.transfers[static_cast<std::size_t>(a)];
            if (s.transfers[i] && !contains(cones.primal_at(v), *s.transfers[i])) return "transfer outside the trading cone at node " + id;
            if (!s.positions[i]) return "missing position at node " + id;
            if (!equal(expected, *s.positions[i])) return "position is not minus the sum of transfers at node " + id;
            if (!contains(spec.C(v), *s.positions[i])) return "position violates the constraint cone at node " + id;
            if (!tree.node(v).is_leaf()) continue;
            Vec terminal = s.y * e + *s.positions[i] - spec.G(v);
            if (m > 0) {
                auto cols = option_columns(spec, *options, v);
                for (std::size_t j = 0; j < m; ++j)
                    if (!is_zero(s.alpha[j])) terminal += s.alpha[j] * cols[j];
            }
            if (!contains(spec.K(v), terminal)) return "terminal position not solvent at node " + id;
        }
    }
    return "";
}

RecoveredScps recover_scps(const MarketSpec& spec, const PriceSystem& prices, const ConeSet& cones,
                           const SemiStaticSpec* options)
{
    const auto& tree = spec.tree;
    const auto polar = polar_classification(tree);
    const auto n = static_cast<std::size_t>(tree.size());
    RecoveredScps out;
    out.Z.assign(n, std::nullopt);
    out.q.assign(n, std::nullopt);
    if (prices.m.size() != n) {
        out.problems.push_back("price system does not match the tree");
        return out;
    }
    const auto num = spec.numeraire;
    for (int v = 0; v < tree.size(); ++v) {
        if (polar.is_polar(v)) continue;
        const auto i = static_cast<std::size_t>(v);
        if (!prices.m[i]) {
            out.problems.push_back("missing price vector at node " + tree.id(v));
            continue;
        }
        const Vec& m = *prices.m[i];
        if (!contains(cones.dual_at(v), m)) out.problems.push_back("price vector outside the dual cone at node " + tree.id(v));
        out.q[i] = m[num];
        if (sign(m[num]) > 0) out.Z[i] = Vec(m / m[num]);
    }
    if (!out.problems.empty()) return out;

    const bool canonical = constraints_canonical(spec);
    for (int v = 0; v < tree.size(); ++v) {
        if (polar.is_polar(v) || tree.node(v).is_leaf()) continue;
        Vec drift = -*prices.m[static_cast<std::size_t>(v)];
        for (int c : non_polar_children(spec, polar, v)) drift += *prices.m[static_cast<std::size_t>(c)];
        if (!contains(dual_cone(spec.C(v)), Vec(-drift)))
            out.problems.push_back("constrained supermartingale inequality fails at node " + tree.id(v));
        if (canonical && !is_zero(drift[num])) out.problems.push_back("numeraire mass not conserved at node " + tree.id(v));
    }
    if (canonical && *out.q[static_cast<std::size_t>(tree.root)] != 1) out.problems.push_back("root numeraire mass is not 1");

    Rational total(0), direct(0);
    for (int leaf : tree.leaves()) {
        if (polar.is_polar(leaf)) continue;
        const auto i = static_cast<std::size_t>(leaf);
        total += *out.q[i];
        direct += dot(spec.G(leaf), *prices.m[i]);
        if (out.Z[i]) out.expectation += *out.q[i] * dot(spec.G(leaf), *out.Z[i]);
    }
    if (total != 1) out.problems.push_back("terminal probabilities do not sum to 1");
    if (out.expectation != direct) out.problems.push_back("price mass without probability at some leaf");
    if (has_options(options)) {
        for (std::size_t k = 0; k < options->options.size(); ++k) {
            const auto& o = options->options[k];
            Rational value(0);
            for (int leaf : tree.leaves())
                if (!polar.is_polar(leaf)) value += dot(o.payoff[static_cast<std::size_t>(leaf)], *prices.m[static_cast<std::size_t>(leaf)]);
            if (value < o.bid || value > o.ask) out.problems.push_back("option " + std::to_string(k) + " priced outside its quotes");
        }
    }
    return out;
}

SemiStaticVerdict na_semistatic_check(const MarketSpec& spec, const SemiStaticSpec& options)
{
    SemiStaticVerdict out;
    out.dynamic = strict_arbitrage_search(spec);
    out.pass = out.dynamic.pass;
    if (options.options.empty()) return out;
    const auto polar = polar_classification(spec.tree);
    const auto cones = ConeSet::unreduced(spec);
    HedgeLp h = hedge_lp(spec, polar, cones, &options, -1, false);
    std::vector<Term> budget = h.columns.all_columns(), gain;
    for (int j = 0; j < h.alpha_count; ++j) {
        budget.emplace_back(h.alpha_first + j, Rational(1));
        gain.emplace_back(h.alpha_first + j, Rational(1));
    }
    h.lp.add_constraint(std::move(budget), Relation::LessEqual, Rational(1));
    h.lp.set_objective(Objective::Maximize, gain);
    auto res = h.lp.solve();
    if (res.status != LpStatus::Optimal) throw std::logic_error("static arbitrage LP is bounded and feasible by construction");
    out.static_gain = res.value;
    if (sign(res.value) > 0) {
        out.pass = false;
        out.witness = extract_strategy(spec, polar, h, res.x, false);
        out.alpha = out.witness->alpha;
    }
    return out;
}

std::optional<Rational> slater_margin(const MarketSpec& spec, const SemiStaticSpec& options)
{
    const auto polar = polar_classification(spec.tree);
    PriceLp p = price_lp(spec, polar, ConeSet::unreduced(spec), &options, true);
    p.lp.set_objective(Objective::Maximize, {{0, Rational(1)}});
    auto res = p.lp.solve();
    if (res.status != LpStatus::Optimal) return std::nullopt;
    return res.value;
}

PriceReport duality_report(const MarketSpec& spec, const SemiStaticSpec* options)
{
    PriceReport r;
    r.arbitrage = strict_arbitrage_search(spec);
    if (has_options(options)) r.semistatic = na_semistatic_check(spec, *options);
    if (!r.arbitrage.pass) return r;

    const auto recursion = backward_dual_cones(spec);
    r.interior = interior_diagnostic(recursion);
    const auto plain = ConeSet::unreduced(spec);
    const auto reduced = ConeSet::reduced(recursion);
    auto pk = primal_superhedge(spec, plain, options);
    auto pkt = primal_superhedge(spec, reduced, options);
    auto dkt = dual_scps(spec, reduced, options);
    auto dk = dual_scps(spec, plain, options);
    r.primal_K = pk.value;
    r.primal_K_tilde = pkt.value;
    r.dual_K = dk.value;
    r.dual_K_tilde = dkt.value;
    r.reduction_identity = pk.value == pkt.value;
    r.duals_agree = dk.value == dkt.value;
    if (pk.value.finite() && dkt.value.finite()) r.gap = pk.value.value() - dkt.value.value();
    if (has_options(options)) r.price_without_options = primal_superhedge(spec, plain).value;

    if (pk.strategy) {
        r.strategy_check = verify_superhedge(spec, *pk.strategy, plain, options);
        if (r.strategy_check.empty() && pkt.strategy) {
            auto reduced_check = verify_superhedge(spec, *pkt.strategy, reduced, options);
            if (!reduced_check.empty()) r.strategy_check = "reduced strategy: " + reduced_check;
        }
        r.strategy = std::move(pk.strategy);
    }
    if (dkt.prices) {
        r.scps = recover_scps(spec, *dkt.prices, reduced, options);
        r.prices_verified = r.scps->problems.empty() && r.scps->expectation == dkt.value.value();
        r.prices = std::move(dkt.prices);
    }
    return r;
}

}  // namespace friction
