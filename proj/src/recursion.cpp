#include "friction/recursion.hpp"

#include "lp_support.hpp"

namespace friction {

using detail::Affine;
using detail::Lp;
using detail::Term;
using detail::TransferColumns;

RecursionResult backward_dual_cones(const MarketSpec& spec)
{
    const auto& tree = spec.tree;
    const auto n = static_cast<std::size_t>(tree.size());
    RecursionResult r;
    r.polar = polar_classification(tree);
    r.dual_solvency.reserve(n);
    for (const auto& k : spec.solvency) r.dual_solvency.push_back(dual_cone(k));
    r.tilde_dual = r.dual_solvency;
    r.gamma_hull.assign(n, std::nullopt);

    for (int t = tree.horizon - 1; t >= 0; --t) {
        for (int v : tree.level(t)) {
            if (r.polar.is_polar(v)) continue;
            auto hull = quasi_sure_support(tree, v, r.tilde_dual);
            auto shifted = minkowski_sum(hull, dual_cone(spec.C(v)));
            r.tilde_dual[static_cast<std::size_t>(v)] = intersect(r.dual_solvency[static_cast<std::size_t>(v)], shifted);
            r.gamma_hull[static_cast<std::size_t>(v)] = std::move(hull);
        }
    }
    r.tilde_primal.reserve(n);
    for (const auto& c : r.tilde_dual) r.tilde_primal.push_back(dual_cone(c));
    for (int v = 0; v < tree.size(); ++v)
        if (!r.polar.is_polar(v) && !has_nonempty_interior(r.tilde_dual_at(v)).nonempty)
            r.empty_interior_nodes.push_back(tree.id(v));
    return r;
}

bool tilde_decomposition_check(const RecursionResult& result, const MarketSpec& spec)
{
    for (int v = 0; v < spec.tree.size(); ++v) {
        if (result.polar.is_polar(v)) continue;
        const auto& hull = result.gamma_hull[static_cast<std::size_t>(v)];
        PolyhedralCone expected = hull ? minkowski_sum(spec.K(v), intersect(dual_cone(*hull), spec.C(v))) : spec.K(v);
        if (!same_set(result.tilde_primal_at(v), expected)) return false;
    }
    return true;
}

InteriorDiagnostic interior_diagnostic(const RecursionResult& result)
{
    InteriorDiagnostic d;
    d.flagged_nodes = result.empty_interior_nodes;
    d.necessary_condition_holds = d.flagged_nodes.empty();
    if (d.necessary_condition_holds) {
        d.message = "necessary condition for no strict arbitrage holds";
    } else {
        d.message = "strict arbitrage necessarily exists: reduced dual cone has empty interior at node";
        for (const auto& id : d.flagged_nodes) d.message += " " + id;
    }
    return d;
}

namespace {

struct TimeSliceLp {
    Lp lp;
    TransferColumns columns;
    std::vector<int> targets;        // non-polar nodes at time t
    std::vector<Affine> positions;   // aligned with targets

    explicit TimeSliceLp(int nodes) : columns(nodes) {}
};

TimeSliceLp build_time_slice(const MarketSpec& spec, const PolarClassification& polar, int t)
{
    const auto& tree = spec.tree;
    TimeSliceLp s(tree.size());
    for (int v = 0; v < tree.size(); ++v)
        if (tree.node(v).time <= t && !polar.is_polar(v)) s.columns.add(s.lp, v, spec.K(v).generators());
    for (int v : tree.level(t)) {
        if (polar.is_polar(v)) continue;
        Affine xi = s.columns.position(tree.path(v), spec.dimension);
        detail::require_in_cone(s.lp, xi, spec.C(v));
        detail::require_in_cone(s.lp, xi, spec.K(v));
        s.targets.push_back(v);
        s.positions.push_back(std::move(xi));
    }
    s.lp.add_constraint(s.columns.all_columns(), Relation::LessEqual, Rational(1));
    return s;
}

ArbitrageWitness make_witness(const MarketSpec& spec, const TimeSliceLp& s, const std::vector<Rational>& x, int t)
{
    ArbitrageWitness w;
    w.time = t;
    const auto n = static_cast<std::size_t>(spec.tree.size());
    w.transfers.assign(n, std::nullopt);
    w.positions.assign(n, std::nullopt);
    for (int v = 0; v < spec.tree.size(); ++v)
        if (s.columns.active(v)) w.transfers[static_cast<std::size_t>(v)] = s.columns.transfer(x, v, spec.dimension);
    for (int v : s.targets) {
        Vec xi = Vec::Zero(spec.dimension);
        for (int a : spec.tree.path(v)) xi -= *w.transfers[static_cast<std::size_t>(a)];
        if (w.nonzero_node < 0 && !is_zero(xi)) w.nonzero_node = v;
        w.positions[static_cast<std::size_t>(v)] = std::move(xi);
    }
    return w;
}

}  // namespace

ArbitrageVerdict strict_arbitrage_search(const MarketSpec& spec, ArbitrageSearch mode)
{
    const auto polar = polar_classification(spec.tree);
    ArbitrageVerdict verdict;
    for (int t = 0; t <= spec.tree.horizon; ++t) {
        TimeSliceLp s = build_time_slice(spec, polar, t);
        std::vector<std::vector<Term>> objectives;
        if (mode == ArbitrageSearch::Aggregated) {
            // Under efficient friction K is pointed, so z.xi > 0 for every
            // nonzero xi in K when z is interior to K*; a generator sum of K*
            // is such a point.
            std::vector<Term> obj;
            for (std::size_t k = 0; k < s.targets.size(); ++k) {
                const auto dual = dual_cone(spec.K(s.targets[k]));
                Vec z = Vec::Zero(spec.dimension);
                for (const auto& g : dual.generators()) z += g;
                auto [terms, c] = s.positions[k].dot(z);
                obj.insert(obj.end(), terms.begin(), terms.end());
            }
            objectives.push_back(Affine::merge(std::move(obj)));
        } else {
            for (std::size_t k = 0; k < s.targets.size(); ++k)
                for (Eigen::Index i = 0; i < spec.dimension; ++i)
                    for (int sg : {1, -1}) {
                        std::vector<Term> obj = s.positions[k].coords[static_cast<std::size_t>(i)];
                        for (auto& term : obj) term.second *= sg;
                        objectives.push_back(std::move(obj));
                    }
        }
        bool pass = true;
        for (auto& obj : objectives) {
            s.lp.set_objective(Objective::Maximize, obj);
            auto res = s.lp.solve();
            ++verdict.lps_solved;
            if (res.status != LpStatus::Optimal) throw std::logic_error("arbitrage LP is bounded and feasible by construction");
            if (sign(res.value) > 0) {
                pass = false;
                if (!verdict.witness) verdict.witness = make_witness(spec, s, res.x, t);
                break;
            }
        }
        verdict.pass_at_time.push_back(pass);
        verdict.pass = verdict.pass && pass;
    }
    return verdict;
}

std::string verify_arbitrage_witness(const MarketSpec& spec, const ArbitrageWitness& w)
{
    const auto& tree = spec.tree;
    const auto polar = polar_classification(tree);
    for (int v = 0; v < tree.size(); ++v) {
        const auto& k = w.transfers[static_cast<std::size_t>(v)];
        if (!k) continue;
        if (tree.node(v).time > w.time) return "transfer after the witness time at node " + tree.id(v);
        if (!contains(spec.K(v), *k)) return "transfer not in the solvency cone at node " + tree.id(v);
    }
    for (int v : tree.level(w.time)) {
        if (polar.is_polar(v)) continue;
        const auto& xi = w.positions[static_cast<std::size_t>(v)];
        if (!xi) return "missing position at node " + tree.id(v);
        Vec sum = Vec::Zero(spec.dimension);
        for (int a : tree.path(v))
            if (w.transfers[static_cast<std::size_t>(a)]) sum -= *w.transfers[static_cast<std::size_t>(a)];
        if (!equal(sum, *xi)) return "position is not minus the sum of transfers at node " + tree.id(v);
        if (!contains(spec.C(v), *xi)) return "position violates the constraint cone at node " + tree.id(v);
        if (!contains(spec.K(v), *xi)) return "position not solvent at node " + tree.id(v);
    }
    if (w.nonzero_node < 0 || polar.is_polar(w.nonzero_node) || tree.node(w.nonzero_node).time != w.time)
        return "witness names no valid node";
    if (is_zero(*w.positions[static_cast<std::size_t>(w.nonzero_node)])) return "witness position is zero";
    return "";
}

}  // namespace friction
