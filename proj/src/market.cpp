#include "friction/market.hpp"

#include <algorithm>

namespace friction {

int ScenarioTree::index_of(const std::string& id) const
{
    for (int i = 0; i < size(); ++i)
        if (nodes[static_cast<std::size_t>(i)].id == id) return i;
    return -1;
}

std::vector<int> ScenarioTree::level(int t) const
{
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (node(i).time == t) out.push_back(i);
    return out;
}

std::vector<int> ScenarioTree::path(int i) const
{
    std::vector<int> out;
    for (int v = i; v >= 0; v = node(v).parent) out.push_back(v);
    std::reverse(out.begin(), out.end());
    return out;
}

bool ScenarioTree::charged(int parent, int child_slot) const
{
    for (const auto& k : node(parent).kernels)
        if (sign(k[static_cast<std::size_t>(child_slot)]) > 0) return true;
    return false;
}

void ScenarioTree::link()
{
    if (horizon < 1) throw MarketError("", "horizon", "horizon must be at least 1");
    root = -1;
    for (auto& n : nodes) n.children.clear();
    for (int i = 0; i < size(); ++i) {
        const Node& n = node(i);
        if (index_of(n.id) != i) throw MarketError(n.id, "unique ids", "duplicate node id " + n.id);
        if (n.parent < 0) {
            if (root >= 0) throw MarketError(n.id, "single root", "more than one root node: " + n.id);
            if (n.time != 0) throw MarketError(n.id, "grading", "root must be at time 0: " + n.id);
            root = i;
            continue;
        }
        if (n.parent >= size()) throw MarketError(n.id, "parent", "unknown parent of node " + n.id);
        if (n.time != node(n.parent).time + 1)
            throw MarketError(n.id, "grading", "node time must exceed its parent's by one at node " + n.id);
        nodes[static_cast<std::size_t>(n.parent)].children.push_back(i);
    }
    if (root < 0) throw MarketError("", "single root", "no root node");
    for (const auto& n : nodes) {
        if (n.time > horizon) throw MarketError(n.id, "grading", "node beyond the horizon: " + n.id);
        if (n.is_leaf() && n.time != horizon)
            throw MarketError(n.id, "leaves at horizon", "leaf before the horizon at node " + n.id);
    }
}

PolyhedralCone solvency_from_bidask(const Mat& pi)
{
    if (pi.rows() != pi.cols() || pi.rows() < 1) throw std::invalid_argument("bid-ask matrix must be square");
    const Eigen::Index d = pi.rows();
    std::vector<Vec> gens;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (pi(i, i) != 1) throw std::invalid_argument("bid-ask matrix must have unit diagonal");
        gens.push_back(unit_vector(d, i));
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            if (sign(pi(i, j)) <= 0) throw std::invalid_argument("bid-ask entries must be positive");
            gens.push_back(pi(i, j) * unit_vector(d, i) - unit_vector(d, j));
        }
    }
    return convert(PolyhedralCone::from_generators(d, std::move(gens)));
}

PolarClassification polar_classification(const ScenarioTree& tree)
{
    PolarClassification out;
    out.non_polar.assign(static_cast<std::size_t>(tree.size()), false);
    // Parents precede children in time order, so one sweep per level suffices.
    for (int t = 0; t <= tree.horizon; ++t) {
        for (int v : tree.level(t)) {
            const Node& n = tree.node(v);
            if (n.parent < 0) {
                out.non_polar[static_cast<std::size_t>(v)] = true;
                continue;
            }
            const Node& p = tree.node(n.parent);
            auto slot = std::find(p.children.begin(), p.children.end(), v) - p.children.begin();
            out.non_polar[static_cast<std::size_t>(v)] =
                out.non_polar[static_cast<std::size_t>(n.parent)] && tree.charged(n.parent, static_cast<int>(slot));
        }
    }
    for (int v = 0; v < tree.size(); ++v)
        (out.non_polar[static_cast<std::size_t>(v)] ? out.non_polar_nodes : out.polar_nodes).push_back(tree.id(v));
    return out;
}

PolyhedralCone quasi_sure_support(const ScenarioTree& tree, int node, const std::vector<PolyhedralCone>& family)
{
    const Node& n = tree.node(node);
    if (n.is_leaf()) throw std::invalid_argument("quasi_sure_support: node " + n.id + " is a leaf");
    std::vector<PolyhedralCone> charged;
    for (std::size_t s = 0; s < n.children.size(); ++s)
        if (tree.charged(node, static_cast<int>(s))) charged.push_back(family[static_cast<std::size_t>(n.children[s])]);
    if (charged.empty()) throw std::invalid_argument("quasi_sure_support: no charged children at node " + n.id);
    return conic_hull_of_union(charged);
}

bool constraints_canonical(const MarketSpec& spec)
{
    Vec e = unit_vector(spec.dimension, spec.numeraire);
    for (const auto& c : spec.constraint)
        if (!contains(c, e) || !contains(c, Vec(-e))) return false;
    return true;
}

void validate_market(const MarketSpec& spec, const ValidationOptions& options)
{
    const auto& tree = spec.tree;
    const Eigen::Index d = spec.dimension;
    if (d < 2) throw MarketError("", "dimension", "dimension must be at least 2");
    if (spec.numeraire < 0 || spec.numeraire >= d) throw MarketError("", "numeraire", "numeraire index out of range");
    const auto n = static_cast<std::size_t>(tree.size());
    if (spec.solvency.size() != n || spec.constraint.size() != n || spec.payoff.size() != n)
        throw MarketError("", "completeness", "per-node data does not match the tree");

    for (const auto& node : tree.nodes) {
        if (node.is_leaf()) {
            if (!node.kernels.empty()) throw MarketError(node.id, "kernels", "leaf carries kernels at node " + node.id);
            continue;
        }
        if (node.kernels.empty()) throw MarketError(node.id, "kernels", "no kernel at node " + node.id);
        for (const auto& k : node.kernels) {
            if (k.size() != node.children.size())
                throw MarketError(node.id, "kernels", "kernel does not match children at node " + node.id);
            Rational total(0);
            for (const auto& p : k) {
                if (sign(p) < 0 || p > 1)
                    throw MarketError(node.id, "kernel stochastic", "kernel not stochastic at node " + node.id);
                total += p;
            }
            if (total != 1) throw MarketError(node.id, "kernel stochastic", "kernel not stochastic at node " + node.id);
        }
    }

    const auto orthant = PolyhedralCone::orthant(d);
    const Vec e = unit_vector(d, spec.numeraire);
    for (int v = 0; v < tree.size(); ++v) {
        const std::string& id = tree.id(v);
        const auto& k = spec.K(v);
        const auto& c = spec.C(v);
        if (k.dim() != d || c.dim() != d) throw MarketError(id, "dimension", "cone dimension mismatch at node " + id);
        if (tree.node(v).is_leaf() && spec.G(v).size() != d)
            throw MarketError(id, "payoff", "payoff missing or of wrong length at node " + id);
        if (!is_subset(orthant, k))
            throw MarketError(id, "solvent orthant", "nonnegative positions not solvent at node " + id);
        if (!has_nonempty_interior(dual_cone(k)).nonempty)
            throw MarketError(id, "efficient friction", "efficient friction violated at node " + id);
        if (options.require_numeraire_line && (!contains(c, e) || !contains(c, Vec(-e))))
            throw MarketError(id, "numeraire line", "constraint cone misses the numeraire line at node " + id);
        const int p = tree.node(v).parent;
        if (p >= 0 && !is_subset(spec.C(p), c))
            throw MarketError(id, "nested constraints",
                              "constraint cone not nested on edge " + tree.id(p) + " -> " + id);
    }
}

void validate_options(const MarketSpec& spec, const SemiStaticSpec& options)
{
    for (std::size_t k = 0; k < options.options.size(); ++k) {
        const auto& o = options.options[k];
        const std::string name = "option " + std::to_string(k);
        if (o.bid > o.ask) throw MarketError("", "option quotes", name + ": bid exceeds ask");
        if (o.payoff.size() != static_cast<std::size_t>(spec.tree.size()))
            throw MarketError("", "option payoff", name + ": payoff does not match the tree");
        for (int leaf : spec.tree.leaves())
            if (o.payoff[static_cast<std::size_t>(leaf)].size() != spec.dimension)
                throw MarketError(spec.tree.id(leaf), "option payoff", name + ": payoff missing at node " + spec.tree.id(leaf));
    }
}

namespace {

Vec append_zero(const Vec& v)
{
    Vec out = Vec::Zero(v.size() + 1);
    out.head(v.size()) = v;
    return out;
}

}  // namespace

MarketSpec bar_extension(const MarketSpec& spec)
{
    MarketSpec out;
    out.dimension = spec.dimension + 1;
    out.numeraire = spec.numeraire;
    out.tree = spec.tree;
    const auto half_line = PolyhedralCone::orthant(1);
    const auto line = PolyhedralCone::full_space(1);
    for (int v = 0; v < spec.tree.size(); ++v) {
        out.solvency.push_back(product(spec.K(v), half_line));
        out.constraint.push_back(product(spec.C(v), line));
        const Vec& g = spec.G(v);
        out.payoff.push_back(g.size() == spec.dimension ? append_zero(g) : Vec());
    }
    return out;
}

SemiStaticSpec bar_extension(const SemiStaticSpec& options)
{
    SemiStaticSpec out = options;
    for (auto& o : out.options)
        for (auto& p : o.payoff)
            if (p.size() > 0) p = append_zero(p);
    return out;
}

}  // namespace friction
