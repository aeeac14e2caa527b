#include "friction/generator.hpp"

#include <algorithm>
#include <string>

namespace friction {

namespace {

int pick(Engine& rng, int lo, int hi)
{
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <class T>
const T& pick_from(Engine& rng, const std::vector<T>& xs)
{
    return xs[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(xs.size()) - 1))];
}

Rational ratio(int p, int q) { return Rational(p) / Rational(q); }

ScenarioTree random_tree(Engine& rng, const GeneratorOptions& o, int horizon)
{
    ScenarioTree tree;
    tree.horizon = horizon;
    Node root;
    root.id = "0";
    tree.nodes.push_back(std::move(root));
    std::vector<int> frontier{0};
    for (int t = 1; t <= horizon; ++t) {
        std::vector<int> next;
        // Later nodes get fewer children when the budget runs low.
        for (int p : frontier) {
            int remaining = o.max_nodes - tree.size() - static_cast<int>(frontier.size());
            int count = remaining > o.max_children ? pick(rng, 1, o.max_children) : 1;
            for (int c = 0; c < count; ++c) {
                Node n;
                n.id = tree.id(p) + "." + std::to_string(c);
                n.time = t;
                n.parent = p;
                next.push_back(tree.size());
                tree.nodes.push_back(std::move(n));
            }
        }
        frontier = std::move(next);
    }
    tree.link();
    for (auto& n : tree.nodes) {
        if (n.is_leaf()) continue;
        int kernels = pick(rng, 1, o.max_kernels);
        for (int k = 0; k < kernels; ++k) {
            std::vector<int> w(n.children.size());
            int total = 0;
            while (total == 0) {
                total = 0;
                for (auto& x : w) total += (x = pick(rng, 0, 3));
            }
            std::vector<Rational> probs;
            for (int x : w) probs.push_back(ratio(x, total));
            n.kernels.push_back(std::move(probs));
        }
    }
    return tree;
}

PolyhedralCone bidask_cone(const Vec& mid, const Rational& spread)
{
    const Eigen::Index d = mid.size();
    Mat pi(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) pi(i, j) = i == j ? Rational(1) : mid[j] / mid[i] * (1 + spread);
    return solvency_from_bidask(pi);
}

MarketSpec build(Engine& rng, const GeneratorOptions& o, bool force_empty_interior)
{
    MarketSpec spec;
    spec.dimension = pick(rng, o.min_dimension, o.max_dimension);
    spec.numeraire = spec.dimension - 1;
    const Eigen::Index d = spec.dimension;
    int horizon = pick(rng, o.min_horizon, o.max_horizon);
    spec.tree = random_tree(rng, o, horizon);
    const auto& tree = spec.tree;
    const auto n = static_cast<std::size_t>(tree.size());
    const auto polar = polar_classification(tree);

    int forced = -1;
    if (force_empty_interior) {
        std::vector<int> candidates;
        for (int v = 0; v < tree.size(); ++v)
            if (!polar.is_polar(v) && !tree.node(v).is_leaf()) candidates.push_back(v);
        forced = pick_from(rng, candidates);
    }

    const std::vector<Rational> spreads{ratio(1, 20), ratio(1, 10), ratio(1, 5), ratio(1, 2)};
    const std::vector<Rational> levels{ratio(1, 2), ratio(1, 1), ratio(3, 2), ratio(2, 1)};
    const std::vector<Rational> down{ratio(1, 2), ratio(2, 3), ratio(4, 5), ratio(1, 1)};
    const std::vector<Rational> up{ratio(1, 1), ratio(5, 4), ratio(3, 2), ratio(2, 1)};
    const std::vector<Rational> flat{ratio(4, 5), ratio(1, 1), ratio(5, 4)};

    std::vector<Vec> mid(n);
    std::vector<Rational> spread(n);
    for (int t = 0; t <= tree.horizon; ++t) {
        for (int v : tree.level(t)) {
            spread[static_cast<std::size_t>(v)] = pick_from(rng, spreads);
            Vec m(d);
            m[d - 1] = 1;
            const Node& node = tree.node(v);
            if (node.parent < 0) {
                for (Eigen::Index i = 0; i + 1 < d; ++i) m[i] = pick_from(rng, levels);
            } else {
                const Node& p = tree.node(node.parent);
                auto slot = std::find(p.children.begin(), p.children.end(), v) - p.children.begin();
                const auto& factors = p.children.size() == 1 ? flat : slot == 0 ? down : slot == 1 ? up : pick(rng, 0, 1) ? up : down;
                for (Eigen::Index i = 0; i + 1 < d; ++i)
                    m[i] = mid[static_cast<std::size_t>(node.parent)][i] * pick_from(rng, factors);
                if (node.parent == forced) {
                    const auto ps = static_cast<std::size_t>(node.parent);
                    m[0] = mid[ps][0] * (1 + spread[ps]) * (1 + spread[static_cast<std::size_t>(v)]) * 2;
                }
            }
            mid[static_cast<std::size_t>(v)] = std::move(m);
        }
    }

    std::vector<std::vector<Vec>> normals(n);
    const bool constrained = o.constraints && !force_empty_interior;
    spec.solvency.assign(n, PolyhedralCone::zero(d));
    spec.constraint.assign(n, PolyhedralCone::zero(d));
    for (int t = 0; t <= tree.horizon; ++t) {
        for (int v : tree.level(t)) {
            const auto i = static_cast<std::size_t>(v);
            const Node& node = tree.node(v);
            if (constrained && node.parent < 0) {
                int count = pick(rng, 0, 2);
                for (int k = 0; k < count; ++k) {
                    Vec a = Vec::Zero(d);
                    while (is_zero(a))
                        for (Eigen::Index j = 0; j + 1 < d; ++j) a[j] = pick(rng, -1, 2);
                    normals[i].push_back(std::move(a));
                }
            } else if (constrained) {
                for (const auto& a : normals[static_cast<std::size_t>(node.parent)])
                    if (pick(rng, 0, 3) != 0) normals[i].push_back(a);
            }
            spec.solvency[i] = bidask_cone(mid[i], spread[i]);
            spec.constraint[i] = convert(PolyhedralCone::from_halfspaces(d, normals[i]));
        }
    }
    spec.payoff = random_payoff(rng, spec);
    validate_market(spec);
    return spec;
}

}  // namespace

std::vector<Vec> random_payoff(Engine& rng, const MarketSpec& spec, int range, int den_max)
{
    std::vector<Vec> out(static_cast<std::size_t>(spec.tree.size()));
    for (int leaf : spec.tree.leaves()) {
        Vec g(spec.dimension);
        for (Eigen::Index i = 0; i < spec.dimension; ++i) g[i] = ratio(pick(rng, -range, range), pick(rng, 1, den_max));
        out[static_cast<std::size_t>(leaf)] = std::move(g);
    }
    return out;
}

MarketSpec random_market(Engine& rng, const GeneratorOptions& options)
{
    return build(rng, options, false);
}

MarketSpec random_empty_interior_market(Engine& rng, const GeneratorOptions& options)
{
    return build(rng, options, true);
}

MarketSpec seeded_market(std::uint64_t seed)
{
    Engine rng(seed);
    return random_market(rng);
}

}  // namespace friction
