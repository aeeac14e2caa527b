#ifndef FRICTION_SRC_LP_SUPPORT_HPP
#define FRICTION_SRC_LP_SUPPORT_HPP

// Shared LP plumbing: generator-coefficient columns for node-wise transfers
// and the affine expressions they induce on positions.

#include "friction/cone.hpp"
#include "friction/market.hpp"
#include "friction/simplex.hpp"

#include <vector>

namespace friction::detail {

using Lp = LinearProgram<Rational>;
using Term = Lp::Term;

/// One linear expression per coordinate, plus a constant part.
struct Affine {
    std::vector<std::vector<Term>> coords;
    Vec constant;

    explicit Affine(Eigen::Index d) : coords(static_cast<std::size_t>(d)), constant(Vec::Zero(d)) {}

    /// n . (this), as terms and a constant.
    std::pair<std::vector<Term>, Rational> dot(const Vec& n) const
    {
        std::vector<Term> out;
        for (Eigen::Index i = 0; i < n.size(); ++i) {
            if (is_zero(n[i])) continue;
            for (const auto& [v, c] : coords[static_cast<std::size_t>(i)]) out.emplace_back(v, n[i] * c);
        }
        return {merge(std::move(out)), friction::dot(n, constant)};
    }

    static std::vector<Term> merge(std::vector<Term> terms)
    {
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        std::vector<Term> out;
        for (auto& t : terms) {
            if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
            else out.push_back(std::move(t));
        }
        std::erase_if(out, [](const Term& t) { return is_zero(t.second); });
        return out;
    }
};

/// Nonnegative coefficient columns lambda_{node,g} for every generator g of
/// the cone attached to each active node.
struct TransferColumns {
    std::vector<int> first;                // first column per node, -1 when inactive
    std::vector<std::vector<Vec>> gens;    // generators per node

    void add(Lp& lp, int node, const std::vector<Vec>& generators)
    {
        first[static_cast<std::size_t>(node)] = lp.add_variables(static_cast<int>(generators.size()));
        gens[static_cast<std::size_t>(node)] = generators;
    }

    explicit TransferColumns(int nodes) : first(static_cast<std::size_t>(nodes), -1), gens(static_cast<std::size_t>(nodes)) {}

    bool active(int node) const { return first[static_cast<std::size_t>(node)] >= 0; }

    /// The position -sum of transfers over the active nodes of `path`.
    Affine position(const std::vector<int>& path, Eigen::Index d) const
    {
        Affine a(d);
        for (int node : path) {
            if (!active(node)) continue;
            const auto& g = gens[static_cast<std::size_t>(node)];
            for (std::size_t j = 0; j < g.size(); ++j)
                for (Eigen::Index i = 0; i < d; ++i)
                    if (!is_zero(g[j][i]))
                        a.coords[static_cast<std::size_t>(i)].emplace_back(first[static_cast<std::size_t>(node)] + static_cast<int>(j), -g[j][i]);
        }
        return a;
    }

    Vec transfer(const std::vector<Rational>& x, int node, Eigen::Index d) const
    {
        Vec k = Vec::Zero(d);
        const auto& g = gens[static_cast<std::size_t>(node)];
        for (std::size_t j = 0; j < g.size(); ++j) {
            const Rational& c = x[static_cast<std::size_t>(first[static_cast<std::size_t>(node)]) + j];
            if (!is_zero(c)) k += c * g[j];
        }
        return k;
    }

    std::vector<Term> all_columns() const
    {
        std::vector<Term> out;
        for (std::size_t n = 0; n < first.size(); ++n)
            for (std::size_t j = 0; j < gens[n].size(); ++j) out.emplace_back(first[n] + static_cast<int>(j), Rational(1));
        return out;
    }
};

/// Adds rows requiring `expr` to lie in `cone`: equalities for implicit
/// equality normals, inequalities for facets.
inline void require_in_cone(Lp& lp, const Affine& expr, const PolyhedralCone& cone)
{
    for (const auto& n : cone.equality_normals()) {
        auto [terms, c] = expr.dot(n);
        lp.add_constraint(std::move(terms), Relation::Equal, -c);
    }
    for (const auto& n : cone.facet_normals()) {
        auto [terms, c] = expr.dot(n);
        lp.add_constraint(std::move(terms), Relation::GreaterEqual, -c);
    }
}

}  // namespace friction::detail

#endif  // FRICTION_SRC_LP_SUPPORT_HPP
