#ifndef FRICTION_SIMPLEX_HPP
#define FRICTION_SIMPLEX_HPP

// Dense two-phase tableau simplex, templated on the scalar. Instantiated with
// the exact Rational type everywhere in the library; any ordered field works.

#include "friction/rational.hpp"

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace friction {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Objective { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class PivotRule {
    Bland,     // smallest-index entering and leaving variable throughout
    Dantzig,   // most negative reduced cost, Bland after a run of degenerate pivots
};

struct SimplexOptions {
    PivotRule rule = PivotRule::Dantzig;
    int degenerate_streak = 8;  // Dantzig pivots tolerated before Bland takes over
    long max_pivots = 1'000'000;
};

template <typename Scalar>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Scalar value{0};
    std::vector<Scalar> x;  // one entry per variable added to the program
    long pivots = 0;
};

namespace detail {

template <typename Scalar>
inline bool zero(const Scalar& s) { return s == Scalar(0); }
inline bool zero(const Rational& s) { return is_zero(s); }

template <typename Scalar>
inline int sgn(const Scalar& s) { return (Scalar(0) < s) - (s < Scalar(0)); }
inline int sgn(const Rational& s) { return sign(s); }

// a -= f * b
template <typename Scalar>
inline void sub_mul(Scalar& a, const Scalar& f, const Scalar& b, Scalar&) { a -= f * b; }
inline void sub_mul(Rational& a, const Rational& f, const Rational& b, Rational& tmp)
{
    mpq_mul(tmp.backend().data(), f.backend().data(), b.backend().data());
    mpq_sub(a.backend().data(), a.backend().data(), tmp.backend().data());
}

template <typename Scalar>
inline void mul_in_place(Scalar& a, const Scalar& f) { a *= f; }
inline void mul_in_place(Rational& a, const Rational& f)
{
    mpq_mul(a.backend().data(), a.backend().data(), f.backend().data());
}

template <typename Scalar>
inline int compare(const Scalar& a, const Scalar& b) { return (b < a) - (a < b); }
inline int compare(const Rational& a, const Rational& b)
{
    return mpq_cmp(a.backend().data(), b.backend().data());
}

}  // namespace detail

/// Builder for a linear program with sparse rows. Variables are either
/// nonnegative or free; free variables are split internally.
template <typename Scalar>
class LinearProgram {
public:
    using Term = std::pair<int, Scalar>;

    int add_variable(bool nonnegative = true)
    {
        nonneg_.push_back(nonnegative);
        return static_cast<int>(nonneg_.size()) - 1;
    }

    int add_variables(int count, bool nonnegative = true)
    {
        int first = static_cast<int>(nonneg_.size());
        for (int i = 0; i < count; ++i) nonneg_.push_back(nonnegative);
        return first;
    }

    int num_variables() const { return static_cast<int>(nonneg_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }

    void add_constraint(std::vector<Term> terms, Relation rel, Scalar rhs)
    {
        for (const auto& t : terms)
            if (t.first < 0 || t.first >= num_variables())
                throw std::out_of_range("constraint references unknown variable");
        rows_.push_back({std::move(terms), rel, std::move(rhs)});
    }

    void set_objective(Objective sense, std::vector<Term> terms)
    {
        sense_ = sense;
        objective_ = std::move(terms);
    }

    LpResult<Scalar> solve(const SimplexOptions& options = {}) const;

private:
    struct Row {
        std::vector<Term> terms;
        Relation rel;
        Scalar rhs;
    };

    std::vector<bool> nonneg_;
    std::vector<Row> rows_;
    std::vector<Term> objective_;
    Objective sense_ = Objective::Minimize;
};

namespace detail {

template <typename Scalar>
class Tableau {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Tableau(Eigen::Index rows, Eigen::Index cols, const SimplexOptions& options)
        : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(static_cast<std::size_t>(rows), -1),
          blocked_(static_cast<std::size_t>(cols), false), options_(options)
    {
    }

    Scalar& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
    const Scalar& at(Eigen::Index r, Eigen::Index c) const { return t_(r, c); }
    Scalar& rhs(Eigen::Index r) { return t_(r, cols()); }
    Scalar& cost(Eigen::Index c) { return t_(rows(), c); }
    Scalar& objective_value() { return t_(rows(), cols()); }

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    std::vector<int>& basis() { return basis_; }
    void block(Eigen::Index c) { blocked_[static_cast<std::size_t>(c)] = true; }
    long pivots() const { return pivots_; }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        ++pivots_;
        Scalar inv = Scalar(1) / t_(r, c);
        nz_.clear();
        for (Eigen::Index j = 0; j <= cols(); ++j) {
            if (zero(t_(r, j))) continue;
            mul_in_place(t_(r, j), inv);
            nz_.push_back(j);
        }
        t_(r, c) = Scalar(1);
        for (Eigen::Index i = 0; i <= rows(); ++i) {
            if (i == r || zero(t_(i, c))) continue;
            Scalar f = t_(i, c);
            for (Eigen::Index j : nz_) sub_mul(t_(i, j), f, t_(r, j), tmp_);
            t_(i, c) = Scalar(0);
        }
        basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
    }

    // Runs primal simplex on the current (feasible) tableau, maximizing the
    // objective encoded in the last row. Returns false when unbounded.
    bool optimize()
    {
        int streak = 0;
        bool bland = options_.rule == PivotRule::Bland;
        for (;;) {
            if (pivots_ > options_.max_pivots) throw std::runtime_error("simplex pivot limit exceeded");
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < cols(); ++j) {
                if (blocked_[static_cast<std::size_t>(j)] || sgn(t_(rows(), j)) >= 0) continue;
                if (bland) { enter = j; break; }
                if (enter < 0 || compare(t_(rows(), j), t_(rows(), enter)) < 0) enter = j;
            }
            if (enter < 0) return true;

            Eigen::Index leave = -1;
            Scalar best;
            for (Eigen::Index i = 0; i < rows(); ++i) {
                if (sgn(t_(i, enter)) <= 0) continue;
                Scalar ratio = t_(i, cols()) / t_(i, enter);
                if (leave < 0) { leave = i; best = ratio; continue; }
                int c = compare(ratio, best);
                if (c < 0 || (c == 0 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;

            bool degenerate = zero(best);
            pivot(leave, enter);
            if (options_.rule == PivotRule::Dantzig) {
                streak = degenerate ? streak + 1 : 0;
                bland = streak > options_.degenerate_streak;
            }
        }
    }

    void remove_row(Eigen::Index r)
    {
        Matrix next(t_.rows() - 1, t_.cols());
        next.topRows(r) = t_.topRows(r);
        next.bottomRows(t_.rows() - r - 1) = t_.bottomRows(t_.rows() - r - 1);
        t_ = std::move(next);
        basis_.erase(basis_.begin() + r);
    }

private:
    Matrix t_;
    std::vector<int> basis_;
    std::vector<bool> blocked_;
    SimplexOptions options_;
    std::vector<Eigen::Index> nz_;
    Scalar tmp_;
    long pivots_ = 0;
};

}  // namespace detail

template <typename Scalar>
LpResult<Scalar> LinearProgram<Scalar>::solve(const SimplexOptions& options) const
{
    // Column layout: structural columns (free variables take two), then one
    // slack or surplus per inequality, then one artificial per row that needs it.
    std::vector<int> column_of(nonneg_.size());
    std::vector<int> negative_column_of(nonneg_.size(), -1);
    int ncols = 0;
    for (std::size_t v = 0; v < nonneg_.size(); ++v) {
        column_of[v] = ncols++;
        if (!nonneg_[v]) negative_column_of[v] = ncols++;
    }
    const int structural = ncols;

    const auto m = static_cast<Eigen::Index>(rows_.size());
    std::vector<int> flip(rows_.size(), 1);
    std::vector<int> slack_col(rows_.size(), -1), artificial_col(rows_.size(), -1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        // Homogeneous >= rows are negated so that their slack starts basic.
        const int rhs_sign = detail::sgn(rows_[i].rhs);
        if (rhs_sign < 0 || (rhs_sign == 0 && rows_[i].rel == Relation::GreaterEqual)) flip[i] = -1;
        if (rows_[i].rel != Relation::Equal) slack_col[i] = ncols++;
    }
    const int first_artificial = ncols;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        Relation rel = rows_[i].rel;
        if (flip[i] < 0 && rel != Relation::Equal)
            rel = rel == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
        if (rel != Relation::LessEqual) artificial_col[i] = ncols++;
    }

    detail::Tableau<Scalar> tab(m, ncols, options);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const Scalar s(flip[i]);
        for (const auto& [var, coef] : rows_[i].terms) {
            if (detail::zero(coef)) continue;
            tab.at(r, column_of[var]) += s * coef;
            if (negative_column_of[var] >= 0) tab.at(r, negative_column_of[var]) -= s * coef;
        }
        tab.rhs(r) = s * rows_[i].rhs;
        if (slack_col[i] >= 0) {
            int sl = rows_[i].rel == Relation::LessEqual ? 1 : -1;
            tab.at(r, slack_col[i]) = Scalar(sl * flip[i]);
        }
        if (artificial_col[i] >= 0) {
            tab.at(r, artificial_col[i]) = Scalar(1);
            tab.basis()[i] = artificial_col[i];
        } else {
            tab.basis()[i] = slack_col[i];
        }
    }

    LpResult<Scalar> result;

    // Phase I: maximize minus the sum of artificials.
    if (first_artificial < ncols) {
        for (int c = first_artificial; c < ncols; ++c) tab.cost(c) = Scalar(1);
        for (Eigen::Index r = 0; r < m; ++r) {
            if (artificial_col[static_cast<std::size_t>(r)] < 0) continue;
            Scalar tmp;
            for (Eigen::Index c = 0; c <= ncols; ++c)
                if (!detail::zero(tab.at(r, c))) detail::sub_mul(tab.at(m, c), Scalar(1), tab.at(r, c), tmp);
        }
        tab.optimize();
        if (detail::sgn(tab.objective_value()) != 0) {
            result.status = LpStatus::Infeasible;
            result.pivots = tab.pivots();
            return result;
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are linearly dependent on the others and are dropped.
        for (Eigen::Index r = tab.rows() - 1; r >= 0; --r) {
            if (tab.basis()[static_cast<std::size_t>(r)] < first_artificial) continue;
            Eigen::Index enter = -1;
            for (Eigen::Index c = 0; c < first_artificial; ++c)
                if (!detail::zero(tab.at(r, c))) { enter = c; break; }
            if (enter >= 0) tab.pivot(r, enter);
            else tab.remove_row(r);
        }
        for (int c = first_artificial; c < ncols; ++c) tab.block(c);
    }

    // Phase II objective row, expressed as a maximization.
    const Eigen::Index rows_now = tab.rows();
    for (Eigen::Index c = 0; c <= ncols; ++c) tab.at(rows_now, c) = Scalar(0);
    const Scalar dir(sense_ == Objective::Maximize ? 1 : -1);
    for (const auto& [var, coef] : objective_) {
        tab.cost(column_of[var]) -= dir * coef;
        if (negative_column_of[var] >= 0) tab.cost(negative_column_of[var]) += dir * coef;
    }
    {
        Scalar tmp;
        for (Eigen::Index r = 0; r < rows_now; ++r) {
            const int b = tab.basis()[static_cast<std::size_t>(r)];
            if (detail::zero(tab.cost(b))) continue;
            Scalar f = tab.cost(b);
            for (Eigen::Index c = 0; c <= ncols; ++c)
                if (!detail::zero(tab.at(r, c))) detail::sub_mul(tab.at(rows_now, c), f, tab.at(r, c), tmp);
        }
    }

    const bool bounded = tab.optimize();
    result.pivots = tab.pivots();
    if (!bounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    std::vector<Scalar> column_value(static_cast<std::size_t>(structural), Scalar(0));
    for (Eigen::Index r = 0; r < rows_now; ++r) {
        const int b = tab.basis()[static_cast<std::size_t>(r)];
        if (b < structural) column_value[static_cast<std::size_t>(b)] = tab.rhs(r);
    }
    result.x.assign(nonneg_.size(), Scalar(0));
    for (std::size_t v = 0; v < nonneg_.size(); ++v) {
        result.x[v] = column_value[static_cast<std::size_t>(column_of[v])];
        if (negative_column_of[v] >= 0) result.x[v] -= column_value[static_cast<std::size_t>(negative_column_of[v])];
    }
    result.value = Scalar(0);
    for (const auto& [var, coef] : objective_) result.value += coef * result.x[static_cast<std::size_t>(var)];
    result.status = LpStatus::Optimal;
    return result;
}

}  // namespace friction

#endif  // FRICTION_SIMPLEX_HPP
