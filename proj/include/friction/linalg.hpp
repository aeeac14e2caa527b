#ifndef FRICTION_LINALG_HPP
#define FRICTION_LINALG_HPP

// Exact Gaussian elimination. Eigen's decompositions rely on magnitude
// thresholds, which have no meaning for exact scalars.

#include "friction/rational.hpp"

#include <vector>

namespace friction {

template <typename Scalar>
struct Echelon {
    MatrixX<Scalar> reduced;            // reduced row echelon form, zero rows removed
    std::vector<Eigen::Index> pivots;   // pivot column of each remaining row
};

template <typename Scalar>
Echelon<Scalar> reduced_row_echelon(MatrixX<Scalar> a)
{
    Echelon<Scalar> out;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index p = -1;
        for (Eigen::Index i = row; i < a.rows(); ++i)
            if (a(i, col) != Scalar(0)) { p = i; break; }
        if (p < 0) continue;
        a.row(p).swap(a.row(row));
        Scalar inv = Scalar(1) / a(row, col);
        for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col) == Scalar(0)) continue;
            Scalar f = a(i, col);
            for (Eigen::Index j = col; j < a.cols(); ++j)
                if (a(row, j) != Scalar(0)) a(i, j) -= f * a(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = a.topRows(row);
    return out;
}

template <typename Scalar>
Eigen::Index rank(const MatrixX<Scalar>& a)
{
    return static_cast<Eigen::Index>(reduced_row_echelon(a).pivots.size());
}

/// Basis of {x : a x = 0}, one vector per column of the result.
template <typename Scalar>
MatrixX<Scalar> nullspace(const MatrixX<Scalar>& a)
{
    auto ech = reduced_row_echelon(a);
    const Eigen::Index n = a.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (auto p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    MatrixX<Scalar> basis(n, n - static_cast<Eigen::Index>(ech.pivots.size()));
    basis.setZero();
    Eigen::Index k = 0;
    for (Eigen::Index free = 0; free < n; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        basis(free, k) = Scalar(1);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r)
            basis(ech.pivots[r], k) = -ech.reduced(static_cast<Eigen::Index>(r), free);
        ++k;
    }
    return basis;
}

/// Stacks row vectors into a matrix with `dim` columns.
Mat stack_rows(const std::vector<Vec>& rows, Eigen::Index dim);

/// Orthogonal projection of v onto the complement of span(basis).
Vec project_out(const Vec& v, const std::vector<Vec>& basis);

}  // namespace friction

#endif  // FRICTION_LINALG_HPP
