#include "friction/linalg.hpp"

namespace friction {

Mat stack_rows(const std::vector<Vec>& rows, Eigen::Index dim)
{
    Mat m(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

Vec project_out(const Vec& v, const std::vector<Vec>& basis)
{
    // Gram-Schmidt without normalization keeps everything rational.
    std::vector<Vec> ortho;
    std::vector<Rational> norms;
    for (const auto& b : basis) {
        Vec u = b;
        for (std::size_t k = 0; k < ortho.size(); ++k) u -= (dot(u, ortho[k]) / norms[k]) * ortho[k];
        if (is_zero(u)) continue;
        norms.push_back(dot(u, u));
        ortho.push_back(std::move(u));
    }
    Vec out = v;
    for (std::size_t k = 0; k < ortho.size(); ++k) {
        Rational c = dot(out, ortho[k]);
        if (!is_zero(c)) out -= (c / norms[k]) * ortho[k];
    }
    return out;
}

}  // namespace friction
