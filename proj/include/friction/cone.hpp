#ifndef FRICTION_CONE_HPP
#define FRICTION_CONE_HPP

#include "friction/rational.hpp"

#include <optional>
#include <vector>

namespace friction {

enum class RepKind { Generators, Halfspaces };

/// Closed convex polyhedral cone in Q^d, carried as generators (V) and/or
/// inner normals (H): {x : n.x >= 0 for every normal n}.
///
/// A synced cone holds both representations in canonical minimal form:
/// lines appear as a pair +v/-v built from a reduced echelon basis, the
/// remaining generators are extreme rays taken orthogonal to the lineality
/// space, all as primitive integer vectors sorted lexicographically. The
/// same normalization is applied to the halfspaces (implicit equalities
/// appear as +n/-n pairs).
class PolyhedralCone {
public:
    PolyhedralCone() = default;

    static PolyhedralCone from_generators(Eigen::Index dim, std::vector<Vec> generators);
    static PolyhedralCone from_halfspaces(Eigen::Index dim, std::vector<Vec> normals);

    static PolyhedralCone orthant(Eigen::Index dim);
    static PolyhedralCone full_space(Eigen::Index dim);
    static PolyhedralCone zero(Eigen::Index dim);

    Eigen::Index dim() const { return dim_; }
    bool has_generators() const { return has_v_; }
    bool has_halfspaces() const { return has_h_; }
    bool synced() const { return synced_; }

    const std::vector<Vec>& generators() const;
    const std::vector<Vec>& halfspaces() const;

    /// Basis of the lineality space and the extreme rays modulo it; only
    /// available on synced cones.
    const std::vector<Vec>& lines() const;
    const std::vector<Vec>& rays() const;

    /// The halfspace counterparts: normals n with n.x = 0 on the whole cone
    /// (a basis, as for lines()) and the facet normals.
    const std::vector<Vec>& equality_normals() const;
    const std::vector<Vec>& facet_normals() const;

private:
    friend PolyhedralCone convert(const PolyhedralCone& cone, RepKind target);
    friend PolyhedralCone dual_cone(const PolyhedralCone& cone);

    Eigen::Index dim_ = 0;
    bool has_v_ = false, has_h_ = false, synced_ = false;
    std::vector<Vec> generators_, halfspaces_;
    std::vector<Vec> lines_, rays_;
    std::vector<Vec> normal_lines_, normal_rays_;
};

/// Lines and extreme rays of {x : n.x >= 0 for all n in normals}, computed by
/// the double-description method. Output is in the canonical form described
/// on PolyhedralCone.
struct GeneratorSet {
    std::vector<Vec> lines;
    std::vector<Vec> rays;
};
GeneratorSet enumerate_generators(Eigen::Index dim, const std::vector<Vec>& normals);

/// Returns a synced copy. `target` names the representation the caller
/// intends to read; both are populated regardless.
PolyhedralCone convert(const PolyhedralCone& cone, RepKind target = RepKind::Generators);

PolyhedralCone dual_cone(const PolyhedralCone& cone);
PolyhedralCone intersect(const PolyhedralCone& a, const PolyhedralCone& b);
PolyhedralCone minkowski_sum(const PolyhedralCone& a, const PolyhedralCone& b);
PolyhedralCone conic_hull_of_union(const std::vector<PolyhedralCone>& cones);

/// Product cone a x b in Q^{dim a + dim b}.
PolyhedralCone product(const PolyhedralCone& a, const PolyhedralCone& b);

struct InteriorResult {
    bool nonempty = false;
    std::optional<Vec> witness;  // satisfies every halfspace strictly
};
InteriorResult has_nonempty_interior(const PolyhedralCone& cone);

bool contains(const PolyhedralCone& cone, const Vec& x);

/// Smallest value of n.x over the halfspaces of the cone (0 when there are
/// none); positive iff x is an interior point.
Rational interior_margin(const PolyhedralCone& cone, const Vec& x);

bool is_subset(const PolyhedralCone& a, const PolyhedralCone& b);
bool same_set(const PolyhedralCone& a, const PolyhedralCone& b);

/// The slice {x in cone : x[coord] = 1} as conv(vertices) + cone(rays).
struct ConeSection {
    PolyhedralCone base;
    Eigen::Index level_coord = 0;
    std::vector<Vec> vertices;
    std::vector<Vec> rays;
    bool empty() const { return vertices.empty(); }
};
ConeSection normalized_section(const PolyhedralCone& cone, Eigen::Index coord);

}  // namespace friction

#endif  // FRICTION_CONE_HPP
