#include "friction/cone.hpp"

#include "friction/linalg.hpp"
#include "friction/simplex.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <stdexcept>

namespace friction {

namespace {

void check_dims(Eigen::Index dim, const std::vector<Vec>& vs)
{
    if (dim <= 0) throw std::invalid_argument("cone dimension must be positive");
    for (const auto& v : vs)
        if (v.size() != dim) throw std::invalid_argument("dimension mismatch among cone vectors");
}

struct Ray {
    Vec v;
    boost::dynamic_bitset<> tight;
};

std::vector<Vec> canonical_lines(const std::vector<Vec>& lines, Eigen::Index dim)
{
    if (lines.empty()) return {};
    auto ech = reduced_row_echelon<Rational>(stack_rows(lines, dim));
    std::vector<Vec> out;
    for (Eigen::Index r = 0; r < ech.reduced.rows(); ++r) out.push_back(primitive_line(ech.reduced.row(r).transpose()));
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

void sort_unique(std::vector<Vec>& vs)
{
    std::sort(vs.begin(), vs.end(), lex_less);
    vs.erase(std::unique(vs.begin(), vs.end(), [](const Vec& a, const Vec& b) { return equal(a, b); }), vs.end());
}

std::vector<Vec> with_lines(const GeneratorSet& g)
{
    std::vector<Vec> out;
    for (const auto& l : g.lines) {
        out.push_back(l);
        out.push_back(-l);
    }
    out.insert(out.end(), g.rays.begin(), g.rays.end());
    sort_unique(out);
    return out;
}

const std::vector<Vec>& generators_of(const PolyhedralCone& c, PolyhedralCone& holder)
{
    if (c.has_generators()) return c.generators();
    holder = convert(c);
    return holder.generators();
}

const std::vector<Vec>& halfspaces_of(const PolyhedralCone& c, PolyhedralCone& holder)
{
    if (c.has_halfspaces()) return c.halfspaces();
    holder = convert(c);
    return holder.halfspaces();
}

}  // namespace

GeneratorSet enumerate_generators(Eigen::Index dim, const std::vector<Vec>& normals)
{
    check_dims(dim, normals);
    std::vector<Vec> constraints;
    for (const auto& n : normals)
        if (!is_zero(n)) constraints.push_back(primitive_direction(n));
    sort_unique(constraints);
    const std::size_t k = constraints.size();

    std::vector<Vec> lines;
    for (Eigen::Index i = 0; i < dim; ++i) lines.push_back(unit_vector(dim, i));
    std::vector<Ray> rays;

    for (std::size_t c = 0; c < k; ++c) {
        const Vec& a = constraints[c];

        std::size_t pick = lines.size();
        Rational al;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            al = dot(a, lines[i]);
            if (!is_zero(al)) { pick = i; break; }
        }
        if (pick < lines.size()) {
            Vec l = lines[pick];
            if (sign(al) < 0) { l = -l; al = -al; }
            lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(pick));
            for (auto& other : lines) {
                Rational t = dot(a, other);
                if (!is_zero(t)) other = primitive_direction(Vec(other - (t / al) * l));
            }
            for (auto& r : rays) {
                Rational t = dot(a, r.v);
                if (!is_zero(t)) r.v = primitive_direction(Vec(r.v - (t / al) * l));
                r.tight.set(c);
            }
            boost::dynamic_bitset<> tight(k);
            for (std::size_t j = 0; j < c; ++j) tight.set(j);
            rays.push_back({primitive_direction(l), std::move(tight)});
            continue;
        }

        std::vector<Ray> pos, zer, neg;
        std::vector<Rational> pos_val, neg_val;
        for (auto& r : rays) {
            Rational t = dot(a, r.v);
            int s = sign(t);
            if (s > 0) { pos.push_back(std::move(r)); pos_val.push_back(t); }
            else if (s < 0) { neg.push_back(std::move(r)); neg_val.push_back(t); }
            else { r.tight.set(c); zer.push_back(std::move(r)); }
        }

        const std::size_t need = dim - static_cast<Eigen::Index>(lines.size()) >= 2
                                     ? static_cast<std::size_t>(dim - static_cast<Eigen::Index>(lines.size()) - 2)
                                     : 0;
        std::vector<Ray> created;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            for (std::size_t j = 0; j < neg.size(); ++j) {
                boost::dynamic_bitset<> common = pos[i].tight & neg[j].tight;
                if (common.count() < need) continue;
                bool adjacent = true;
                auto blocks = [&](const Ray& r) { return common.is_subset_of(r.tight); };
                for (std::size_t q = 0; adjacent && q < pos.size(); ++q)
                    if (q != i && blocks(pos[q])) adjacent = false;
                for (std::size_t q = 0; adjacent && q < neg.size(); ++q)
                    if (q != j && blocks(neg[q])) adjacent = false;
                for (std::size_t q = 0; adjacent && q < zer.size(); ++q)
                    if (blocks(zer[q])) adjacent = false;
                if (!adjacent) continue;
                Vec v = pos_val[i] * neg[j].v - neg_val[j] * pos[i].v;
                common.set(c);
                created.push_back({primitive_direction(v), std::move(common)});
            }
        }
        rays = std::move(pos);
        for (auto& r : zer) rays.push_back(std::move(r));
        for (auto& r : created) rays.push_back(std::move(r));
    }

    GeneratorSet out;
    out.lines = canonical_lines(lines, dim);
    for (const auto& r : rays) {
        Vec p = primitive_direction(project_out(r.v, out.lines));
        if (!is_zero(p)) out.rays.push_back(std::move(p));
    }
    sort_unique(out.rays);
    return out;
}

PolyhedralCone PolyhedralCone::from_generators(Eigen::Index dim, std::vector<Vec> generators)
{
    check_dims(dim, generators);
    PolyhedralCone c;
    c.dim_ = dim;
    c.has_v_ = true;
    for (auto& g : generators)
        if (!is_zero(g)) c.generators_.push_back(primitive_direction(g));
    sort_unique(c.generators_);
    return c;
}

PolyhedralCone PolyhedralCone::from_halfspaces(Eigen::Index dim, std::vector<Vec> normals)
{
    check_dims(dim, normals);
    PolyhedralCone c;
    c.dim_ = dim;
    c.has_h_ = true;
    for (auto& n : normals)
        if (!is_zero(n)) c.halfspaces_.push_back(primitive_direction(n));
    sort_unique(c.halfspaces_);
    return c;
}

PolyhedralCone PolyhedralCone::orthant(Eigen::Index dim)
{
    std::vector<Vec> e;
    for (Eigen::Index i = 0; i < dim; ++i) e.push_back(unit_vector(dim, i));
    return convert(from_generators(dim, e));
}

PolyhedralCone PolyhedralCone::full_space(Eigen::Index dim)
{
    return convert(from_halfspaces(dim, {}));
}

PolyhedralCone PolyhedralCone::zero(Eigen::Index dim)
{
    return convert(from_generators(dim, {}));
}

const std::vector<Vec>& PolyhedralCone::generators() const
{
    if (!has_v_) throw std::logic_error("cone has no generator representation");
    return generators_;
}

const std::vector<Vec>& PolyhedralCone::halfspaces() const
{
    if (!has_h_) throw std::logic_error("cone has no halfspace representation");
    return halfspaces_;
}

const std::vector<Vec>& PolyhedralCone::lines() const
{
    if (!synced_) throw std::logic_error("lineality requires a synced cone");
    return lines_;
}

const std::vector<Vec>& PolyhedralCone::rays() const
{
    if (!synced_) throw std::logic_error("extreme rays require a synced cone");
    return rays_;
}

const std::vector<Vec>& PolyhedralCone::equality_normals() const
{
    if (!synced_) throw std::logic_error("equality normals require a synced cone");
    return normal_lines_;
}

const std::vector<Vec>& PolyhedralCone::facet_normals() const
{
    if (!synced_) throw std::logic_error("facet normals require a synced cone");
    return normal_rays_;
}

PolyhedralCone convert(const PolyhedralCone& cone, RepKind)
{
    if (cone.synced_) return cone;
    if (!cone.has_v_ && !cone.has_h_) throw std::logic_error("cone has no representation");
    PolyhedralCone out;
    out.dim_ = cone.dim_;
    GeneratorSet v, h;
    if (cone.has_v_) {
        h = enumerate_generators(cone.dim_, cone.generators_);
        v = enumerate_generators(cone.dim_, with_lines(h));
    } else {
        v = enumerate_generators(cone.dim_, cone.halfspaces_);
        h = enumerate_generators(cone.dim_, with_lines(v));
    }
    out.generators_ = with_lines(v);
    out.halfspaces_ = with_lines(h);
    out.lines_ = std::move(v.lines);
    out.rays_ = std::move(v.rays);
    out.normal_lines_ = std::move(h.lines);
    out.normal_rays_ = std::move(h.rays);
    out.has_v_ = out.has_h_ = out.synced_ = true;
    return out;
}

PolyhedralCone dual_cone(const PolyhedralCone& cone)
{
    PolyhedralCone out;
    out.dim_ = cone.dim_;
    out.has_v_ = cone.has_h_;
    out.has_h_ = cone.has_v_;
    out.synced_ = cone.synced_;
    out.generators_ = cone.halfspaces_;
    out.halfspaces_ = cone.generators_;
    out.lines_ = cone.normal_lines_;
    out.rays_ = cone.normal_rays_;
    out.normal_lines_ = cone.lines_;
    out.normal_rays_ = cone.rays_;
    return convert(out);
}

PolyhedralCone intersect(const PolyhedralCone& a, const PolyhedralCone& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
    PolyhedralCone ca, cb;
    const auto& ha = halfspaces_of(a, ca);
    const auto& hb = halfspaces_of(b, cb);
    std::vector<Vec> all = ha;
    all.insert(all.end(), hb.begin(), hb.end());
    return convert(PolyhedralCone::from_halfspaces(a.dim(), std::move(all)));
}

PolyhedralCone minkowski_sum(const PolyhedralCone& a, const PolyhedralCone& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
    return conic_hull_of_union({a, b});
}

PolyhedralCone conic_hull_of_union(const std::vector<PolyhedralCone>& cones)
{
    if (cones.empty()) throw std::invalid_argument("conic_hull_of_union: empty list");
    std::vector<Vec> all;
    for (const auto& c : cones) {
        if (c.dim() != cones.front().dim()) throw std::invalid_argument("conic_hull_of_union: dimension mismatch");
        PolyhedralCone holder;
        const auto& g = generators_of(c, holder);
        all.insert(all.end(), g.begin(), g.end());
    }
    return convert(PolyhedralCone::from_generators(cones.front().dim(), std::move(all)));
}

PolyhedralCone product(const PolyhedralCone& a, const PolyhedralCone& b)
{
    const Eigen::Index d = a.dim() + b.dim();
    std::vector<Vec> gens;
    PolyhedralCone ca, cb;
    for (const auto& g : generators_of(a, ca)) {
        Vec v = Vec::Zero(d);
        v.head(a.dim()) = g;
        gens.push_back(v);
    }
    for (const auto& g : generators_of(b, cb)) {
        Vec v = Vec::Zero(d);
        v.tail(b.dim()) = g;
        gens.push_back(v);
    }
    return convert(PolyhedralCone::from_generators(d, std::move(gens)));
}

InteriorResult has_nonempty_interior(const PolyhedralCone& cone)
{
    PolyhedralCone holder;
    const auto& normals = halfspaces_of(cone, holder);
    const Eigen::Index d = cone.dim();
    // x = p - q with p, q >= 0; minimizing sum(p + q) gives a small witness.
    LinearProgram<Rational> lp;
    const int p = lp.add_variables(static_cast<int>(d));
    const int q = lp.add_variables(static_cast<int>(d));
    for (const auto& n : normals) {
        std::vector<LinearProgram<Rational>::Term> terms;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (is_zero(n[i])) continue;
            terms.emplace_back(p + static_cast<int>(i), n[i]);
            terms.emplace_back(q + static_cast<int>(i), -n[i]);
        }
        lp.add_constraint(std::move(terms), Relation::GreaterEqual, Rational(1));
    }
    std::vector<LinearProgram<Rational>::Term> obj;
    for (int i = 0; i < 2 * static_cast<int>(d); ++i) obj.emplace_back(p + i, Rational(1));
    lp.set_objective(Objective::Minimize, std::move(obj));
    auto res = lp.solve();
    InteriorResult out;
    if (res.status != LpStatus::Optimal) return out;
    Vec w(d);
    for (Eigen::Index i = 0; i < d; ++i)
        w[i] = res.x[static_cast<std::size_t>(p + i)] - res.x[static_cast<std::size_t>(q + i)];
    out.nonempty = true;
    out.witness = std::move(w);
    return out;
}

bool contains(const PolyhedralCone& cone, const Vec& x)
{
    if (x.size() != cone.dim()) throw std::invalid_argument("contains: dimension mismatch");
    PolyhedralCone holder;
    const auto& normals = halfspaces_of(cone, holder);
    for (const auto& n : normals)
        if (sign(dot(n, x)) < 0) return false;
    return true;
}

Rational interior_margin(const PolyhedralCone& cone, const Vec& x)
{
    PolyhedralCone holder;
    const auto& normals = halfspaces_of(cone, holder);
    Rational best(0);
    bool first = true;
    for (const auto& n : normals) {
        Rational t = dot(n, x);
        if (first || t < best) best = t;
        first = false;
    }
    return best;
}

bool is_subset(const PolyhedralCone& a, const PolyhedralCone& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("is_subset: dimension mismatch");
    PolyhedralCone ha, hb;
    const auto& gens = generators_of(a, ha);
    const auto& normals = halfspaces_of(b, hb);
    for (const auto& g : gens)
        for (const auto& n : normals)
            if (sign(dot(n, g)) < 0) return false;
    return true;
}

bool same_set(const PolyhedralCone& a, const PolyhedralCone& b)
{
    return is_subset(a, b) && is_subset(b, a);
}

ConeSection normalized_section(const PolyhedralCone& cone, Eigen::Index coord)
{
    ConeSection s;
    s.base = convert(cone);
    s.level_coord = coord;
    for (const auto& g : s.base.generators()) {
        int sg = sign(g[coord]);
        if (sg < 0) throw std::invalid_argument("normalized_section: cone leaves the halfspace x[coord] >= 0");
        if (sg == 0) s.rays.push_back(g);
        else s.vertices.push_back(g / g[coord]);
    }
    std::sort(s.vertices.begin(), s.vertices.end(), lex_less);
    return s;
}

}  // namespace friction
