#include "sphdegen/polytope.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

namespace sphdegen::polytope {

namespace {

using Mask = std::vector<std::uint64_t>;

Mask mask_make(std::size_t nbits) { return Mask((nbits + 63) / 64, 0); }
void mask_set(Mask& m, std::size_t i) { m[i / 64] |= (std::uint64_t{1} << (i % 64)); }
Mask mask_and(const Mask& a, const Mask& b) {
    Mask r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
    return r;
}
bool mask_subset(const Mask& a, const Mask& b) {  // a subset of b
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((a[i] & ~b[i]) != 0) return false;
    return true;
}

struct Ray {
    RatVec v;
    Mask zero;  // processed inequalities tight at this ray
};

// Incremental double description for a pointed cone {x : <a_i,x> <= 0}.
// Requires the normals to span R^dim (checked by the caller).
std::vector<Ray> dd_rays(int dim, const std::vector<RatVec>& normals) {
    std::size_t m = normals.size();
    // initial simplicial cone from dim independent normals
    std::vector<int> basis_idx;
    {
        RatMat rows;
        for (std::size_t i = 0; i < m && static_cast<int>(basis_idx.size()) < dim; ++i) {
            rows.push_back(normals[i]);
            if (rank(rows) == static_cast<int>(rows.size()))
                basis_idx.push_back(static_cast<int>(i));
            else
                rows.pop_back();
        }
    }
    if (static_cast<int>(basis_idx.size()) != dim)
        throw validation_error("cone has a nontrivial lineality space");

    RatMat ab;
    for (int i : basis_idx) ab.push_back(normals[i]);
    auto inv = invert(ab);
    if (!inv) throw std::logic_error("dd_rays: singular initial basis");

    std::vector<Ray> rays;
    std::vector<bool> in_basis(m, false);
    for (int i : basis_idx) in_basis[i] = true;
    for (int k = 0; k < dim; ++k) {
        Ray r;
        r.v.resize(dim);
        for (int i = 0; i < dim; ++i) r.v[i] = -(*inv)[i][k];
        r.v = primitive(r.v);
        r.zero = mask_make(m);
        for (int j = 0; j < dim; ++j)
            if (j != k) mask_set(r.zero, basis_idx[j]);
        rays.push_back(std::move(r));
    }

    for (std::size_t ineq = 0; ineq < m; ++ineq) {
        if (in_basis[ineq]) continue;
        const RatVec& a = normals[ineq];
        std::vector<Rat> val(rays.size());
        bool any_pos = false;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(a, rays[i].v);
            if (val[i] > 0) any_pos = true;
        }
        if (!any_pos) {
            for (std::size_t i = 0; i < rays.size(); ++i)
                if (val[i] == 0) mask_set(rays[i].zero, ineq);
            continue;
        }
        std::vector<Ray> next;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (val[i] > 0) continue;
            Ray r = rays[i];
            if (val[i] == 0) mask_set(r.zero, ineq);
            next.push_back(std::move(r));
        }
        // combine adjacent (negative, positive) pairs onto the hyperplane
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (val[i] >= 0) continue;
            for (std::size_t j = 0; j < rays.size(); ++j) {
                if (val[j] <= 0) continue;
                Mask common = mask_and(rays[i].zero, rays[j].zero);
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size(); ++k) {
                    if (k == i || k == j) continue;
                    if (mask_subset(common, rays[k].zero)) { adjacent = false; break; }
                }
                if (!adjacent) continue;
                Ray nr;
                nr.v.resize(dim);
                for (int t = 0; t < dim; ++t)
                    nr.v[t] = val[j] * rays[i].v[t] - val[i] * rays[j].v[t];
                nr.v = primitive(nr.v);
                nr.zero = common;
                mask_set(nr.zero, ineq);
                next.push_back(std::move(nr));
            }
        }
        rays = std::move(next);
        if (rays.empty()) break;  // cone collapsed to the origin
    }
    std::sort(rays.begin(), rays.end(),
              [](const Ray& x, const Ray& y) { return lex_less(x.v, y.v); });
    rays.erase(std::unique(rays.begin(), rays.end(),
                           [](const Ray& x, const Ray& y) { return x.v == y.v; }),
               rays.end());
    return rays;
}

struct ConeGens {
    std::vector<RatVec> rays;
    std::vector<RatVec> lineality;
};

// Generators of {x : <a,x> <= 0 for all a}, lineality handled via the
// orthogonal decomposition R^d = ker(A) + rowspace(A).
ConeGens cone_generators(int dim, const std::vector<RatVec>& normals_in) {
    std::vector<RatVec> normals;
    for (const auto& n : normals_in)
        if (!is_zero(n)) normals.push_back(n);
    ConeGens out;
    if (normals.empty()) {
        for (int i = 0; i < dim; ++i) {
            RatVec e(dim, Rat(0));
            e[i] = 1;
            out.lineality.push_back(std::move(e));
        }
        return out;
    }
    RatMat a(normals.begin(), normals.end());
    out.lineality = null_space(a, dim);
    for (auto& l : out.lineality) l = primitive(l);

    // transversal basis: a maximal independent subset of the normals
    RatMat tbasis;
    for (const auto& n : normals) {
        tbasis.push_back(n);
        if (rank(tbasis) != static_cast<int>(tbasis.size())) tbasis.pop_back();
    }
    int q = static_cast<int>(tbasis.size());
    std::vector<RatVec> reduced;  // constraints in transversal coordinates
    for (const auto& n : normals) {
        RatVec row(q);
        for (int j = 0; j < q; ++j) row[j] = dot(n, tbasis[j]);
        reduced.push_back(std::move(row));
    }
    for (const auto& ray : dd_rays(q, reduced)) {
        RatVec x(dim, Rat(0));
        for (int j = 0; j < q; ++j)
            for (int t = 0; t < dim; ++t) x[t] += ray.v[j] * tbasis[j][t];
        out.rays.push_back(primitive(x));
    }
    std::sort(out.rays.begin(), out.rays.end(), lex_less);
    std::sort(out.lineality.begin(), out.lineality.end(), lex_less);
    return out;
}

std::vector<RatVec> with_negations(const std::vector<RatVec>& rays,
                                   const std::vector<RatVec>& lin) {
    std::vector<RatVec> all = rays;
    for (const auto& l : lin) {
        all.push_back(l);
        all.push_back(scale(l, Rat(-1)));
    }
    return all;
}

Halfspace normalize_halfspace(RatVec n, Rat b) {
    RatVec joint = n;
    joint.push_back(b);
    joint = primitive(joint);
    Rat off = joint.back();
    joint.pop_back();
    return Halfspace{std::move(joint), std::move(off)};
}

// Pull a linear functional on hull coordinates back to the ambient space:
// <ny, chart(x)> = <func, x> - <func, base>, since chart(x) = C (x - base).
RatVec lift_hull_functional(const RationalPolytope& dom, const RatVec& ny) {
    int d = dom.ambient_dim();
    RatVec func(d, Rat(0));
    for (int i = 0; i < d; ++i) {
        RatVec probe = dom.base_point();
        probe[i] += 1;
        RatVec col = dom.chart(probe);  // = C e_i, as chart(base) = 0
        Rat s = 0;
        for (int t = 0; t < dom.dim(); ++t) s += ny[t] * col[t];
        func[i] = s;
    }
    return func;
}

bool hs_less(const Halfspace& a, const Halfspace& b) {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
}

}  // namespace

std::vector<RatVec> cone_extreme_rays(int dim, const std::vector<RatVec>& normals) {
    std::vector<RatVec> nz;
    for (const auto& n : normals)
        if (!is_zero(n)) nz.push_back(n);
    std::vector<RatVec> out;
    for (const auto& r : dd_rays(dim, nz)) out.push_back(r.v);
    return out;
}

// ---- RationalPolytope ----

void RationalPolytope::canonicalize(std::vector<RatVec> points) {
    std::sort(points.begin(), points.end(), lex_less);
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.empty()) throw validation_error("polytope has no points");
    int d = ambient_;
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != d)
            throw std::invalid_argument("polytope: point dimension mismatch");

    base_ = points.front();
    // affine hull directions by Gaussian elimination over the differences
    RatMat dirs;
    for (std::size_t i = 1; i < points.size(); ++i) {
        dirs.push_back(sub(points[i], base_));
        if (rank(dirs) != static_cast<int>(dirs.size())) dirs.pop_back();
    }
    span_dirs_ = dirs;
    dim_ = static_cast<int>(dirs.size());

    // chart = (U^T U)^{-1} U^T, exact left inverse of the direction matrix
    chart_.clear();
    if (dim_ > 0) {
        RatMat gram(dim_, RatVec(dim_));
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) gram[i][j] = dot(span_dirs_[i], span_dirs_[j]);
        auto ginv = invert(gram);
        if (!ginv) throw std::logic_error("degenerate Gram matrix");
        chart_.assign(dim_, RatVec(d, Rat(0)));
        for (int i = 0; i < dim_; ++i)
            for (int t = 0; t < d; ++t) {
                Rat s = 0;
                for (int j = 0; j < dim_; ++j) s += (*ginv)[i][j] * span_dirs_[j][t];
                chart_[i][t] = s;
            }
    }

    // affine hull as equalities
    equalities_.clear();
    {
        RatMat rows = span_dirs_;
        for (auto& e : null_space(rows, d)) {
            e = primitive(e);
            equalities_.push_back(normalize_halfspace(e, dot(e, base_)));
        }
        std::sort(equalities_.begin(), equalities_.end(), hs_less);
    }

    facets_.clear();
    if (dim_ > 0) {
        // facets from the cone of valid inequalities in hull coordinates
        std::vector<RatVec> lifted;
        for (const auto& p : points) {
            RatVec y = chart(p);
            y.push_back(Rat(-1));
            lifted.push_back(std::move(y));
        }
        for (const auto& ray : cone_extreme_rays(dim_ + 1, lifted)) {
            RatVec a(ray.begin(), ray.end() - 1);
            Rat c = ray.back();
            if (is_zero(a)) continue;
            RatVec n(d, Rat(0));
            for (int i = 0; i < dim_; ++i)
                for (int t = 0; t < d; ++t) n[t] += a[i] * chart_[i][t];
            Rat off = c + dot(n, base_);
            facets_.push_back(normalize_halfspace(std::move(n), std::move(off)));
        }
        std::sort(facets_.begin(), facets_.end(), hs_less);
        facets_.erase(std::unique(facets_.begin(), facets_.end(),
                                  [](const Halfspace& x, const Halfspace& y) {
                                      return x.normal == y.normal && x.offset == y.offset;
                                  }),
                      facets_.end());
    }

    // extreme points: tight facet normals must span the hull directions
    vertices_.clear();
    for (const auto& p : points) {
        if (dim_ == 0) { vertices_.push_back(p); break; }
        RatMat tight;
        for (const auto& f : facets_)
            if (dot(f.normal, p) == f.offset) {
                RatVec row(dim_);
                for (int i = 0; i < dim_; ++i) row[i] = dot(f.normal, span_dirs_[i]);
                tight.push_back(std::move(row));
            }
        if (rank(tight) == dim_) vertices_.push_back(p);
    }
    std::sort(vertices_.begin(), vertices_.end(), lex_less);
}

RationalPolytope RationalPolytope::from_vertices(int ambient_dim, std::vector<RatVec> vertices) {
    RationalPolytope p;
    p.ambient_ = ambient_dim;
    p.canonicalize(std::move(vertices));
    return p;
}

std::optional<RationalPolytope> RationalPolytope::try_from_halfspaces(
    int ambient_dim, const std::vector<Halfspace>& hs) {
    int d = ambient_dim;
    std::vector<RatVec> normals;
    for (const auto& h : hs) {
        RatVec n = h.normal;
        if (static_cast<int>(n.size()) != d)
            throw std::invalid_argument("halfspace dimension mismatch");
        n.push_back(-h.offset);
        normals.push_back(std::move(n));
    }
    {
        RatVec t(d + 1, Rat(0));
        t.back() = -1;
        normals.push_back(std::move(t));
    }
    if (rank(RatMat(normals.begin(), normals.end())) != d + 1)
        throw validation_error("halfspace system is unbounded or empty in some direction");
    std::vector<RatVec> rays;
    try {
        rays = cone_extreme_rays(d + 1, normals);
    } catch (const validation_error&) {
        throw validation_error("halfspace system is unbounded");
    }
    std::vector<RatVec> verts;
    bool saw_recession = false;
    for (const auto& r : rays) {
        if (r.back() == 0) { saw_recession = true; continue; }
        RatVec v(d);
        for (int i = 0; i < d; ++i) v[i] = r[i] / r.back();
        verts.push_back(std::move(v));
    }
    if (saw_recession && !verts.empty())
        throw validation_error("halfspace system describes an unbounded region");
    if (verts.empty()) return std::nullopt;
    return from_vertices(d, std::move(verts));
}

RationalPolytope RationalPolytope::from_halfspaces(int ambient_dim,
                                                   const std::vector<Halfspace>& hs) {
    auto p = try_from_halfspaces(ambient_dim, hs);
    if (!p) throw validation_error("halfspace system has empty intersection");
    return *std::move(p);
}

std::vector<Halfspace> RationalPolytope::halfspaces() const {
    std::vector<Halfspace> out = facets_;
    for (const auto& e : equalities_) {
        out.push_back(e);
        out.push_back(Halfspace{scale(e.normal, Rat(-1)), -e.offset});
    }
    return out;
}

bool RationalPolytope::contains(const RatVec& x) const {
    for (const auto& e : equalities_)
        if (dot(e.normal, x) != e.offset) return false;
    for (const auto& f : facets_)
        if (dot(f.normal, x) > f.offset) return false;
    return true;
}

RationalPolytope RationalPolytope::scaled(const Rat& k) const {
    std::vector<RatVec> vs;
    for (const auto& v : vertices_) vs.push_back(scale(v, k));
    return from_vertices(ambient_, std::move(vs));
}

std::optional<RationalPolytope> RationalPolytope::try_intersect(
    const std::vector<Halfspace>& extra) const {
    std::vector<Halfspace> hs = halfspaces();
    hs.insert(hs.end(), extra.begin(), extra.end());
    return try_from_halfspaces(ambient_, hs);
}

RationalPolytope RationalPolytope::intersect(const std::vector<Halfspace>& extra) const {
    auto p = try_intersect(extra);
    if (!p) throw validation_error("empty intersection");
    return *std::move(p);
}

RatVec RationalPolytope::chart(const RatVec& x) const {
    RatVec rel = sub(x, base_);
    RatVec y(dim_);
    for (int i = 0; i < dim_; ++i) y[i] = dot(chart_[i], rel);
    return y;
}

RationalPolytope dual_description(const RationalPolytope& p) {
    return RationalPolytope::from_vertices(p.ambient_dim(), p.vertices());
}

// ---- PolyCone ----

void PolyCone::canonicalize() {
    std::sort(rays_.begin(), rays_.end(), lex_less);
    std::sort(lineality_.begin(), lineality_.end(), lex_less);
    std::sort(normals_.begin(), normals_.end(), lex_less);
    std::sort(equalities_.begin(), equalities_.end(), lex_less);
}

PolyCone PolyCone::from_normals(int dim, std::vector<RatVec> normals) {
    PolyCone c;
    c.dim_ = dim;
    ConeGens g = cone_generators(dim, normals);
    c.rays_ = g.rays;
    c.lineality_ = g.lineality;
    ConeGens polar_g = cone_generators(dim, with_negations(g.rays, g.lineality));
    c.normals_ = polar_g.rays;
    c.equalities_ = polar_g.lineality;
    c.canonicalize();
    return c;
}

PolyCone PolyCone::from_generators(int dim, std::vector<RatVec> rays,
                                   std::vector<RatVec> lineality) {
    PolyCone c;
    c.dim_ = dim;
    ConeGens polar_g = cone_generators(dim, with_negations(rays, lineality));
    c.normals_ = polar_g.rays;
    c.equalities_ = polar_g.lineality;
    ConeGens g = cone_generators(dim, with_negations(c.normals_, c.equalities_));
    c.rays_ = g.rays;
    c.lineality_ = g.lineality;
    c.canonicalize();
    return c;
}

int PolyCone::cone_dim() const {
    if (equalities_.empty()) return dim_;
    RatMat rows(equalities_.begin(), equalities_.end());
    return dim_ - rank(rows);
}

bool PolyCone::contains(const RatVec& x) const { return !violated_normal(x).has_value(); }

std::optional<RatVec> PolyCone::violated_normal(const RatVec& x) const {
    for (const auto& e : equalities_)
        if (dot(e, x) != 0) return e;
    for (const auto& n : normals_)
        if (dot(n, x) > 0) return n;
    return std::nullopt;
}

std::optional<RatVec> PolyCone::violated_normal(const SymVec& x) const {
    for (const auto& e : equalities_)
        if (sym_dot(e, x).sign() != 0) return e;
    for (const auto& n : normals_)
        if (sym_dot(n, x).sign() > 0) return n;
    return std::nullopt;
}

PolyCone PolyCone::polar() const {
    return from_generators(dim_, normals_, equalities_);
}

// ---- lattice points ----

std::vector<RatVec> lattice_points(const RationalPolytope& p, const Int& k,
                                   const std::vector<RatVec>& lattice_basis,
                                   const RatVec& chi0) {
    int d = p.ambient_dim();
    if (k <= 0) throw std::invalid_argument("lattice_points: level must be positive");
    int r = static_cast<int>(lattice_basis.size());
    if (r > 0 && rank(RatMat(lattice_basis.begin(), lattice_basis.end())) != r)
        throw std::invalid_argument("lattice_points: basis is not full rank");
    RationalPolytope kp = p.scaled(Rat(k));
    RatVec shift = scale(chi0, Rat(k));

    if (r == 0)
        return kp.contains(shift) ? std::vector<RatVec>{shift} : std::vector<RatVec>{};

    std::vector<Halfspace> zs;
    for (const auto& h : kp.halfspaces()) {
        RatVec row(r);
        for (int j = 0; j < r; ++j) row[j] = dot(h.normal, lattice_basis[j]);
        Rat rhs = h.offset - dot(h.normal, shift);
        if (is_zero(row)) {
            if (rhs < 0) return {};
            continue;
        }
        zs.push_back(Halfspace{std::move(row), std::move(rhs)});
    }
    auto q = RationalPolytope::try_from_halfspaces(r, zs);
    if (!q) return {};

    std::vector<Int> lo(r), hi(r);
    for (int j = 0; j < r; ++j) {
        Rat mn = q->vertices().front()[j], mx = mn;
        for (const auto& v : q->vertices()) {
            mn = std::min(mn, v[j]);
            mx = std::max(mx, v[j]);
        }
        lo[j] = ceil_rat(mn);
        hi[j] = floor_rat(mx);
        if (lo[j] > hi[j]) return {};
    }

    std::vector<RatVec> out;
    std::vector<Int> z(r);
    auto hs = q->halfspaces();
    std::function<void(int)> rec = [&](int j) {
        if (j == r) {
            RatVec zq(r);
            for (int t = 0; t < r; ++t) zq[t] = Rat(z[t]);
            for (const auto& h : hs)
                if (dot(h.normal, zq) > h.offset) return;
            RatVec x = shift;
            for (int t = 0; t < r; ++t)
                for (int i = 0; i < d; ++i) x[i] += zq[t] * lattice_basis[t][i];
            out.push_back(std::move(x));
            return;
        }
        for (Int v = lo[j]; v <= hi[j]; ++v) {
            z[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

// ---- PLConcave ----

SymReal AffinePiece::eval(const RatVec& x) const {
    SymReal s = constant;
    for (std::size_t i = 0; i < gradient.size(); ++i) s += gradient[i] * x[i];
    return s;
}

double AffinePiece::eval_double(const std::vector<double>& x) const {
    double s = constant.value_double();
    for (std::size_t i = 0; i < gradient.size(); ++i)
        s += gradient[i].value_double() * x[i];
    return s;
}

namespace {

// Restriction of a piece to the affine hull: gradient in chart coordinates
// followed by the value at the base point.
SymVec hull_form(const RationalPolytope& dom, const AffinePiece& p) {
    SymVec form;
    for (const auto& u : dom.span_directions()) form.push_back(sym_dot(u, p.gradient));
    form.push_back(p.eval(dom.base_point()));
    return form;
}

bool sym_vec_equal(const SymVec& a, const SymVec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        SymReal d = a[i] - b[i];
        if (!d.is_rational() || d.rational() != 0) return false;
    }
    return true;
}

// A halfspace with symbolic coefficients is usable only if some positive real
// multiple of it is rational. Returns the rationalized (normal, rhs), with the
// inequality direction already fixed.
std::optional<std::pair<RatVec, Rat>> rationalize_halfspace(const SymVec& w) {
    std::size_t L = w.size();
    int t0 = -1;
    for (std::size_t t = 0; t < L; ++t)
        if (!(w[t].is_rational() && w[t].rational() == 0)) { t0 = static_cast<int>(t); break; }
    if (t0 < 0) return std::make_pair(RatVec(L - 1, Rat(0)), Rat(0));  // trivial 0 <= 0
    const RatVec& v = w[t0].coeffs();
    int j0 = 0;
    while (v[j0] == 0) ++j0;
    RatVec q(L);
    for (std::size_t t = 0; t < L; ++t) {
        const RatVec& c = w[t].coeffs();
        Rat qt;
        if (w[t].basis() == w[t0].basis()) {
            qt = c[j0] / v[j0];
            RatVec resid = sub(c, scale(v, qt));
            if (!is_zero(resid)) return std::nullopt;
        } else {
            // rational value over the trivial basis
            if (!w[t].is_rational()) return std::nullopt;
            if (w[t].rational() == 0) { q[t] = 0; continue; }
            if (!w[t0].is_rational()) return std::nullopt;
            qt = w[t].rational() / w[t0].rational();
        }
        q[t] = qt;
    }
    int s = w[t0].sign();
    if (s == 0) throw std::logic_error("rationalize_halfspace: zero pivot");
    if (s < 0)
        for (auto& x : q) x = -x;
    Rat rhs = q.back();
    q.pop_back();
    return std::make_pair(std::move(q), std::move(rhs));
}

}  // namespace

PLConcave PLConcave::build(RationalPolytope domain, std::vector<AffinePiece> pieces) {
    if (pieces.empty()) throw std::invalid_argument("PLConcave: no pieces");
    int d = domain.ambient_dim();
    for (const auto& p : pieces)
        if (static_cast<int>(p.gradient.size()) != d)
            throw std::invalid_argument("PLConcave: gradient dimension mismatch");

    // dedupe pieces that agree on the affine hull of the domain
    std::vector<AffinePiece> uniq;
    std::vector<SymVec> forms;
    for (auto& p : pieces) {
        SymVec f = hull_form(domain, p);
        bool dup = false;
        for (const auto& g : forms)
            if (sym_vec_equal(f, g)) { dup = true; break; }
        if (!dup) {
            forms.push_back(std::move(f));
            uniq.push_back(std::move(p));
        }
    }

    // first pass: a piece survives if it attains the min on a full-dim cell
    auto cell_of = [&](std::size_t i, const std::vector<AffinePiece>& ps,
                       const std::vector<SymVec>& fs) -> std::optional<RationalPolytope> {
        std::vector<Halfspace> cuts;
        for (std::size_t j = 0; j < ps.size(); ++j) {
            if (j == i) continue;
            // piece_i <= piece_j on the hull: <f_i - f_j, (y,1)> <= 0
            SymVec wdiff;
            for (std::size_t t = 0; t < fs[i].size(); ++t)
                wdiff.push_back(fs[i][t] - fs[j][t]);
            auto rat = rationalize_halfspace(wdiff);
            if (!rat)
                throw validation_error(
                    "domains of linearity are not rational polytopes (pieces " +
                    std::to_string(i) + "," + std::to_string(j) + ")");
            auto [ny, rhs] = *rat;
            if (is_zero(ny)) {
                if (rhs < 0) return std::nullopt;  // piece_i > piece_j everywhere
                continue;
            }
            RatVec func = lift_hull_functional(domain, ny);
            Rat off = rhs + dot(func, domain.base_point());
            cuts.push_back(Halfspace{std::move(func), std::move(off)});
        }
        return domain.try_intersect(cuts);
    };

    std::vector<AffinePiece> kept;
    std::vector<SymVec> kept_forms;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        auto cell = cell_of(i, uniq, forms);
        if (cell && cell->dim() == domain.dim()) {
            kept.push_back(uniq[i]);
            kept_forms.push_back(forms[i]);
        }
    }
    if (kept.empty())  // all ties; keep the first piece
        { kept.push_back(uniq.front()); kept_forms.push_back(forms.front()); }

    PLConcave f;
    f.domain_ = std::move(domain);
    f.pieces_ = kept;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        auto cell = cell_of(i, kept, kept_forms);
        if (!cell) throw std::logic_error("PLConcave: surviving piece lost its cell");
        f.cells_.push_back(*std::move(cell));
    }
    return f;
}

SymReal PLConcave::eval(const RatVec& x) const {
    SymReal best = pieces_.front().eval(x);
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        SymReal v = pieces_[i].eval(x);
        if (v < best) best = v;
    }
    return best;
}

SymReal PLConcave::min_over_domain() const {
    const auto& vs = domain_.vertices();
    SymReal best = eval(vs.front());
    for (std::size_t i = 1; i < vs.size(); ++i) {
        SymReal v = eval(vs[i]);
        if (v < best) best = v;
    }
    return best;
}

RatVec PLConcave::argmin_vertex() const {
    const auto& vs = domain_.vertices();
    RatVec arg = vs.front();
    SymReal best = eval(arg);
    for (std::size_t i = 1; i < vs.size(); ++i) {
        SymReal v = eval(vs[i]);
        if (v < best) { best = v; arg = vs[i]; }
    }
    return arg;
}

std::vector<RatVec> PLConcave::cell_vertices() const {
    std::vector<RatVec> out;
    for (const auto& c : cells_)
        out.insert(out.end(), c.vertices().begin(), c.vertices().end());
    std::sort(out.begin(), out.end(), lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PLConcave PLConcave::shifted(const SymReal& c) const {
    PLConcave f(*this);
    for (auto& p : f.pieces_) p.constant += c;
    return f;
}

PLConcave PLConcave::scaled(const Rat& a) const {
    if (a <= 0) throw std::invalid_argument("PLConcave::scaled: factor must be positive");
    PLConcave f(*this);
    for (auto& p : f.pieces_) {
        for (auto& g : p.gradient) g *= a;
        p.constant *= a;
    }
    return f;
}

GradConeCheck grad_in_cone(const PLConcave& f, const PolyCone& v,
                           const std::vector<RatVec>& restriction) {
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
        SymVec ell;
        for (const auto& m : restriction) ell.push_back(sym_dot(m, f.pieces()[i].gradient));
        auto bad = v.violated_normal(ell);
        if (bad) return GradConeCheck{false, static_cast<int>(i), *bad};
    }
    return GradConeCheck{};
}

PLConcave concave_envelope(const RationalPolytope& domain,
                           const std::vector<std::pair<RatVec, Rat>>& points) {
    if (points.empty()) throw std::invalid_argument("concave_envelope: no points");
    int d = domain.ambient_dim();
    int q = domain.dim();
    for (const auto& [x, v] : points)
        if (!domain.contains(x))
            throw std::invalid_argument("concave_envelope: point outside domain");

    if (q == 0) {
        Rat best = points.front().second;
        for (const auto& [x, v] : points) best = std::max(best, v);
        AffinePiece p{SymVec(d, SymReal(Rat(0))), SymReal(best)};
        return PLConcave::build(domain, {p});
    }

    // constraint points must span the hull, otherwise the least concave
    // majorant is unbounded below on the domain
    {
        RatMat dirs;
        const RatVec& x0 = points.front().first;
        for (std::size_t i = 1; i < points.size(); ++i) {
            dirs.push_back(sub(points[i].first, x0));
            if (rank(dirs) != static_cast<int>(dirs.size())) dirs.pop_back();
        }
        if (static_cast<int>(dirs.size()) != q)
            throw numeric_error("concave_envelope: constraint points do not span the domain");
    }

    std::vector<RatVec> lifted;
    Rat vmin = points.front().second;
    for (const auto& [x, v] : points) vmin = std::min(vmin, v);
    for (const auto& [x, v] : points) {
        RatVec y = domain.chart(x);
        RatVec a = y; a.push_back(v);
        RatVec b = std::move(y); b.push_back(vmin - 1);
        lifted.push_back(std::move(a));
        lifted.push_back(std::move(b));
    }
    RationalPolytope hull = RationalPolytope::from_vertices(q + 1, lifted);

    std::vector<AffinePiece> pieces;
    for (const auto& fct : hull.facets()) {
        const Rat& alast = fct.normal.back();
        if (alast <= 0) continue;  // only upper facets carry the envelope
        // v <= (offset - <a, y>) / alast
        RatVec gy(q);
        for (int t = 0; t < q; ++t) gy[t] = -fct.normal[t] / alast;
        Rat cy = fct.offset / alast;
        RatVec g = lift_hull_functional(domain, gy);
        Rat c = cy - dot(g, domain.base_point());
        SymVec sg;
        for (const auto& x : g) sg.emplace_back(x);
        pieces.push_back(AffinePiece{std::move(sg), SymReal(c)});
    }
    if (pieces.empty()) throw std::logic_error("concave_envelope: no upper facets");
    return PLConcave::build(domain, std::move(pieces));
}

}  // namespace sphdegen::polytope
