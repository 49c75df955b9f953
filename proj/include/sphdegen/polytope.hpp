#ifndef SPHDEGEN_POLYTOPE_HPP
#define SPHDEGEN_POLYTOPE_HPP

#include "sphdegen/rational.hpp"
#include "sphdegen/symreal.hpp"

#include <optional>
#include <vector>

namespace sphdegen::polytope {

struct Halfspace {
    RatVec normal;  // <normal, x> <= offset
    Rat offset;
};

/// Extreme rays of the pointed cone { x : <a,x> <= 0 for all a }, by the
/// incremental double description method. Throws validation_error when the
/// cone has a nontrivial lineality space.
std::vector<RatVec> cone_extreme_rays(int dim, const std::vector<RatVec>& normals);

/// Bounded rational polytope carrying both descriptions, kept canonical:
/// vertices are the exact extreme points in lex order, facet normals are
/// primitive integer vectors, the affine hull is stored as equalities.
class RationalPolytope {
public:
    RationalPolytope() = default;  // empty shell; assign before use

    static RationalPolytope from_vertices(int ambient_dim, std::vector<RatVec> vertices);
    static RationalPolytope from_halfspaces(int ambient_dim, const std::vector<Halfspace>& hs);
    // empty intersection yields nullopt instead of throwing
    static std::optional<RationalPolytope> try_from_halfspaces(
        int ambient_dim, const std::vector<Halfspace>& hs);

    int ambient_dim() const { return ambient_; }
    int dim() const { return dim_; }  // dimension of the affine hull
    const std::vector<RatVec>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& facets() const { return facets_; }
    const std::vector<Halfspace>& equalities() const { return equalities_; }
    // facets plus both orientations of every equality
    std::vector<Halfspace> halfspaces() const;

    bool contains(const RatVec& x) const;
    RationalPolytope scaled(const Rat& k) const;
    RationalPolytope intersect(const std::vector<Halfspace>& extra) const;  // may throw on empty
    std::optional<RationalPolytope> try_intersect(const std::vector<Halfspace>& extra) const;

    // basis of the direction space of the affine hull
    const std::vector<RatVec>& span_directions() const { return span_dirs_; }
    // coordinates in the affine hull: x = base_point + U y, y = chart(x)
    RatVec chart(const RatVec& x) const;
    const RatVec& base_point() const { return base_; }

    bool operator==(const RationalPolytope& o) const {
        return ambient_ == o.ambient_ && vertices_ == o.vertices_;
    }

private:
    void canonicalize(std::vector<RatVec> points);

    int ambient_ = 0;
    int dim_ = 0;
    std::vector<RatVec> vertices_;
    std::vector<Halfspace> facets_;
    std::vector<Halfspace> equalities_;
    std::vector<RatVec> span_dirs_;   // columns of U
    RatMat chart_;                    // left inverse: y = chart_ * (x - base_)
    RatVec base_;
};

/// Identity on the underlying set; recomputes both representations.
RationalPolytope dual_description(const RationalPolytope& p);

/// Polyhedral cone with generators (rays + lineality) and a facet/equality
/// description, both kept in sync.
class PolyCone {
public:
    PolyCone() = default;  // empty shell; assign before use

    static PolyCone from_normals(int dim, std::vector<RatVec> normals);  // {x : <n,x> <= 0}
    static PolyCone from_generators(int dim, std::vector<RatVec> rays,
                                    std::vector<RatVec> lineality = {});

    int dim() const { return dim_; }
    const std::vector<RatVec>& rays() const { return rays_; }
    const std::vector<RatVec>& lineality() const { return lineality_; }
    const std::vector<RatVec>& facet_normals() const { return normals_; }
    const std::vector<RatVec>& span_equalities() const { return equalities_; }

    bool is_pointed() const { return lineality_.empty(); }
    bool is_full() const { return normals_.empty() && equalities_.empty(); }
    int cone_dim() const;

    bool contains(const RatVec& x) const;
    // first violated facet normal, if any (equalities checked first)
    std::optional<RatVec> violated_normal(const RatVec& x) const;
    std::optional<RatVec> violated_normal(const SymVec& x) const;

    // polar dual { y : <y,x> <= 0 for all x in the cone }
    PolyCone polar() const;

    bool operator==(const PolyCone& o) const {
        return dim_ == o.dim_ && rays_ == o.rays_ && lineality_ == o.lineality_;
    }

private:
    void canonicalize();

    int dim_ = 0;
    std::vector<RatVec> rays_;
    std::vector<RatVec> lineality_;
    std::vector<RatVec> normals_;
    std::vector<RatVec> equalities_;
};

/// Points of k*P intersected with the affine lattice (lattice + k*chi0),
/// where lattice is spanned by the given integer basis vectors. Exact, lex
/// sorted. chi0 must be rational (enforced by the types).
std::vector<RatVec> lattice_points(const RationalPolytope& p, const Int& k,
                                   const std::vector<RatVec>& lattice_basis,
                                   const RatVec& chi0);

struct AffinePiece {
    SymVec gradient;  // ambient covector
    SymReal constant;
    SymReal eval(const RatVec& x) const;
    double eval_double(const std::vector<double>& x) const;
};

/// Concave piecewise linear function: pointwise min of finitely many affine
/// pieces on a rational polytope. Normalized on construction: duplicate and
/// redundant pieces removed, domains of linearity computed as rational
/// polytopes tiling the domain.
class PLConcave {
public:
    PLConcave() = default;  // empty shell; assign before use

    static PLConcave build(RationalPolytope domain, std::vector<AffinePiece> pieces);

    const RationalPolytope& domain() const { return domain_; }
    const std::vector<AffinePiece>& pieces() const { return pieces_; }
    const std::vector<RationalPolytope>& cells() const { return cells_; }
    bool is_affine() const { return pieces_.size() == 1; }

    SymReal eval(const RatVec& x) const;
    SymReal min_over_domain() const;          // attained at a domain vertex
    RatVec argmin_vertex() const;
    std::vector<RatVec> cell_vertices() const;  // union over cells, lex sorted

    PLConcave shifted(const SymReal& c) const;  // f + c
    PLConcave scaled(const Rat& a) const;       // a * f  (a > 0 preserves concavity/cells)

private:
    RationalPolytope domain_;
    std::vector<AffinePiece> pieces_;
    std::vector<RationalPolytope> cells_;  // cells_[i] is where pieces_[i] attains the min
};

struct GradConeCheck {
    bool ok = true;
    int piece = -1;        // offending piece when !ok
    RatVec violated;       // facet normal of the cone that fails
};

/// Every piece gradient, restricted to the lattice span (pairing against the
/// rows of `restriction`), must lie in V.
GradConeCheck grad_in_cone(const PLConcave& f, const PolyCone& v,
                           const std::vector<RatVec>& restriction);

/// Least concave function above the point constraints (x_i, v_i), realized as
/// the pointwise min of the affine functions carried by the upper facets of
/// the lifted point set. Domain must contain all constraint points.
PLConcave concave_envelope(const RationalPolytope& domain,
                           const std::vector<std::pair<RatVec, Rat>>& points);

}  // namespace sphdegen::polytope

#endif
