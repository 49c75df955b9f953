#ifndef SPHDEGEN_SPHERICAL_HPP
#define SPHDEGEN_SPHERICAL_HPP

#include "sphdegen/lie.hpp"
#include "sphdegen/polytope.hpp"
#include "sphdegen/symreal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sphdegen::spherical {

struct ColourA {
    std::string id;
    int root_index;      // global simple root index in the ambient root system
    RatVec root_vector;  // ambient coordinates of that root; rho(D) = its coroot
};

/// Homogeneous spherical datum: weight lattice basis, spherical roots, the
/// parabolic subset Pi^p and the type-a colours. Types a'/b carry no
/// computational content here and transfer as opaque ids.
struct SphericalDatum {
    std::vector<RatVec> lattice_basis;   // rows: basis of M in ambient coords
    std::vector<RatVec> spherical_roots; // ambient coords, inside span(M)
    std::vector<int> pi_p;               // simple root indices
    std::vector<ColourA> colours_a;
    std::vector<std::string> colours_other;

    int ambient_dim() const {
        return lattice_basis.empty()
                   ? (spherical_roots.empty() ? 0 : static_cast<int>(spherical_roots[0].size()))
                   : static_cast<int>(lattice_basis[0].size());
    }
    int rank() const { return static_cast<int>(lattice_basis.size()); }

    // coefficients of an ambient vector over the lattice basis (exact); throws
    // validation_error when the vector is outside span(M)
    RatVec to_lattice_coords(const RatVec& ambient) const;

    // checks listed structural invariants; the root system argument enables the
    // "spherical roots are nonnegative combinations of simple roots" check
    void validate(const lie::RootSystem* rs = nullptr) const;

    bool operator==(const SphericalDatum& o) const;
};

/// Valuation cone in N_R = Hom(span M, R), coordinates dual to the lattice
/// basis: { x : alpha_i(x) <= 0 } over the spherical roots.
struct ValCone {
    polytope::PolyCone cone;                 // in R^rank
    std::vector<RatVec> root_functionals;    // row i = lattice coords of root i
};

ValCone valuation_cone(const SphericalDatum& d);

struct ConeFace {
    std::vector<int> vanishing;   // indices of spherical roots vanishing on the face
    polytope::PolyCone face;      // the face itself
    RatVec interior_point;        // a rational relative-interior point
};

/// Unique face whose relative interior contains the given covector
/// (coordinates dual to the lattice basis). Throws with the violated root when
/// the covector is outside the cone.
ConeFace face_containing(const ValCone& v, const SymVec& lambda);
ConeFace face_containing(const ValCone& v, const RatVec& lambda);

SphericalDatum central_fibre_datum(const SphericalDatum& d, const SymVec& lambda);
SphericalDatum central_fibre_datum(const SphericalDatum& d, const RatVec& lambda);
// same computation from a face's vanishing set
SphericalDatum central_fibre_datum(const SphericalDatum& d, const std::vector<int>& vanishing);

bool is_horospherical(const SphericalDatum& d, const SymVec& lambda);

/// All faces of the valuation cone with the datum of the corresponding
/// degeneration; one entry per face, deterministic order.
std::vector<std::pair<ConeFace, SphericalDatum>> enumerate_degenerations(
    const SphericalDatum& d);

/// Rational point in the same relative-interior face within distance 1/p of
/// lambda (coordinatewise rounding that certifies the face exactly).
RatVec rational_face_approx(const ValCone& v, const SymVec& lambda, const Int& p);

}  // namespace sphdegen::spherical

#endif
