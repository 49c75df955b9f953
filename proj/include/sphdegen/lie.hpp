#ifndef SPHDEGEN_LIE_HPP
#define SPHDEGEN_LIE_HPP

#include "sphdegen/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sphdegen::lie {

enum class Family { A, B, C, D, G2 };

Family family_from_string(const std::string& s);
std::string family_to_string(Family f);

struct Factor {
    Family family;
    int rank;
    int offset;       // first ambient coordinate of this factor's block
    int block_dim;    // A_n lives in n+1 coordinates, G2 in 3, B/C/D_n in n
};

/// Weight in ambient coordinates. The ambient space is the concatenation of
/// the factors' standard realizations followed by the central torus block;
/// the invariant pairing is the standard dot product there.
struct Weight {
    RatVec coords;
    bool operator==(const Weight& o) const { return coords == o.coords; }
    bool operator<(const Weight& o) const { return lex_less(coords, o.coords); }
};

/// Reductive root datum: simple factors of type A/B/C/D/G2 plus a central
/// torus on which all roots vanish. Exact rational coordinates throughout.
class RootSystem {
public:
    static RootSystem make(const std::vector<std::pair<Family, int>>& factors, int torus_rank);
    // custom simple roots, validated against the declared families
    static RootSystem make_custom(const std::vector<std::pair<Family, int>>& factors,
                                  int torus_rank, std::vector<RatVec> simple_roots,
                                  RatMat pairing);

    int ambient_dim() const { return ambient_; }
    int torus_rank() const { return torus_rank_; }
    int semisimple_rank() const { return static_cast<int>(simple_roots_.size()); }
    const std::vector<Factor>& factors() const { return factors_; }
    const std::vector<RatVec>& simple_roots() const { return simple_roots_; }

    Rat pair(const RatVec& a, const RatVec& b) const;
    // <v, alpha^vee> = 2 <v, alpha> / <alpha, alpha>
    Rat coroot_pair(const RatVec& v, const RatVec& alpha) const;

    const std::vector<Weight>& positive_roots() const { return positive_roots_; }
    const Weight& rho() const { return rho_; }  // half the sum of positive roots

    bool is_dominant(const Weight& w) const;
    Weight weight_from_fundamental(const RatVec& coeffs_and_torus) const;
    RatVec fundamental_coords(const Weight& w) const;  // values <w, alpha_i^vee>

    void validate() const;  // Cartan data / closure sanity, throws validation_error

private:
    void finish();  // positive roots, rho, fundamental weights

    int ambient_ = 0;
    int torus_rank_ = 0;
    std::vector<Factor> factors_;
    std::vector<RatVec> simple_roots_;
    RatMat pairing_;  // positive definite symmetric
    std::vector<Weight> positive_roots_;
    Weight rho_;
    std::vector<RatVec> fundamental_;  // one ambient representative per simple root
};

/// Exact Weyl dimension: product over the given positive roots of
/// <alpha, rho + lambda> / <alpha, rho>. With the full positive system this is
/// dim V_lambda; a restricted set is used when orthogonal factors cancel.
Int weyl_dim(const RootSystem& rs, const Weight& lambda,
             const std::optional<std::vector<Weight>>& restrict_roots = std::nullopt);

/// Isotypic decomposition of V_{l1} (x) V_{l2} by the Racah-Speiser/Klimyk
/// signed-orbit rule. Supported up to semisimple rank 3.
std::map<Weight, Int> tensor_decompose(const RootSystem& rs, const Weight& l1,
                                       const Weight& l2);

/// Weight system of V_lambda: dominant weights with Freudenthal
/// multiplicities, expanded over Weyl orbits.
std::map<Weight, Int> weight_system(const RootSystem& rs, const Weight& lambda);

/// Number of integral Gelfand-Tsetlin patterns with top row lambda. Only type
/// A factors (with trivial torus charge allowed) are supported.
Int gt_lattice_points(const RootSystem& rs, const Weight& lambda);

}  // namespace sphdegen::lie

#endif
