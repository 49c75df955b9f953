#ifndef SPHDEGEN_RTC_HPP
#define SPHDEGEN_RTC_HPP

#include "sphdegen/lie.hpp"
#include "sphdegen/polytope.hpp"
#include "sphdegen/spherical.hpp"
#include "sphdegen/symreal.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sphdegen::rtc {

/// Equivariant filtration data of a polarized spherical variety: a concave
/// piecewise linear function on the moment polytope (normalized to min 0, the
/// removed offset kept in `shift`), a finitely generated discontinuity group,
/// the lattice shift chi0 and the underlying spherical datum.
struct RTestConfig {
    std::shared_ptr<const lie::RootSystem> root_system;
    spherical::SphericalDatum datum;
    polytope::PLConcave f;
    DiscGroup gamma;
    SymReal shift;
    RatVec chi0;

    const polytope::RationalPolytope& moment_polytope() const { return f.domain(); }
};

/// Normalizes the function (min = 0) and records the shift. When no group is
/// supplied, the group generated by all level-r0 filtration values is used,
/// which yields the reduced-central-fibre configuration.
RTestConfig make_config(std::shared_ptr<const lie::RootSystem> rs,
                        spherical::SphericalDatum datum,
                        polytope::RationalPolytope moment_polytope,
                        std::vector<polytope::AffinePiece> pieces, RatVec chi0,
                        std::optional<DiscGroup> gamma = std::nullopt);

struct Diagnostic {
    std::string invariant;
    std::string witness;
};

/// All structural invariants; empty result means the configuration is valid.
std::vector<Diagnostic> validate(const RTestConfig& cfg);

/// Smallest r0 such that every vertex of a domain of linearity lies in
/// (M + r0*chi0)/r0.
Int vertex_level(const RTestConfig& cfg);

/// Group generated by { r0 f(v) : v vertex of a domain of linearity }.
DiscGroup vertex_group(const RTestConfig& cfg);

/// Group generated by all filtration values at level r0; the discontinuity
/// group of the reduced-central-fibre configuration.
DiscGroup reduced_group(const RTestConfig& cfg);

/// max{ s in gamma : s <= k f(lambda/k) }.
SymReal filtration_point(const RTestConfig& cfg, const RatVec& lambda, const Int& k);

/// k f(lambda/k) itself.
SymReal reduced_filtration_point(const RTestConfig& cfg, const RatVec& lambda, const Int& k);

/// Configuration induced by a covector in the valuation cone:
/// f = Lambda(.) - min over the moment polytope, reduced group.
RTestConfig special_rtc(std::shared_ptr<const lie::RootSystem> rs,
                        const spherical::SphericalDatum& datum,
                        const polytope::RationalPolytope& moment_polytope,
                        const RatVec& chi0, const SymVec& lambda);

/// Irreducible central fibre: exactly one domain of linearity.
bool is_irreducible(const RTestConfig& cfg);

/// Filtration of the normalized d-fold base change of an integral
/// configuration: floor(k d f(lambda/k)).
Int base_change(const RTestConfig& cfg, const Int& d, const RatVec& lambda, const Int& k);

/// p-th term of the approximating sequence: least concave function above the
/// rounded level-p filtration values.
polytope::PLConcave approx_fp(const RTestConfig& cfg, const Int& p);

/// dim F^s R_k: total Weyl dimension of the weights at level k with
/// filtration value >= s.
Int graded_dims(const RTestConfig& cfg, const Int& k, const SymReal& s);

struct FiltrationRow {
    Int k;
    RatVec lambda;
    SymReal value;
};

/// Rows for all levels 0..k_max, lex ordered within a level.
std::vector<FiltrationRow> filtration_table(const RTestConfig& cfg, const Int& k_max);

enum class TailStatus { exact, upper_set, inconclusive };

struct MonoidGenerator {
    lie::Weight weight;
    Int level;
};

struct TailResult {
    TailStatus status;
    std::vector<RatVec> tails;  // lex sorted
};

/// Tails mu with V_{l1+l2-mu} appearing in the product of isotypic components.
/// With an explicit weight monoid the answer is exact (or reported
/// inconclusive); without one, the necessary condition mu in cone(spherical
/// roots) yields an upper set.
TailResult mult_tails(const lie::RootSystem& rs, const spherical::SphericalDatum& datum,
                      const std::optional<std::vector<MonoidGenerator>>& monoid,
                      const lie::Weight& l1, const Int& k1, const lie::Weight& l2,
                      const Int& k2);

}  // namespace sphdegen::rtc

#endif
