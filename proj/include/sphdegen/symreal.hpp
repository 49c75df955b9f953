#ifndef SPHDEGEN_SYMREAL_HPP
#define SPHDEGEN_SYMREAL_HPP

#include "sphdegen/rational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sphdegen {

/// A finite list of real "symbols" declared Q-linearly independent. Index 0 is
/// always the rational unit "1". Every other symbol carries a decimal value of
/// known precision; exactness of a symbolic computation never depends on these
/// values, only sign decisions of genuinely irrational quantities do.
class SymBasis {
public:
    struct Symbol {
        std::string name;
        Real value;
        Real abs_err;  // absolute uncertainty of the declared value
    };

    static std::shared_ptr<const SymBasis> rational_only();
    // names/values beyond the implicit leading "1"; value strings are decimal.
    static std::shared_ptr<const SymBasis> make(
        const std::vector<std::pair<std::string, std::string>>& symbols);

    int size() const { return static_cast<int>(syms_.size()); }
    const Symbol& symbol(int i) const { return syms_[i]; }
    int index_of(const std::string& name) const;  // -1 if absent

private:
    std::vector<Symbol> syms_;
};

using SymBasisPtr = std::shared_ptr<const SymBasis>;

/// Element of the Q-vector space spanned by a SymBasis: an exact rational
/// coefficient vector. Arithmetic is exact; sign queries fall back to the
/// declared decimal values with a guard band and throw precision_error when a
/// decision would be within the error budget.
class SymReal {
public:
    SymReal();  // rational zero
    SymReal(const Rat& q);                      // NOLINT: rational embeds
    SymReal(long v) : SymReal(Rat(v)) {}        // NOLINT
    SymReal(SymBasisPtr basis, RatVec coeffs);

    const SymBasisPtr& basis() const { return basis_; }
    const RatVec& coeffs() const { return c_; }

    bool is_rational() const;
    Rat rational() const;  // throws unless is_rational()

    SymReal operator-() const;
    SymReal& operator+=(const SymReal& o);
    SymReal& operator-=(const SymReal& o);
    SymReal& operator*=(const Rat& q);
    friend SymReal operator+(SymReal a, const SymReal& b) { return a += b; }
    friend SymReal operator-(SymReal a, const SymReal& b) { return a -= b; }
    friend SymReal operator*(SymReal a, const Rat& q) { return a *= q; }
    friend SymReal operator*(const Rat& q, SymReal a) { return a *= q; }

    Real value() const;
    double value_double() const;

    int sign() const;  // -1/0/+1; throws precision_error inside the guard band
    bool operator==(const SymReal& o) const { return (*this - o).sign() == 0; }
    bool operator<(const SymReal& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const SymReal& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const SymReal& o) const { return (*this - o).sign() > 0; }
    bool operator>=(const SymReal& o) const { return (*this - o).sign() >= 0; }

    Int floor() const;  // exact for rationals, guarded otherwise

    std::string to_string() const;  // e.g. "3/2*1 + 1*sqrt2"

private:
    void align(const SymReal& o);  // reconcile bases (rational values embed anywhere)
    Real guard() const;

    SymBasisPtr basis_;
    RatVec c_;
};

using SymVec = std::vector<SymReal>;

SymReal sym_dot(const RatVec& a, const SymVec& b);
SymVec sym_vec(SymBasisPtr basis, const std::vector<RatVec>& coeff_rows);

/// Finitely generated subgroup of (R,+) over a SymBasis. Rank decides the
/// discrete/dense dichotomy: rank one groups are delta*Z for a computable
/// delta, higher rank groups are dense in R.
class DiscGroup {
public:
    DiscGroup();  // trivial group {0}
    DiscGroup(SymBasisPtr basis, std::vector<SymReal> generators);

    static DiscGroup integers();  // Z

    const SymBasisPtr& basis() const { return basis_; }
    const std::vector<SymReal>& generators() const { return gens_; }

    int rank() const { return rank_; }
    bool is_discrete() const { return rank_ <= 1; }
    SymReal delta() const;  // positive generator in the rank<=1 case

    // sup{ s in group : s <= t }. Discrete: delta*floor(t/delta); dense: t.
    SymReal sup_leq(const SymReal& t) const;
    bool contains(const SymReal& t) const;  // exact Z-lattice membership
    double max_generator_abs() const;

private:
    SymBasisPtr basis_;
    std::vector<SymReal> gens_;
    int rank_ = 0;
};

}  // namespace sphdegen

#endif
