#ifndef SPHDEGEN_RATIONAL_HPP
#define SPHDEGEN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphdegen {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
// 80 decimal digits ~ 265 bits; comparison budget for symbolic reals.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<80>>;

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;  // rows

struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct unsupported_error : std::runtime_error {
    explicit unsupported_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- scalar helpers ----

Rat parse_rat(const std::string& s);          // "p/q" or decimal "1.25"; throws parse_error
std::string rat_to_string(const Rat& q);      // "p/q" (or "p" when q==1)
double rat_to_double(const Rat& q);
Int floor_rat(const Rat& q);
Int ceil_rat(const Rat& q);

// ---- vector helpers ----

RatVec rat_vec(std::initializer_list<long> xs);
Rat dot(const RatVec& a, const RatVec& b);
RatVec add(const RatVec& a, const RatVec& b);
RatVec sub(const RatVec& a, const RatVec& b);
RatVec scale(const RatVec& a, const Rat& c);
bool is_zero(const RatVec& a);
bool lex_less(const RatVec& a, const RatVec& b);

// Scale to a primitive integer vector; direction preserved (positive multiplier).
RatVec primitive(const RatVec& a);

// ---- exact dense linear algebra (row-major, desk scale) ----

int rank(RatMat a);
// One solution of A x = b, if consistent.
std::optional<RatVec> solve(const RatMat& a, const RatVec& b);
// Basis of { x : A x = 0 }.
RatMat null_space(const RatMat& a, int ncols);
std::optional<RatMat> invert(const RatMat& a);
RatMat transpose(const RatMat& a);
RatVec mat_vec(const RatMat& a, const RatVec& x);

// ---- integer lattice membership ----
// True iff target lies in the Z-span of the columns given as rational vectors
// (denominators are cleared internally; decision is exact via a Hermite form).
bool lattice_contains(const std::vector<RatVec>& gens, const RatVec& target);

}  // namespace sphdegen

#endif
