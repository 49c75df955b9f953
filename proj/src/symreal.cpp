#include "sphdegen/symreal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace sphdegen {

namespace {

Real decimal_abs_err(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return Real(0);
    int frac_digits = 0;
    for (std::size_t i = dot + 1; i < s.size(); ++i)
        if (s[i] >= '0' && s[i] <= '9') ++frac_digits;
    Real e = 1;
    for (int i = 0; i < frac_digits; ++i) e /= 10;
    return e;
}

}  // namespace

std::shared_ptr<const SymBasis> SymBasis::rational_only() {
    static std::shared_ptr<const SymBasis> inst = [] {
        auto b = std::make_shared<SymBasis>();
        b->syms_.push_back({"1", Real(1), Real(0)});
        return std::shared_ptr<const SymBasis>(b);
    }();
    return inst;
}

std::shared_ptr<const SymBasis> SymBasis::make(
    const std::vector<std::pair<std::string, std::string>>& symbols) {
    auto b = std::make_shared<SymBasis>();
    b->syms_.push_back({"1", Real(1), Real(0)});
    for (const auto& [name, value] : symbols) {
        if (name == "1") {
            if (parse_rat(value) != 1)
                throw validation_error("basis symbol \"1\" must have value 1");
            continue;
        }
        if (b->index_of(name) >= 0)
            throw validation_error("duplicate basis symbol: " + name);
        Real v;
        try {
            v = Real(value);
        } catch (const std::exception&) {
            throw parse_error("bad decimal value for symbol " + name + ": " + value);
        }
        b->syms_.push_back({name, v, decimal_abs_err(value)});
    }
    return b;
}

int SymBasis::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (syms_[i].name == name) return i;
    return -1;
}

SymReal::SymReal() : basis_(SymBasis::rational_only()), c_{Rat(0)} {}

SymReal::SymReal(const Rat& q) : basis_(SymBasis::rational_only()), c_{q} {}

SymReal::SymReal(SymBasisPtr basis, RatVec coeffs)
    : basis_(std::move(basis)), c_(std::move(coeffs)) {
    if (static_cast<int>(c_.size()) != basis_->size())
        throw std::invalid_argument("SymReal: coefficient count != basis size");
}

bool SymReal::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Rat SymReal::rational() const {
    if (!is_rational())
        throw precision_error("value is not rational: " + to_string());
    return c_[0];
}

void SymReal::align(const SymReal& o) {
    if (basis_ == o.basis_) return;
    if (is_rational() && basis_->size() == 1) {
        Rat q = c_[0];
        basis_ = o.basis_;
        c_.assign(basis_->size(), Rat(0));
        c_[0] = q;
        return;
    }
    if (o.is_rational() && o.basis_->size() == 1) return;  // handled by caller widening o
    throw std::invalid_argument("SymReal: mixing distinct symbol bases");
}

SymReal SymReal::operator-() const {
    SymReal r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
}

SymReal& SymReal::operator+=(const SymReal& o) {
    if (basis_ != o.basis_) {
        align(o);
        if (basis_ != o.basis_) {  // o is plain rational
            c_[0] += o.c_[0];
            return *this;
        }
    }
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SymReal& SymReal::operator-=(const SymReal& o) { return *this += -o; }

SymReal& SymReal::operator*=(const Rat& q) {
    for (auto& x : c_) x *= q;
    return *this;
}

Real SymReal::value() const {
    Real v = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        Real coef = Real(numerator(c_[i]).str()) / Real(denominator(c_[i]).str());
        v += coef * basis_->symbol(static_cast<int>(i)).value;
    }
    return v;
}

double SymReal::value_double() const { return value().convert_to<double>(); }

Real SymReal::guard() const {
    // propagated input uncertainty plus a floor that leaves headroom below the
    // 80-digit working precision
    Real g = Real("1e-70");
    for (std::size_t i = 1; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        Real coef = Real(numerator(c_[i]).str()) / Real(denominator(c_[i]).str());
        g += abs(coef) * (basis_->symbol(static_cast<int>(i)).abs_err + Real("1e-75"));
    }
    return g;
}

int SymReal::sign() const {
    if (is_rational()) {
        if (c_[0] == 0) return 0;
        return c_[0] > 0 ? 1 : -1;
    }
    Real v = value();
    Real g = guard();
    if (v > g) return 1;
    if (v < -g) return -1;
    throw precision_error("sign of " + to_string() + " undecidable within precision budget");
}

Int SymReal::floor() const {
    if (is_rational()) return floor_rat(c_[0]);
    Real v = value();
    Real f = boost::multiprecision::floor(v);
    Real g = guard();
    // reject if v sits on an integer within the budget
    if (v - f < g || (f + 1) - v < g)
        throw precision_error("floor of " + to_string() + " undecidable within precision budget");
    Int n;
    std::stringstream ss;
    ss << std::fixed << std::setprecision(0) << f;
    n = Int(ss.str());
    return n;
}

std::string SymReal::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!out.empty()) out += " + ";
        out += rat_to_string(c_[i]) + "*" + basis_->symbol(static_cast<int>(i)).name;
    }
    return out.empty() ? "0" : out;
}

SymReal sym_dot(const RatVec& a, const SymVec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("sym_dot: dimension mismatch");
    SymReal s;
    for (std::size_t i = 0; i < a.size(); ++i) s += b[i] * a[i];
    return s;
}

SymVec sym_vec(SymBasisPtr basis, const std::vector<RatVec>& coeff_rows) {
    SymVec v;
    v.reserve(coeff_rows.size());
    for (const auto& row : coeff_rows) v.emplace_back(basis, row);
    return v;
}

DiscGroup::DiscGroup() : basis_(SymBasis::rational_only()) {}

DiscGroup::DiscGroup(SymBasisPtr basis, std::vector<SymReal> generators)
    : basis_(std::move(basis)), gens_(std::move(generators)) {
    RatMat m;
    for (auto& g : gens_) {
        if (g.basis() != basis_) {
            if (g.is_rational())
                g = SymReal(basis_, [&] {
                    RatVec c(basis_->size(), Rat(0));
                    c[0] = g.rational();
                    return c;
                }());
            else
                throw std::invalid_argument("DiscGroup: generator over foreign basis");
        }
        m.push_back(g.coeffs());
    }
    rank_ = m.empty() ? 0 : sphdegen::rank(m);
}

DiscGroup DiscGroup::integers() {
    return DiscGroup(SymBasis::rational_only(), {SymReal(Rat(1))});
}

SymReal DiscGroup::delta() const {
    if (rank_ == 0) return SymReal(Rat(0));
    if (rank_ > 1)
        throw std::logic_error("delta() on a dense group");
    // all generators are rational multiples of the first nonzero one
    const SymReal* g0 = nullptr;
    for (const auto& g : gens_)
        if (!is_zero(g.coeffs())) { g0 = &g; break; }
    int j = 0;
    while (g0->coeffs()[j] == 0) ++j;
    // multipliers q_i with g_i = q_i * g0; module = (rational gcd of q_i) * g0
    Int num_g = 0, den_l = 1;
    std::vector<Rat> qs;
    for (const auto& g : gens_) {
        if (is_zero(g.coeffs())) continue;
        Rat q = g.coeffs()[j] / g0->coeffs()[j];
        qs.push_back(q);
        den_l = lcm(den_l, denominator(q));
    }
    for (const auto& q : qs)
        num_g = gcd(num_g, numerator(q) * (den_l / denominator(q)));
    Rat gq(num_g, den_l);
    SymReal d = *g0 * gq;
    if (d.sign() < 0) d = -d;
    return d;
}

SymReal DiscGroup::sup_leq(const SymReal& t) const {
    if (rank_ == 0) {
        if (t.sign() < 0)
            throw std::domain_error("no group element below " + t.to_string());
        return SymReal(Rat(0));
    }
    if (!is_discrete()) return t;  // dense in R: the sup is the value itself
    SymReal d = delta();
    // exact when t is a rational multiple of delta
    int j = 0;
    while (d.coeffs()[j] == 0) ++j;
    Rat q = t.coeffs()[j] / d.coeffs()[j];
    SymReal rem = t - d * q;
    if (rem.is_rational() && rem.rational() == 0)
        return d * Rat(floor_rat(q));
    // genuinely incommensurable: numeric floor of t/delta, certified by
    // guarded sign tests against the neighbouring group elements
    Real r = t.value() / d.value();
    Real fl = boost::multiprecision::floor(r);
    std::stringstream ss;
    ss << std::fixed << std::setprecision(0) << fl;
    Int n(ss.str());
    SymReal cand = d * Rat(n);
    if ((t - cand).sign() < 0) { n -= 1; cand = d * Rat(n); }
    SymReal next = d * Rat(n + 1);
    if ((t - cand).sign() < 0 || (next - t).sign() <= 0)
        throw precision_error("sup_leq: floor undecidable within precision budget");
    return cand;
}

bool DiscGroup::contains(const SymReal& t) const {
    SymReal tt = t;
    if (tt.basis() != basis_) {
        if (!tt.is_rational()) throw std::invalid_argument("contains: foreign basis");
        RatVec c(basis_->size(), Rat(0));
        c[0] = tt.rational();
        tt = SymReal(basis_, c);
    }
    std::vector<RatVec> cols;
    for (const auto& g : gens_) cols.push_back(g.coeffs());
    return lattice_contains(cols, tt.coeffs());
}

double DiscGroup::max_generator_abs() const {
    double m = 0;
    for (const auto& g : gens_)
        m = std::max(m, std::abs(g.value_double()));
    return m;
}

}  // namespace sphdegen
