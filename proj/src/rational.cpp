#include "sphdegen/rational.hpp"

#include <algorithm>
#include <cmath>

namespace sphdegen {

Rat parse_rat(const std::string& s) {
    if (s.empty())
        throw parse_error("empty rational literal");
    // decimal form: sign, digits, optional fractional part
    if (s.find('.') != std::string::npos) {
        std::size_t pos = 0;
        bool neg = false;
        if (s[pos] == '+' || s[pos] == '-') { neg = s[pos] == '-'; ++pos; }
        std::string digits;
        Int den = 1;
        bool seen_dot = false, seen_digit = false;
        for (; pos < s.size(); ++pos) {
            char ch = s[pos];
            if (ch == '.') {
                if (seen_dot) throw parse_error("bad rational literal: " + s);
                seen_dot = true;
            } else if (ch >= '0' && ch <= '9') {
                digits.push_back(ch);
                seen_digit = true;
                if (seen_dot) den *= 10;
            } else {
                throw parse_error("bad rational literal: " + s);
            }
        }
        if (!seen_digit) throw parse_error("bad rational literal: " + s);
        Int num(digits);
        if (neg) num = -num;
        return Rat(num, den);
    }
    try {
        Rat q(s);
        return q;
    } catch (const std::exception&) {
        throw parse_error("bad rational literal: " + s);
    }
}

std::string rat_to_string(const Rat& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1)
        s += "/" + denominator(q).str();
    return s;
}

double rat_to_double(const Rat& q) { return q.convert_to<double>(); }

Int floor_rat(const Rat& q) {
    Int n = numerator(q), d = denominator(q);
    Int f = n / d;
    if (f * d > n) --f;
    return f;
}

Int ceil_rat(const Rat& q) { return -floor_rat(-q); }

RatVec rat_vec(std::initializer_list<long> xs) {
    RatVec v;
    v.reserve(xs.size());
    for (long x : xs) v.emplace_back(x);
    return v;
}

Rat dot(const RatVec& a, const RatVec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

RatVec add(const RatVec& a, const RatVec& b) {
    RatVec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

RatVec sub(const RatVec& a, const RatVec& b) {
    RatVec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

RatVec scale(const RatVec& a, const Rat& c) {
    RatVec r(a);
    for (auto& x : r) x *= c;
    return r;
}

bool is_zero(const RatVec& a) {
    return std::all_of(a.begin(), a.end(), [](const Rat& x) { return x == 0; });
}

bool lex_less(const RatVec& a, const RatVec& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return a.size() < b.size();
}

RatVec primitive(const RatVec& a) {
    Int l = 1;
    for (const auto& x : a) l = lcm(l, denominator(x));
    Int g = 0;
    std::vector<Int> ints;
    ints.reserve(a.size());
    for (const auto& x : a) {
        Int v = numerator(x) * (l / denominator(x));
        ints.push_back(v);
        g = gcd(g, v);
    }
    RatVec r(a.size());
    if (g == 0) return RatVec(a.size(), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = Rat(ints[i] / g);
    return r;
}

namespace {

// Row echelon with partial structure; returns pivot columns. Mutates a/b.
std::vector<int> echelon(RatMat& a, RatVec* b) {
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(a[p], a[r]);
        if (b) std::swap((*b)[p], (*b)[r]);
        Rat inv = Rat(1) / a[r][c];
        for (int j = c; j < cols; ++j) a[r][j] *= inv;
        if (b) (*b)[r] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            if (b) (*b)[i] -= f * (*b)[r];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

int rank(RatMat a) {
    return static_cast<int>(echelon(a, nullptr).size());
}

std::optional<RatVec> solve(const RatMat& a, const RatVec& b) {
    RatMat m(a);
    RatVec rhs(b);
    std::vector<int> pivots = echelon(m, &rhs);
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int nr = static_cast<int>(pivots.size());
    for (int i = nr; i < rows; ++i)
        if (rhs[i] != 0) return std::nullopt;
    RatVec x(cols, Rat(0));
    for (int i = 0; i < nr; ++i) x[pivots[i]] = rhs[i];
    return x;
}

RatMat null_space(const RatMat& a, int ncols) {
    RatMat m(a);
    std::vector<int> pivots = echelon(m, nullptr);
    std::vector<bool> is_pivot(ncols, false);
    for (int c : pivots) is_pivot[c] = true;
    RatMat basis;
    for (int c = 0; c < ncols; ++c) {
        if (is_pivot[c]) continue;
        RatVec v(ncols, Rat(0));
        v[c] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i)
            v[pivots[i]] = -m[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RatMat> invert(const RatMat& a) {
    int n = static_cast<int>(a.size());
    RatMat m(a);
    RatMat id(n, RatVec(n, Rat(0)));
    for (int i = 0; i < n; ++i) id[i][i] = 1;
    // augment
    for (int i = 0; i < n; ++i)
        m[i].insert(m[i].end(), id[i].begin(), id[i].end());
    std::vector<int> pivots = echelon(m, nullptr);
    if (static_cast<int>(pivots.size()) != n) return std::nullopt;
    for (int i = 0; i < n; ++i)
        if (pivots[i] != i) return std::nullopt;
    RatMat inv(n, RatVec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
    return inv;
}

RatMat transpose(const RatMat& a) {
    if (a.empty()) return {};
    RatMat t(a[0].size(), RatVec(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

RatVec mat_vec(const RatMat& a, const RatVec& x) {
    RatVec r;
    r.reserve(a.size());
    for (const auto& row : a) r.push_back(dot(row, x));
    return r;
}

bool lattice_contains(const std::vector<RatVec>& gens, const RatVec& target) {
    std::size_t m = target.size();
    for (const auto& g : gens)
        if (g.size() != m) throw std::invalid_argument("lattice_contains: dimension mismatch");
    // clear denominators jointly
    Int l = 1;
    for (const auto& g : gens)
        for (const auto& x : g) l = lcm(l, denominator(x));
    for (const auto& x : target) l = lcm(l, denominator(x));
    std::vector<std::vector<Int>> cols;
    for (const auto& g : gens) {
        std::vector<Int> c(m);
        for (std::size_t i = 0; i < m; ++i)
            c[i] = numerator(g[i]) * (l / denominator(g[i]));
        cols.push_back(std::move(c));
    }
    std::vector<Int> b(m);
    for (std::size_t i = 0; i < m; ++i)
        b[i] = numerator(target[i]) * (l / denominator(target[i]));

    // column Hermite reduction, then greedy forward elimination of b
    std::size_t c0 = 0;
    for (std::size_t r = 0; r < m && c0 < cols.size(); ++r) {
        // gcd sweep on row r among columns >= c0
        while (true) {
            std::size_t best = cols.size();
            for (std::size_t j = c0; j < cols.size(); ++j) {
                if (cols[j][r] == 0) continue;
                if (best == cols.size() || abs(cols[j][r]) < abs(cols[best][r])) best = j;
            }
            if (best == cols.size()) break;  // row r is zero among remaining cols
            std::swap(cols[c0], cols[best]);
            bool others = false;
            for (std::size_t j = c0 + 1; j < cols.size(); ++j) {
                if (cols[j][r] == 0) continue;
                Int q = cols[j][r] / cols[c0][r];
                for (std::size_t i = 0; i < m; ++i) cols[j][i] -= q * cols[c0][i];
                if (cols[j][r] != 0) others = true;
            }
            if (!others) break;
        }
        if (cols[c0][r] != 0) {
            if (cols[c0][r] < 0)
                for (std::size_t i = 0; i < m; ++i) cols[c0][i] = -cols[c0][i];
            Int piv = cols[c0][r];
            if (b[r] % piv != 0) return false;
            Int z = b[r] / piv;
            for (std::size_t i = 0; i < m; ++i) b[i] -= z * cols[c0][i];
            ++c0;
        } else if (b[r] != 0) {
            return false;
        }
    }
    for (std::size_t r = 0; r < m; ++r)
        if (b[r] != 0) return false;
    return true;
}

}  // namespace sphdegen
