#include "sphdegen/lie.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sphdegen::lie {

Family family_from_string(const std::string& s) {
    if (s == "A") return Family::A;
    if (s == "B") return Family::B;
    if (s == "C") return Family::C;
    if (s == "D") return Family::D;
    if (s == "G2" || s == "G") return Family::G2;
    throw parse_error("unknown root system family: " + s);
}

std::string family_to_string(Family f) {
    switch (f) {
        case Family::A: return "A";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::D: return "D";
        case Family::G2: return "G2";
    }
    return "?";
}

namespace {

int block_dim_of(Family f, int rank) {
    switch (f) {
        case Family::A: return rank + 1;
        case Family::B:
        case Family::C:
        case Family::D: return rank;
        case Family::G2: return 3;
    }
    return 0;
}

std::vector<RatVec> standard_simple_roots(Family f, int rank, int offset, int ambient) {
    auto unit = [&](int i) {
        RatVec v(ambient, Rat(0));
        v[offset + i] = 1;
        return v;
    };
    std::vector<RatVec> roots;
    switch (f) {
        case Family::A:
            for (int i = 0; i < rank; ++i) roots.push_back(sub(unit(i), unit(i + 1)));
            break;
        case Family::B:
            for (int i = 0; i + 1 < rank; ++i) roots.push_back(sub(unit(i), unit(i + 1)));
            roots.push_back(unit(rank - 1));
            break;
        case Family::C:
            for (int i = 0; i + 1 < rank; ++i) roots.push_back(sub(unit(i), unit(i + 1)));
            roots.push_back(scale(unit(rank - 1), Rat(2)));
            break;
        case Family::D:
            for (int i = 0; i + 1 < rank; ++i) roots.push_back(sub(unit(i), unit(i + 1)));
            roots.push_back(add(unit(rank - 2), unit(rank - 1)));
            break;
        case Family::G2: {
            RatVec a1 = sub(unit(0), unit(1));
            RatVec a2 = add(add(scale(unit(0), Rat(-2)), unit(1)), unit(2));
            roots.push_back(a1);
            roots.push_back(a2);
            break;
        }
    }
    return roots;
}

std::size_t expected_positive_count(Family f, int rank) {
    switch (f) {
        case Family::A: return static_cast<std::size_t>(rank) * (rank + 1) / 2;
        case Family::B:
        case Family::C: return static_cast<std::size_t>(rank) * rank;
        case Family::D: return static_cast<std::size_t>(rank) * (rank - 1);
        case Family::G2: return 6;
    }
    return 0;
}

std::vector<RatVec> fundamental_weights(Family f, int rank, int offset, int ambient) {
    auto unit = [&](int i) {
        RatVec v(ambient, Rat(0));
        v[offset + i] = 1;
        return v;
    };
    auto prefix = [&](int k, const Rat& s) {  // s * (e_0 + ... + e_{k-1})
        RatVec v(ambient, Rat(0));
        for (int i = 0; i < k; ++i) v[offset + i] = s;
        return v;
    };
    std::vector<RatVec> fw;
    switch (f) {
        case Family::A:
            for (int k = 1; k <= rank; ++k) fw.push_back(prefix(k, Rat(1)));
            break;
        case Family::B:
            for (int k = 1; k < rank; ++k) fw.push_back(prefix(k, Rat(1)));
            fw.push_back(prefix(rank, Rat(1, 2)));
            break;
        case Family::C:
            for (int k = 1; k <= rank; ++k) fw.push_back(prefix(k, Rat(1)));
            break;
        case Family::D:
            for (int k = 1; k <= rank - 2; ++k) fw.push_back(prefix(k, Rat(1)));
            {
                RatVec w = prefix(rank - 1, Rat(1, 2));
                w[offset + rank - 1] = Rat(-1, 2);
                fw.push_back(std::move(w));
                fw.push_back(prefix(rank, Rat(1, 2)));
            }
            break;
        case Family::G2: {
            RatVec w1(ambient, Rat(0)), w2(ambient, Rat(0));
            w1[offset + 1] = -1; w1[offset + 2] = 1;
            w2[offset] = -1; w2[offset + 1] = -1; w2[offset + 2] = 2;
            fw.push_back(std::move(w1));
            fw.push_back(std::move(w2));
            break;
        }
    }
    return fw;
}

}  // namespace

RootSystem RootSystem::make(const std::vector<std::pair<Family, int>>& factors,
                            int torus_rank) {
    RootSystem rs;
    rs.torus_rank_ = torus_rank;
    if (torus_rank < 0) throw validation_error("negative torus rank");
    int off = 0;
    for (auto [f, r] : factors) {
        if (f == Family::G2) r = 2;
        if (r < 1 || r > 4) throw unsupported_error("factor rank out of supported range [1,4]");
        if (f == Family::D && r < 2) throw unsupported_error("type D needs rank >= 2");
        rs.factors_.push_back({f, r, off, block_dim_of(f, r)});
        off += block_dim_of(f, r);
    }
    rs.ambient_ = off + torus_rank;
    for (const auto& fac : rs.factors_) {
        auto roots = standard_simple_roots(fac.family, fac.rank, fac.offset, rs.ambient_);
        rs.simple_roots_.insert(rs.simple_roots_.end(), roots.begin(), roots.end());
    }
    rs.pairing_.assign(rs.ambient_, RatVec(rs.ambient_, Rat(0)));
    for (int i = 0; i < rs.ambient_; ++i) rs.pairing_[i][i] = 1;
    rs.finish();
    return rs;
}

RootSystem RootSystem::make_custom(const std::vector<std::pair<Family, int>>& factors,
                                   int torus_rank, std::vector<RatVec> simple_roots,
                                   RatMat pairing) {
    RootSystem rs = make(factors, torus_rank);
    if (simple_roots.size() != rs.simple_roots_.size())
        throw validation_error("simple root count does not match the declared factors");
    rs.simple_roots_ = std::move(simple_roots);
    rs.pairing_ = std::move(pairing);
    rs.positive_roots_.clear();
    rs.fundamental_.clear();
    rs.validate();
    rs.finish();
    return rs;
}

void RootSystem::finish() {
    // closure of the simple roots under root strings
    std::vector<RatVec> roots = simple_roots_;
    std::set<RatVec> seen(roots.begin(), roots.end());
    std::size_t head = 0;
    std::size_t guard = 4096;
    while (head < roots.size()) {
        if (roots.size() > guard)
            throw validation_error("positive root closure does not terminate");
        RatVec beta = roots[head++];
        for (const auto& alpha : simple_roots_) {
            // p = longest string below beta in direction alpha
            int p = 0;
            RatVec cur = sub(beta, alpha);
            while (seen.count(cur)) { ++p; cur = sub(cur, alpha); }
            Rat q = Rat(p) - coroot_pair(beta, alpha);
            if (q > 0) {
                RatVec gamma = add(beta, alpha);
                if (seen.insert(gamma).second) roots.push_back(gamma);
            }
        }
    }
    std::sort(roots.begin(), roots.end(), lex_less);
    positive_roots_.clear();
    for (auto& r : roots) positive_roots_.push_back(Weight{std::move(r)});

    RatVec rho(ambient_, Rat(0));
    for (const auto& r : positive_roots_) rho = add(rho, r.coords);
    rho_ = Weight{scale(rho, Rat(1, 2))};

    fundamental_.clear();
    for (const auto& fac : factors_) {
        auto fw = fundamental_weights(fac.family, fac.rank, fac.offset, ambient_);
        fundamental_.insert(fundamental_.end(), fw.begin(), fw.end());
    }
}

Rat RootSystem::pair(const RatVec& a, const RatVec& b) const {
    Rat s = 0;
    for (int i = 0; i < ambient_; ++i)
        for (int j = 0; j < ambient_; ++j)
            if (pairing_[i][j] != 0) s += a[i] * pairing_[i][j] * b[j];
    return s;
}

Rat RootSystem::coroot_pair(const RatVec& v, const RatVec& alpha) const {
    return 2 * pair(v, alpha) / pair(alpha, alpha);
}

bool RootSystem::is_dominant(const Weight& w) const {
    for (const auto& a : simple_roots_)
        if (coroot_pair(w.coords, a) < 0) return false;
    return true;
}

Weight RootSystem::weight_from_fundamental(const RatVec& coeffs_and_torus) const {
    int sr = semisimple_rank();
    if (static_cast<int>(coeffs_and_torus.size()) != sr + torus_rank_)
        throw std::invalid_argument("fundamental coordinate count mismatch");
    RatVec w(ambient_, Rat(0));
    for (int k = 0; k < sr; ++k)
        w = add(w, scale(fundamental_[k], coeffs_and_torus[k]));
    for (int t = 0; t < torus_rank_; ++t)
        w[ambient_ - torus_rank_ + t] += coeffs_and_torus[sr + t];
    return Weight{std::move(w)};
}

RatVec RootSystem::fundamental_coords(const Weight& w) const {
    RatVec c;
    for (const auto& a : simple_roots_) c.push_back(coroot_pair(w.coords, a));
    return c;
}

void RootSystem::validate() const {
    RatMat rows(simple_roots_.begin(), simple_roots_.end());
    if (rank(rows) != static_cast<int>(simple_roots_.size()))
        throw validation_error("simple roots are linearly dependent");
    if (pairing_.size() != static_cast<std::size_t>(ambient_))
        throw validation_error("pairing has wrong dimension");
    for (int i = 0; i < ambient_; ++i)
        for (int j = 0; j < ambient_; ++j)
            if (pairing_[i][j] != pairing_[j][i])
                throw validation_error("pairing is not symmetric");
    // positive definiteness via leading principal minors
    for (int k = 1; k <= ambient_; ++k) {
        RatMat sub_m(k, RatVec(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub_m[i][j] = pairing_[i][j];
        // determinant by fraction-free elimination
        Rat det = 1;
        for (int c = 0; c < k; ++c) {
            int p = -1;
            for (int r = c; r < k; ++r)
                if (sub_m[r][c] != 0) { p = r; break; }
            if (p < 0) { det = 0; break; }
            if (p != c) { std::swap(sub_m[p], sub_m[c]); det = -det; }
            det *= sub_m[c][c];
            for (int r = c + 1; r < k; ++r) {
                Rat f = sub_m[r][c] / sub_m[c][c];
                for (int j = c; j < k; ++j) sub_m[r][j] -= f * sub_m[c][j];
            }
        }
        if (det <= 0) throw validation_error("pairing is not positive definite");
    }
    // Cartan integers must match the declared families
    RootSystem ref = make([&] {
        std::vector<std::pair<Family, int>> fs;
        for (const auto& f : factors_) fs.emplace_back(f.family, f.rank);
        return fs;
    }(), torus_rank_);
    int n = semisimple_rank();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat cij = coroot_pair(simple_roots_[i], simple_roots_[j]);
            if (denominator(cij) != 1)
                throw validation_error("Cartan pairing is not integral");
            Rat ref_cij = ref.coroot_pair(ref.simple_roots_[i], ref.simple_roots_[j]);
            if (cij != ref_cij)
                throw validation_error("Cartan matrix does not match the declared families");
        }
}

namespace {

// Reflect into the dominant chamber; optionally track the determinant sign and
// detect walls (a zero coroot pairing), as needed by the Klimyk rule.
struct Dominantized {
    RatVec v;
    int sign = 1;
    bool on_wall = false;
};

Dominantized dominantize(const RootSystem& rs, RatVec v, bool strict) {
    Dominantized out;
    const auto& simples = rs.simple_roots();
    bool changed = true;
    std::size_t guard = 100000;
    while (changed) {
        if (guard-- == 0) throw std::logic_error("dominantize does not terminate");
        changed = false;
        for (const auto& a : simples) {
            Rat c = rs.coroot_pair(v, a);
            if (strict && c == 0) { out.on_wall = true; out.v = v; return out; }
            if (c < 0) {
                v = sub(v, scale(a, c));
                out.sign = -out.sign;
                changed = true;
            }
        }
    }
    out.v = std::move(v);
    return out;
}

void require_integral_dominant(const RootSystem& rs, const Weight& w, const char* who) {
    for (const auto& a : rs.simple_roots()) {
        Rat c = rs.coroot_pair(w.coords, a);
        if (c < 0) throw validation_error(std::string(who) + ": weight is not dominant");
        if (denominator(c) != 1)
            throw validation_error(std::string(who) + ": weight is not integral");
    }
}

}  // namespace

Int weyl_dim(const RootSystem& rs, const Weight& lambda,
             const std::optional<std::vector<Weight>>& restrict_roots) {
    require_integral_dominant(rs, lambda, "weyl_dim");
    const std::vector<Weight>& roots =
        restrict_roots ? *restrict_roots : rs.positive_roots();
    Rat num = 1, den = 1;
    RatVec rho_lambda = add(rs.rho().coords, lambda.coords);
    for (const auto& a : roots) {
        num *= rs.pair(a.coords, rho_lambda);
        den *= rs.pair(a.coords, rs.rho().coords);
    }
    Rat dim = num / den;
    if (denominator(dim) != 1 || dim <= 0)
        throw numeric_error("weyl_dim: product is not a positive integer: " + rat_to_string(dim));
    return numerator(dim);
}

std::map<Weight, Int> weight_system(const RootSystem& rs, const Weight& lambda) {
    require_integral_dominant(rs, lambda, "weight_system");
    const auto& simples = rs.simple_roots();
    int n = static_cast<int>(simples.size());

    // coefficient box: lambda - w0(lambda) over the simple roots
    RatVec lowest = dominantize(rs, scale(lambda.coords, Rat(-1)), false).v;
    RatVec span = add(lambda.coords, lowest);
    RatMat cols = transpose(RatMat(simples.begin(), simples.end()));
    auto d = solve(cols, span);
    if (!d) throw std::logic_error("weight_system: span not in the root lattice");
    std::vector<Int> box(n);
    for (int i = 0; i < n; ++i) {
        if (denominator((*d)[i]) != 1 || (*d)[i] < 0)
            throw std::logic_error("weight_system: bad box bounds");
        box[i] = numerator((*d)[i]);
    }

    // dominant weights of the module, ordered by increasing height
    std::vector<std::pair<Int, RatVec>> dominants;  // (height, weight)
    std::vector<Int> c(n, Int(0));
    std::function<void(int, Int)> rec = [&](int i, Int h) {
        if (i == n) {
            RatVec nu = lambda.coords;
            for (int t = 0; t < n; ++t)
                nu = sub(nu, scale(simples[t], Rat(c[t])));
            bool dom = true;
            for (const auto& a : simples)
                if (rs.coroot_pair(nu, a) < 0) { dom = false; break; }
            if (dom) dominants.emplace_back(h, std::move(nu));
            return;
        }
        for (Int v = 0; v <= box[i]; ++v) { c[i] = v; rec(i + 1, h + v); }
    };
    rec(0, Int(0));
    std::sort(dominants.begin(), dominants.end(),
              [](const auto& x, const auto& y) {
                  if (x.first != y.first) return x.first < y.first;
                  return lex_less(x.second, y.second);
              });

    // Freudenthal multiplicities, top-down
    std::map<RatVec, Int> dom_mult;
    RatVec lr = add(lambda.coords, rs.rho().coords);
    Rat norm_top = rs.pair(lr, lr);
    for (const auto& [h, nu] : dominants) {
        if (h == 0) { dom_mult[nu] = 1; continue; }
        RatVec nr = add(nu, rs.rho().coords);
        Rat denom = norm_top - rs.pair(nr, nr);
        Rat total = 0;
        for (const auto& a : rs.positive_roots()) {
            for (Int j = 1;; ++j) {
                RatVec mu = add(nu, scale(a.coords, Rat(j)));
                RatVec dom_rep = dominantize(rs, mu, false).v;
                auto it = dom_mult.find(dom_rep);
                if (it == dom_mult.end()) break;  // weight strings are intervals
                total += Rat(it->second) * rs.pair(mu, a.coords);
            }
        }
        Rat m = 2 * total / denom;
        if (denominator(m) != 1 || m <= 0)
            throw std::logic_error("Freudenthal multiplicity is not a positive integer");
        dom_mult[nu] = numerator(m);
    }

    // expand over Weyl orbits
    std::map<Weight, Int> out;
    for (const auto& [nu, m] : dom_mult) {
        std::set<RatVec> orbit{nu};
        std::vector<RatVec> queue{nu};
        while (!queue.empty()) {
            RatVec v = queue.back();
            queue.pop_back();
            for (const auto& a : simples) {
                RatVec w = sub(v, scale(a, rs.coroot_pair(v, a)));
                if (orbit.insert(w).second) queue.push_back(w);
            }
        }
        for (const auto& w : orbit) out[Weight{w}] = m;
    }
    return out;
}

std::map<Weight, Int> tensor_decompose(const RootSystem& rs, const Weight& l1,
                                       const Weight& l2) {
    if (rs.semisimple_rank() > 3)
        throw unsupported_error("tensor_decompose: semisimple rank above 3");
    require_integral_dominant(rs, l1, "tensor_decompose");
    require_integral_dominant(rs, l2, "tensor_decompose");

    std::map<Weight, Int> result;
    for (const auto& [nu, mult] : weight_system(rs, l2)) {
        RatVec xi = add(add(l1.coords, nu.coords), rs.rho().coords);
        Dominantized d = dominantize(rs, std::move(xi), true);
        if (d.on_wall) continue;
        Weight summand{sub(d.v, rs.rho().coords)};
        auto it = result.find(summand);
        if (it == result.end())
            result[summand] = Int(d.sign) * mult;
        else {
            it->second += Int(d.sign) * mult;
            if (it->second == 0) result.erase(it);
        }
    }
    for (const auto& [w, m] : result)
        if (m <= 0)
            throw std::logic_error("tensor_decompose: non-positive multiplicity survived");
    return result;
}

Int gt_lattice_points(const RootSystem& rs, const Weight& lambda) {
    require_integral_dominant(rs, lambda, "gt_lattice_points");
    for (const auto& fac : rs.factors()) {
        if (fac.family == Family::A) continue;
        for (int i = 0; i < fac.block_dim; ++i)
            if (lambda.coords[fac.offset + i] != 0)
                throw unsupported_error(
                    "gt_lattice_points: only type A factors are supported");
    }
    Int count = 1;
    for (const auto& fac : rs.factors()) {
        if (fac.family != Family::A) continue;
        int m = fac.block_dim;
        std::vector<Rat> row(m);
        for (int i = 0; i < m; ++i) row[i] = lambda.coords[fac.offset + i];
        // shift so the last entry is zero; entries must become integers
        std::vector<Int> top(m);
        for (int i = 0; i < m; ++i) {
            Rat shifted = row[i] - row[m - 1];
            if (denominator(shifted) != 1 || shifted < 0)
                throw validation_error("gt_lattice_points: top row is not a partition");
            top[i] = numerator(shifted);
        }
        // count integral interlacing triangles below the top row
        std::map<std::vector<Int>, Int> memo;
        std::function<Int(const std::vector<Int>&)> patterns =
            [&](const std::vector<Int>& r) -> Int {
            if (r.size() <= 1) return 1;
            auto it = memo.find(r);
            if (it != memo.end()) return it->second;
            std::vector<Int> next(r.size() - 1);
            Int total = 0;
            std::function<void(std::size_t)> fill = [&](std::size_t i) {
                if (i == next.size()) { total += patterns(next); return; }
                for (Int v = r[i + 1]; v <= r[i]; ++v) { next[i] = v; fill(i + 1); }
            };
            fill(0);
            memo[r] = total;
            return total;
        };
        count *= patterns(top);
    }
    return count;
}

}  // namespace sphdegen::lie
