#include "sphdegen/spherical.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace sphdegen::spherical {

using polytope::PolyCone;

RatVec SphericalDatum::to_lattice_coords(const RatVec& ambient) const {
    RatMat cols = transpose(RatMat(lattice_basis.begin(), lattice_basis.end()));
    auto c = solve(cols, ambient);
    if (!c) throw validation_error("vector is outside the span of the lattice");
    // solve() gives a least-structured solution; verify exactly
    RatVec back(ambient.size(), Rat(0));
    for (int j = 0; j < rank(); ++j)
        back = add(back, scale(lattice_basis[j], (*c)[j]));
    if (back != ambient) throw validation_error("vector is outside the span of the lattice");
    return *c;
}

void SphericalDatum::validate(const lie::RootSystem* rs) const {
    if (!lattice_basis.empty()) {
        RatMat rows(lattice_basis.begin(), lattice_basis.end());
        if (sphdegen::rank(rows) != static_cast<int>(lattice_basis.size()))
            throw validation_error("lattice basis is not linearly independent");
    }
    for (const auto& a : spherical_roots)
        to_lattice_coords(a);  // throws when outside span(M)
    if (rs) {
        RatMat cols = transpose(RatMat(rs->simple_roots().begin(), rs->simple_roots().end()));
        for (const auto& a : spherical_roots) {
            auto c = solve(cols, a);
            bool ok = c.has_value();
            if (ok) {
                RatVec back(a.size(), Rat(0));
                for (std::size_t j = 0; j < rs->simple_roots().size(); ++j)
                    back = add(back, scale(rs->simple_roots()[j], (*c)[j]));
                ok = back == a;
                if (ok)
                    for (const auto& x : *c)
                        if (x < 0) { ok = false; break; }
            }
            if (!ok)
                throw validation_error(
                    "spherical root is not a nonnegative combination of simple roots");
        }
        for (int i : pi_p)
            if (i < 0 || i >= rs->semisimple_rank())
                throw validation_error("pi_p names a nonexistent simple root");
        for (const auto& c : colours_a) {
            if (c.root_index < 0 || c.root_index >= rs->semisimple_rank())
                throw validation_error("colour names a nonexistent simple root");
            if (!c.root_vector.empty() &&
                c.root_vector != rs->simple_roots()[c.root_index])
                throw validation_error("colour root vector disagrees with its index");
            if (std::find(pi_p.begin(), pi_p.end(), c.root_index) != pi_p.end())
                throw validation_error("pi_p meets the roots moving a type-a colour");
        }
    }
}

bool SphericalDatum::operator==(const SphericalDatum& o) const {
    auto sorted_roots = [](std::vector<RatVec> v) {
        std::sort(v.begin(), v.end(), lex_less);
        return v;
    };
    auto colour_ids = [](const std::vector<ColourA>& cs) {
        std::vector<std::pair<std::string, int>> v;
        for (const auto& c : cs) v.emplace_back(c.id, c.root_index);
        std::sort(v.begin(), v.end());
        return v;
    };
    return lattice_basis == o.lattice_basis &&
           sorted_roots(spherical_roots) == sorted_roots(o.spherical_roots) &&
           std::set<int>(pi_p.begin(), pi_p.end()) ==
               std::set<int>(o.pi_p.begin(), o.pi_p.end()) &&
           colour_ids(colours_a) == colour_ids(o.colours_a);
}

ValCone valuation_cone(const SphericalDatum& d) {
    ValCone v;
    std::vector<RatVec> rows;
    for (const auto& a : d.spherical_roots)
        rows.push_back(d.to_lattice_coords(a));
    v.root_functionals = rows;
    v.cone = PolyCone::from_normals(d.rank(), rows);
    return v;
}

namespace {

std::vector<int> vanishing_set(const ValCone& v, const SymVec& lambda) {
    std::vector<int> s;
    for (std::size_t i = 0; i < v.root_functionals.size(); ++i) {
        SymReal val = sym_dot(v.root_functionals[i], lambda);
        // exactness per basis symbol: zero iff every rational coefficient is zero
        bool zero = true;
        for (const auto& c : val.coeffs())
            if (c != 0) { zero = false; break; }
        if (zero) { s.push_back(static_cast<int>(i)); continue; }
        if (val.sign() > 0)
            throw validation_error("covector violates spherical root " + std::to_string(i));
    }
    return s;
}

ConeFace face_from_vanishing(const ValCone& v, std::vector<int> s) {
    // face = {x in cone : alpha_i(x) = 0, i in s}; close s under implied zeros
    std::vector<RatVec> normals = v.root_functionals;
    int dim = normals.empty() ? v.cone.dim() : static_cast<int>(normals[0].size());
    std::vector<RatVec> all = normals;
    for (int i : s) all.push_back(scale(normals[i], Rat(-1)));
    PolyCone face = PolyCone::from_normals(dim, all);

    auto vanishes = [&](const RatVec& functional) {
        for (const auto& r : face.rays())
            if (dot(functional, r) != 0) return false;
        for (const auto& l : face.lineality())
            if (dot(functional, l) != 0) return false;
        return true;
    };
    std::vector<int> closed;
    for (std::size_t i = 0; i < normals.size(); ++i)
        if (vanishes(normals[i])) closed.push_back(static_cast<int>(i));

    RatVec interior(dim, Rat(0));
    for (const auto& r : face.rays()) interior = add(interior, r);
    return ConeFace{std::move(closed), std::move(face), std::move(interior)};
}

SymVec to_symvec(const RatVec& v) {
    SymVec s;
    for (const auto& x : v) s.emplace_back(x);
    return s;
}

}  // namespace

ConeFace face_containing(const ValCone& v, const SymVec& lambda) {
    return face_from_vanishing(v, vanishing_set(v, lambda));
}

ConeFace face_containing(const ValCone& v, const RatVec& lambda) {
    return face_containing(v, to_symvec(lambda));
}

SphericalDatum central_fibre_datum(const SphericalDatum& d, const std::vector<int>& vanishing) {
    SphericalDatum out;
    out.lattice_basis = d.lattice_basis;  // the weight lattice is unchanged
    for (int i : vanishing) out.spherical_roots.push_back(d.spherical_roots[i]);
    out.pi_p = d.pi_p;
    // a type-a colour survives iff its moving root is still spherical
    std::set<RatVec> surviving;
    for (const auto& r : out.spherical_roots) surviving.insert(primitive(r));
    for (const auto& c : d.colours_a)
        if (surviving.count(primitive(c.root_vector))) out.colours_a.push_back(c);
    out.colours_other = d.colours_other;
    return out;
}

SphericalDatum central_fibre_datum(const SphericalDatum& d, const SymVec& lambda) {
    ValCone v = valuation_cone(d);
    ConeFace f = face_containing(v, lambda);
    return central_fibre_datum(d, f.vanishing);
}

SphericalDatum central_fibre_datum(const SphericalDatum& d, const RatVec& lambda) {
    return central_fibre_datum(d, to_symvec(lambda));
}

bool is_horospherical(const SphericalDatum& d, const SymVec& lambda) {
    ValCone v = valuation_cone(d);
    return face_containing(v, lambda).vanishing.empty();
}

std::vector<std::pair<ConeFace, SphericalDatum>> enumerate_degenerations(
    const SphericalDatum& d) {
    ValCone v = valuation_cone(d);
    int m = static_cast<int>(v.root_functionals.size());
    if (m > 20) throw unsupported_error("too many spherical roots to enumerate faces");
    std::set<std::vector<int>> seen;
    std::vector<std::pair<ConeFace, SphericalDatum>> out;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
        std::vector<int> s;
        for (int i = 0; i < m; ++i)
            if (bits & (std::uint64_t{1} << i)) s.push_back(i);
        ConeFace f = face_from_vanishing(v, s);
        if (!seen.insert(f.vanishing).second) continue;
        SphericalDatum fibre = central_fibre_datum(d, f.vanishing);
        out.emplace_back(std::move(f), std::move(fibre));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.vanishing.size() != b.first.vanishing.size())
            return a.first.vanishing.size() < b.first.vanishing.size();
        return a.first.vanishing < b.first.vanishing;
    });
    return out;
}

RatVec rational_face_approx(const ValCone& v, const SymVec& lambda, const Int& p) {
    if (p <= 0) throw std::invalid_argument("rational_face_approx: p must be positive");
    ConeFace f = face_containing(v, lambda);
    int dim = v.cone.dim();
    // span basis of the face
    std::vector<RatVec> span = f.face.rays();
    span.insert(span.end(), f.face.lineality().begin(), f.face.lineality().end());
    RatMat basis;
    for (const auto& s : span) {
        basis.push_back(s);
        if (sphdegen::rank(basis) != static_cast<int>(basis.size())) basis.pop_back();
    }
    // exact coefficients of lambda over the face span, one symbol at a time
    int nb = static_cast<int>(basis.size());
    std::vector<SymReal> coeffs(nb, SymReal(Rat(0)));
    if (nb > 0) {
        RatMat cols = transpose(basis);
        int nsym = lambda.empty() ? 1 : lambda[0].basis()->size();
        SymBasisPtr sb = lambda.empty() ? SymBasis::rational_only() : lambda[0].basis();
        for (int s = 0; s < nsym; ++s) {
            RatVec comp(dim);
            for (int i = 0; i < dim; ++i) {
                const auto& c = lambda[i].coeffs();
                comp[i] = s < static_cast<int>(c.size()) ? c[s] : Rat(0);
            }
            auto sol = solve(cols, comp);
            if (!sol) throw validation_error("covector is outside its face span");
            for (int j = 0; j < nb; ++j) {
                RatVec cv(nsym, Rat(0));
                cv[s] = (*sol)[j];
                coeffs[j] += SymReal(sb, cv);
            }
        }
    }
    // round coefficients with increasing denominators until the face matches
    for (Int den = p; den <= p * 1024; den *= 2) {
        RatVec cand(dim, Rat(0));
        for (int j = 0; j < nb; ++j) {
            Real val = coeffs[j].value() * Real(den.str());
            Real rounded = boost::multiprecision::round(val);
            std::stringstream ss;
            ss << std::fixed << std::setprecision(0) << rounded;
            Rat cj(Int(ss.str()), den);
            cand = add(cand, scale(basis[j], cj));
        }
        bool ok = true;
        for (std::size_t i = 0; i < v.root_functionals.size() && ok; ++i) {
            Rat val = dot(v.root_functionals[i], cand);
            bool in_face = std::find(f.vanishing.begin(), f.vanishing.end(),
                                     static_cast<int>(i)) != f.vanishing.end();
            if (in_face ? (val != 0) : (val >= 0)) ok = false;
        }
        if (ok) return cand;
    }
    throw numeric_error("rational_face_approx: no rational point found in the face");
}

}  // namespace sphdegen::spherical
