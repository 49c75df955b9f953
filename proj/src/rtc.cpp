#include "sphdegen/rtc.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sphdegen::rtc {

using polytope::AffinePiece;
using polytope::PLConcave;
using polytope::RationalPolytope;

namespace {

SymBasisPtr common_basis(const std::vector<AffinePiece>& pieces,
                         const std::optional<DiscGroup>& gamma) {
    if (gamma && gamma->basis()->size() > 1) return gamma->basis();
    for (const auto& p : pieces) {
        for (const auto& g : p.gradient)
            if (g.basis()->size() > 1) return g.basis();
        if (p.constant.basis()->size() > 1) return p.constant.basis();
    }
    return SymBasis::rational_only();
}

}  // namespace

RTestConfig make_config(std::shared_ptr<const lie::RootSystem> rs,
                        spherical::SphericalDatum datum,
                        polytope::RationalPolytope moment_polytope,
                        std::vector<polytope::AffinePiece> pieces, RatVec chi0,
                        std::optional<DiscGroup> gamma) {
    RTestConfig cfg;
    cfg.root_system = std::move(rs);
    cfg.datum = std::move(datum);
    cfg.chi0 = std::move(chi0);
    PLConcave raw = PLConcave::build(std::move(moment_polytope), std::move(pieces));
    SymReal m = raw.min_over_domain();
    cfg.shift = m;
    cfg.f = raw.shifted(-m);
    if (gamma)
        cfg.gamma = *std::move(gamma);
    else
        cfg.gamma = reduced_group(cfg);
    return cfg;
}

std::vector<Diagnostic> validate(const RTestConfig& cfg) {
    std::vector<Diagnostic> out;
    const auto& dom = cfg.f.domain();

    // the moment polytope must live in chi0 + span(M)
    for (const auto& v : dom.vertices()) {
        try {
            cfg.datum.to_lattice_coords(sub(v, cfg.chi0));
        } catch (const validation_error&) {
            std::string w = "vertex";
            for (const auto& x : v) w += " " + rat_to_string(x);
            out.push_back({"domain_in_lattice_span", w});
            return out;  // everything else depends on this
        }
    }

    try {
        SymReal m = cfg.f.min_over_domain();
        if (m.sign() != 0) {
            RatVec arg = cfg.f.argmin_vertex();
            std::string w = "min " + m.to_string() + " at vertex";
            for (const auto& x : arg) w += " " + rat_to_string(x);
            out.push_back({"min_normalized_to_zero", w});
        }
    } catch (const precision_error& e) {
        out.push_back({"min_normalized_to_zero", e.what()});
    }

    try {
        spherical::ValCone v = spherical::valuation_cone(cfg.datum);
        auto check = polytope::grad_in_cone(cfg.f, v.cone, cfg.datum.lattice_basis);
        if (!check.ok) {
            std::string w = "piece " + std::to_string(check.piece) + " violates normal";
            for (const auto& x : check.violated) w += " " + rat_to_string(x);
            out.push_back({"gradient_in_valuation_cone", w});
        }
    } catch (const std::exception& e) {
        out.push_back({"gradient_in_valuation_cone", e.what()});
    }

    try {
        DiscGroup needed = vertex_group(cfg);
        for (const auto& g : needed.generators()) {
            if (!cfg.gamma.contains(g)) {
                out.push_back({"group_contains_vertex_values",
                               "missing value " + g.to_string()});
                break;
            }
        }
    } catch (const std::exception& e) {
        out.push_back({"group_contains_vertex_values", e.what()});
    }
    return out;
}

Int vertex_level(const RTestConfig& cfg) {
    Int r0 = 1;
    for (const auto& v : cfg.f.cell_vertices()) {
        RatVec c = cfg.datum.to_lattice_coords(sub(v, cfg.chi0));
        for (const auto& x : c) r0 = lcm(r0, denominator(x));
    }
    return r0;
}

DiscGroup vertex_group(const RTestConfig& cfg) {
    Int r0 = vertex_level(cfg);
    SymBasisPtr basis = cfg.gamma.basis();
    std::vector<SymReal> gens;
    for (const auto& v : cfg.f.cell_vertices())
        gens.push_back(cfg.f.eval(v) * Rat(r0));
    return DiscGroup(basis, std::move(gens));
}

DiscGroup reduced_group(const RTestConfig& cfg) {
    Int r0 = vertex_level(cfg);
    SymBasisPtr basis = common_basis(cfg.f.pieces(), std::nullopt);
    std::vector<SymReal> gens;
    for (const auto& lam :
         polytope::lattice_points(cfg.f.domain(), r0, cfg.datum.lattice_basis, cfg.chi0)) {
        RatVec x(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) x[i] = lam[i] / Rat(r0);
        gens.push_back(cfg.f.eval(x) * Rat(r0));
    }
    return DiscGroup(basis, std::move(gens));
}

namespace {

void require_in_slice(const RTestConfig& cfg, const RatVec& lambda, const Int& k) {
    if (k <= 0) throw std::invalid_argument("level must be positive");
    if (!cfg.f.domain().scaled(Rat(k)).contains(lambda))
        throw validation_error("weight is outside k times the moment polytope");
    RatVec rel = sub(lambda, scale(cfg.chi0, Rat(k)));
    RatVec c = cfg.datum.to_lattice_coords(rel);
    for (const auto& x : c)
        if (denominator(x) != 1)
            throw validation_error("weight is not in the lattice slice at this level");
}

RatVec divided(const RatVec& lambda, const Int& k) {
    RatVec x(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) x[i] = lambda[i] / Rat(k);
    return x;
}

}  // namespace

SymReal filtration_point(const RTestConfig& cfg, const RatVec& lambda, const Int& k) {
    require_in_slice(cfg, lambda, k);
    SymReal t = cfg.f.eval(divided(lambda, k)) * Rat(k);
    return cfg.gamma.sup_leq(t);
}

SymReal reduced_filtration_point(const RTestConfig& cfg, const RatVec& lambda, const Int& k) {
    require_in_slice(cfg, lambda, k);
    return cfg.f.eval(divided(lambda, k)) * Rat(k);
}

RTestConfig special_rtc(std::shared_ptr<const lie::RootSystem> rs,
                        const spherical::SphericalDatum& datum,
                        const polytope::RationalPolytope& moment_polytope,
                        const RatVec& chi0, const SymVec& lambda) {
    spherical::ValCone v = spherical::valuation_cone(datum);
    if (auto bad = v.cone.violated_normal(lambda)) {
        std::string w = "covector outside the valuation cone; violated normal";
        for (const auto& x : *bad) w += " " + rat_to_string(x);
        throw validation_error(w);
    }
    // ambient gradient g with <g, m_j> = lambda_j, solved per basis symbol
    int amb = moment_polytope.ambient_dim();
    int r = datum.rank();
    SymBasisPtr basis = lambda.empty() ? SymBasis::rational_only() : lambda[0].basis();
    int nsym = basis->size();
    RatMat a(datum.lattice_basis.begin(), datum.lattice_basis.end());
    std::vector<RatVec> per_symbol;  // ambient vector per symbol
    for (int s = 0; s < nsym; ++s) {
        RatVec rhs(r);
        for (int j = 0; j < r; ++j) {
            const auto& c = lambda[j].coeffs();
            rhs[j] = s < static_cast<int>(c.size()) ? c[s] : Rat(0);
        }
        auto sol = solve(a, rhs);
        if (!sol) throw std::logic_error("special_rtc: gradient lift failed");
        per_symbol.push_back(*sol);
    }
    SymVec grad;
    for (int i = 0; i < amb; ++i) {
        RatVec coef(nsym);
        for (int s = 0; s < nsym; ++s) coef[s] = per_symbol[s][i];
        grad.emplace_back(basis, std::move(coef));
    }
    std::vector<AffinePiece> pieces{AffinePiece{std::move(grad), SymReal(Rat(0))}};
    return make_config(std::move(rs), datum, moment_polytope, std::move(pieces), chi0);
}

bool is_irreducible(const RTestConfig& cfg) { return cfg.f.cells().size() == 1; }

Int base_change(const RTestConfig& cfg, const Int& d, const RatVec& lambda, const Int& k) {
    if (d <= 0) throw std::invalid_argument("base_change: d must be positive");
    if (cfg.gamma.rank() > 1)
        throw validation_error("base_change: discontinuity group is not integral");
    for (const auto& g : cfg.gamma.generators()) {
        if (!g.is_rational() || denominator(g.rational()) != 1)
            throw validation_error("base_change: discontinuity group is not integral");
    }
    require_in_slice(cfg, lambda, k);
    SymReal t = cfg.f.eval(divided(lambda, k)) * Rat(k * d);
    return t.floor();
}

PLConcave approx_fp(const RTestConfig& cfg, const Int& p) {
    if (p <= 0) throw std::invalid_argument("approx_fp: p must be positive");
    std::vector<std::pair<RatVec, Rat>> constraints;
    for (const auto& lam :
         polytope::lattice_points(cfg.f.domain(), p, cfg.datum.lattice_basis, cfg.chi0)) {
        SymReal s = filtration_point(cfg, lam, p);
        constraints.emplace_back(divided(lam, p), Rat(s.floor(), p));
    }
    if (constraints.empty())
        throw numeric_error("approx_fp: no lattice points at level " + p.str());
    return polytope::concave_envelope(cfg.f.domain(), constraints);
}

Int graded_dims(const RTestConfig& cfg, const Int& k, const SymReal& s) {
    Int total = 0;
    for (const auto& lam :
         polytope::lattice_points(cfg.f.domain(), k, cfg.datum.lattice_basis, cfg.chi0)) {
        SymReal v = filtration_point(cfg, lam, k);
        if ((v - s).sign() >= 0)
            total += lie::weyl_dim(*cfg.root_system, lie::Weight{lam});
    }
    return total;
}

std::vector<FiltrationRow> filtration_table(const RTestConfig& cfg, const Int& k_max) {
    std::vector<FiltrationRow> rows;
    int amb = cfg.f.domain().ambient_dim();
    rows.push_back({Int(0), RatVec(amb, Rat(0)), SymReal(Rat(0))});
    for (Int k = 1; k <= k_max; ++k) {
        for (const auto& lam :
             polytope::lattice_points(cfg.f.domain(), k, cfg.datum.lattice_basis, cfg.chi0))
            rows.push_back({k, lam, filtration_point(cfg, lam, k)});
    }
    return rows;
}

namespace {

// Membership of (target, level) in the N-span of graded generators. Returns
// nullopt when the level-zero part cannot be bounded.
std::optional<bool> monoid_member(const std::vector<MonoidGenerator>& gens,
                                  const RatVec& target, const Int& level) {
    std::vector<const MonoidGenerator*> pos, zero;
    for (const auto& g : gens)
        (g.level > 0 ? pos : zero).push_back(&g);
    if (!zero.empty()) {
        // positivity certificate for the level-zero generators
        RatVec phi(target.size(), Rat(0));
        for (const auto* g : zero) phi = add(phi, g->weight.coords);
        for (const auto* g : zero)
            if (dot(phi, g->weight.coords) <= 0) return std::nullopt;
    }

    std::function<bool(const RatVec&)> zero_part = [&](const RatVec& resid) {
        if (is_zero(resid)) return true;
        if (zero.empty()) return false;
        RatVec phi(resid.size(), Rat(0));
        for (const auto* g : zero) phi = add(phi, g->weight.coords);
        if (dot(phi, resid) < 0) return false;
        std::function<bool(std::size_t, const RatVec&)> rec2 =
            [&](std::size_t i, const RatVec& rem) -> bool {
            if (is_zero(rem)) return true;
            if (i == zero.size()) return false;
            // bound on this generator's coefficient via the certificate
            Rat cap = dot(phi, rem) / dot(phi, zero[i]->weight.coords);
            Int hi = floor_rat(cap);
            RatVec cur = rem;
            for (Int n = 0; n <= hi; ++n) {
                if (rec2(i + 1, cur)) return true;
                cur = sub(cur, zero[i]->weight.coords);
            }
            return false;
        };
        return rec2(0, resid);
    };

    std::function<bool(std::size_t, const RatVec&, const Int&)> rec =
        [&](std::size_t i, const RatVec& rem, const Int& lev) -> bool {
        if (i == pos.size()) return lev == 0 && zero_part(rem);
        Int hi = lev / pos[i]->level;
        RatVec cur = rem;
        for (Int n = 0; n <= hi; ++n) {
            if (rec(i + 1, cur, lev - n * pos[i]->level)) return true;
            cur = sub(cur, pos[i]->weight.coords);
        }
        return false;
    };
    return rec(0, target, level);
}

}  // namespace

TailResult mult_tails(const lie::RootSystem& rs, const spherical::SphericalDatum& datum,
                      const std::optional<std::vector<MonoidGenerator>>& monoid,
                      const lie::Weight& l1, const Int& k1, const lie::Weight& l2,
                      const Int& k2) {
    if (k1 <= 0 || k2 <= 0) throw std::invalid_argument("mult_tails: levels must be positive");
    auto decomposition = lie::tensor_decompose(rs, l1, l2);
    RatVec sum = add(l1.coords, l2.coords);

    TailResult out;
    out.status = monoid ? TailStatus::exact : TailStatus::upper_set;

    std::optional<polytope::PolyCone> root_cone;
    if (!monoid) {
        int amb = rs.ambient_dim();
        root_cone = polytope::PolyCone::from_generators(amb, datum.spherical_roots);
    }

    for (const auto& [summand, mult] : decomposition) {
        RatVec mu = sub(sum, summand.coords);
        if (monoid) {
            if (monoid->empty()) continue;
            auto member = monoid_member(*monoid, summand.coords, k1 + k2);
            if (!member) { out.status = TailStatus::inconclusive; continue; }
            if (*member) out.tails.push_back(std::move(mu));
        } else {
            if (root_cone->contains(mu)) out.tails.push_back(std::move(mu));
        }
    }
    std::sort(out.tails.begin(), out.tails.end(), lex_less);
    return out;
}

}  // namespace sphdegen::rtc
