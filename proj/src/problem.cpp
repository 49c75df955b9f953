#include "sphdegen/problem.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sphdegen::io {

namespace {

RatVec parse_rat_vec(const json& j) {
    if (!j.is_array()) throw parse_error("expected an array of rationals");
    RatVec v;
    for (const auto& x : j) {
        if (x.is_string())
            v.push_back(parse_rat(x.get<std::string>()));
        else if (x.is_number_integer())
            v.push_back(Rat(x.get<long long>()));
        else
            throw parse_error("rationals must be strings like \"3/4\" or integers");
    }
    return v;
}

SymReal parse_symnum(const json& j, const SymBasisPtr& basis) {
    if (j.is_string()) return SymReal(parse_rat(j.get<std::string>()));
    if (j.is_number_integer()) return SymReal(Rat(j.get<long long>()));
    if (j.is_object()) {
        RatVec c(basis->size(), Rat(0));
        for (const auto& [name, val] : j.items()) {
            int idx = basis->index_of(name);
            if (idx < 0) throw parse_error("unknown basis symbol: " + name);
            c[idx] = val.is_string() ? parse_rat(val.get<std::string>())
                                     : Rat(val.get<long long>());
        }
        return SymReal(basis, std::move(c));
    }
    throw parse_error("expected a rational string or a {symbol: coeff} object");
}

int parse_root_name(const std::string& s, int nroots) {
    if (s.rfind("alpha", 0) != 0) throw parse_error("root names look like \"alpha1\": " + s);
    int idx = 0;
    try {
        idx = std::stoi(s.substr(5));
    } catch (const std::exception&) {
        throw parse_error("bad root name: " + s);
    }
    if (idx < 1 || idx > nroots)
        throw parse_error("root name out of range for this root system: " + s);
    return idx - 1;
}

polytope::RationalPolytope parse_polytope(const json& j) {
    if (j.contains("vertices")) {
        std::vector<RatVec> vs;
        for (const auto& v : j.at("vertices")) vs.push_back(parse_rat_vec(v));
        if (vs.empty()) throw parse_error("polytope needs at least one vertex");
        return polytope::RationalPolytope::from_vertices(static_cast<int>(vs[0].size()), vs);
    }
    if (j.contains("halfspaces")) {
        std::vector<polytope::Halfspace> hs;
        int dim = -1;
        for (const auto& h : j.at("halfspaces")) {
            RatVec n = parse_rat_vec(h.at("normal"));
            Rat b = h.at("offset").is_string() ? parse_rat(h.at("offset").get<std::string>())
                                               : Rat(h.at("offset").get<long long>());
            dim = static_cast<int>(n.size());
            hs.push_back({std::move(n), std::move(b)});
        }
        if (dim < 0) throw parse_error("polytope needs vertices or halfspaces");
        return polytope::RationalPolytope::from_halfspaces(dim, hs);
    }
    throw parse_error("polytope needs \"vertices\" or \"halfspaces\"");
}

}  // namespace

ProblemFile parse_problem(const json& j) {
    ProblemFile pf;

    // root system; absent means a pure torus sized by the polytope
    std::vector<std::pair<lie::Family, int>> factors;
    int torus_rank = 0;
    if (j.contains("root_system")) {
        const auto& r = j.at("root_system");
        for (const auto& f : r.value("factors", json::array()))
            factors.emplace_back(lie::family_from_string(f.at("family").get<std::string>()),
                                 f.value("rank", 0));
        torus_rank = r.value("torus_rank", 0);
    }

    if (j.contains("polytope")) pf.poly = parse_polytope(j.at("polytope"));

    if (!j.contains("root_system")) {
        if (!pf.poly) throw parse_error("need a root_system or a polytope to size the torus");
        torus_rank = pf.poly->ambient_dim();
    }
    pf.root_system =
        std::make_shared<lie::RootSystem>(lie::RootSystem::make(factors, torus_rank));
    int amb = pf.root_system->ambient_dim();
    if (pf.poly && pf.poly->ambient_dim() != amb)
        throw parse_error("polytope dimension disagrees with the root system ambient space");

    // symbol basis
    if (j.contains("group") && j.at("group").contains("basis")) {
        std::vector<std::pair<std::string, std::string>> syms;
        for (const auto& b : j.at("group").at("basis")) {
            std::string name = b.at("name").get<std::string>();
            std::string value = b.at("value").is_string()
                                    ? b.at("value").get<std::string>()
                                    : std::to_string(b.at("value").get<double>());
            syms.emplace_back(name, value);
        }
        pf.basis = SymBasis::make(syms);
    } else {
        pf.basis = SymBasis::rational_only();
    }

    // spherical datum; default: full lattice, no spherical roots (torus case)
    if (j.contains("datum")) {
        const auto& d = j.at("datum");
        for (const auto& m : d.at("M")) pf.datum.lattice_basis.push_back(parse_rat_vec(m));
        for (const auto& s : d.value("spherical_roots", json::array()))
            pf.datum.spherical_roots.push_back(parse_rat_vec(s));
        for (const auto& p : d.value("pi_p", json::array()))
            pf.datum.pi_p.push_back(parse_root_name(p.get<std::string>(),
                                                    pf.root_system->semisimple_rank()));
        for (const auto& c : d.value("colours_a", json::array())) {
            int idx = parse_root_name(c.at("root").get<std::string>(),
                                      pf.root_system->semisimple_rank());
            pf.datum.colours_a.push_back({c.at("id").get<std::string>(), idx,
                                          pf.root_system->simple_roots()[idx]});
        }
        for (const auto& c : d.value("colours_other", json::array()))
            pf.datum.colours_other.push_back(c.get<std::string>());
    } else {
        for (int i = 0; i < amb; ++i) {
            RatVec e(amb, Rat(0));
            e[i] = 1;
            pf.datum.lattice_basis.push_back(std::move(e));
        }
    }
    pf.datum.validate(pf.root_system.get());

    pf.chi0 = j.contains("chi0") ? parse_rat_vec(j.at("chi0")) : RatVec(amb, Rat(0));
    if (static_cast<int>(pf.chi0.size()) != amb)
        throw parse_error("chi0 dimension mismatch");

    if (j.contains("group")) {
        std::vector<SymReal> gens;
        for (const auto& g : j.at("group").value("generators", json::array())) {
            if (g.is_array()) {
                RatVec c = parse_rat_vec(g);
                c.resize(pf.basis->size(), Rat(0));
                gens.emplace_back(pf.basis, std::move(c));
            } else {
                gens.push_back(parse_symnum(g, pf.basis));
            }
        }
        pf.group = DiscGroup(pf.basis, std::move(gens));
    }

    if (j.contains("f")) {
        std::vector<polytope::AffinePiece> pieces;
        for (const auto& p : j.at("f").at("pieces")) {
            SymVec grad;
            for (const auto& g : p.at("gradient")) grad.push_back(parse_symnum(g, pf.basis));
            SymReal c = p.contains("constant") ? parse_symnum(p.at("constant"), pf.basis)
                                               : SymReal(Rat(0));
            if (static_cast<int>(grad.size()) != amb)
                throw parse_error("piece gradient dimension mismatch");
            pieces.push_back({std::move(grad), std::move(c)});
        }
        pf.pieces = std::move(pieces);
    }

    if (j.contains("lambda")) {
        SymVec l;
        for (const auto& x : j.at("lambda")) l.push_back(parse_symnum(x, pf.basis));
        if (static_cast<int>(l.size()) != pf.datum.rank())
            throw parse_error("lambda must have one coordinate per lattice basis vector");
        pf.lambda = std::move(l);
    }

    if (j.contains("monoid")) {
        std::vector<rtc::MonoidGenerator> gens;
        for (const auto& g : j.at("monoid")) {
            rtc::MonoidGenerator mg;
            mg.weight = lie::Weight{parse_rat_vec(g.at("weight"))};
            mg.level = Int(g.at("level").get<long long>());
            gens.push_back(std::move(mg));
        }
        pf.monoid = std::move(gens);
    }

    if (j.contains("tolerances")) {
        pf.tol = j.at("tolerances").value("tol", 1e-8);
        pf.ref_point = j.at("tolerances").value("ref_point", "kappa");
    }
    return pf;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot read problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("JSON parse failure: ") + e.what());
    }
    try {
        return parse_problem(j);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("problem file schema: ") + e.what());
    }
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot read problem file: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

rtc::RTestConfig build_config(const ProblemFile& pf) {
    if (!pf.poly) throw validation_error("problem file has no polytope");
    if (!pf.pieces) throw validation_error("problem file has no function f");
    return rtc::make_config(pf.root_system, pf.datum, *pf.poly, *pf.pieces, pf.chi0,
                            pf.group);
}

json rat_vec_to_json(const RatVec& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rat_to_string(x));
    return a;
}

json datum_to_json(const spherical::SphericalDatum& d) {
    json out;
    json m = json::array();
    for (const auto& b : d.lattice_basis) m.push_back(rat_vec_to_json(b));
    out["M"] = m;
    json roots = json::array();
    for (const auto& r : d.spherical_roots) roots.push_back(rat_vec_to_json(r));
    out["spherical_roots"] = roots;
    json pip = json::array();
    for (int i : d.pi_p) pip.push_back("alpha" + std::to_string(i + 1));
    out["pi_p"] = pip;
    json cols = json::array();
    for (const auto& c : d.colours_a) {
        json cj;
        cj["id"] = c.id;
        cj["root"] = "alpha" + std::to_string(c.root_index + 1);
        cols.push_back(cj);
    }
    out["colours_a"] = cols;
    if (!d.colours_other.empty()) out["colours_other"] = d.colours_other;
    return out;
}

namespace {

json num(double v) {
    // fixed, locale-free text form keeps reports byte-stable
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return json(std::string(buf));
}

}  // namespace

json hreport_to_json(const fano::HReport& r) {
    json out;
    json l0 = json::array();
    for (double x : r.lambda0) l0.push_back(num(x));
    out["lambda0"] = l0;
    out["objective"] = num(r.objective);
    out["kkt_residual"] = num(r.kkt_residual);
    json af = json::array();
    for (int i : r.active_face) af.push_back("alpha_sph" + std::to_string(i + 1));
    out["active_face"] = af;
    json mus = json::array();
    for (double m : r.multipliers) mus.push_back(num(m));
    out["multipliers"] = mus;
    json b = json::array();
    for (double x : r.barycenter) b.push_back(num(x));
    out["barycenter"] = b;
    out["kr_flow_limit"] = r.kr_flow_limit;
    out["kr_margin"] = num(r.kr_margin);
    out["ref_point"] = r.ref_point;
    out["dropped_constant"] = num(r.dropped_constant);
    out["objective_kappa"] = num(r.objective_kappa);
    out["objective_two_kappa"] = num(r.objective_two_kappa);
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
}

std::string filtration_csv(const std::vector<rtc::FiltrationRow>& rows, int ambient_dim) {
    std::ostringstream os;
    os << "k";
    for (int i = 0; i < ambient_dim; ++i) os << ",lambda_" << i;
    os << ",s_value_symbolic,s_value_decimal\n";
    for (const auto& r : rows) {
        os << r.k.str();
        for (const auto& x : r.lambda) os << "," << rat_to_string(x);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", r.value.value_double());
        os << ",\"" << r.value.to_string() << "\"," << buf << "\n";
    }
    return os.str();
}

json make_report(const std::string& command, const std::string& digest, json outputs,
                 std::vector<std::string> warnings) {
    json rep;
    rep["command"] = command;
    rep["input_digest"] = digest;
    rep["library_version"] = kVersion;
    rep["outputs"] = std::move(outputs);
    rep["warnings"] = warnings;
    return rep;
}

}  // namespace sphdegen::io
