#include "sphdegen/fano.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace sphdegen::fano {

using polytope::RationalPolytope;

std::vector<lie::Weight> active_roots(const lie::RootSystem& rs,
                                      const RationalPolytope& delta) {
    std::vector<lie::Weight> act;
    for (const auto& a : rs.positive_roots()) {
        bool orthogonal = true;
        for (const auto& u : delta.span_directions())
            if (rs.pair(a.coords, u) != 0) { orthogonal = false; break; }
        if (!orthogonal) act.push_back(a);
    }
    return act;
}

lie::Weight kappa_p(const lie::RootSystem& rs, const RationalPolytope& delta) {
    RatVec k(rs.ambient_dim(), Rat(0));
    for (const auto& a : active_roots(rs, delta)) k = add(k, a.coords);
    return lie::Weight{std::move(k)};
}

FanoProblem::FanoProblem(std::shared_ptr<const lie::RootSystem> rs,
                         spherical::SphericalDatum datum, RationalPolytope delta_plus,
                         RatVec chi0, double tol)
    : rs_(std::move(rs)),
      datum_(std::move(datum)),
      delta_(std::move(delta_plus)),
      chi0_(std::move(chi0)),
      tol_(tol),
      order_(4) {
    kappa_ = kappa_p(*rs_, delta_);
    active_ = active_roots(*rs_, delta_);

    std::vector<RatVec> zverts;
    for (const auto& v : delta_.vertices()) zverts.push_back(to_z(v));
    zpoly_ = RationalPolytope::from_vertices(rank(), zverts);
    if (zpoly_.dim() != rank())
        throw validation_error(
            "moment polytope is not full-dimensional in the lattice span");

    // order escalation until the volume normalization is stable
    build_nodes();
    for (; order_ <= 12; ) {
        double v_low = v_norm_;
        order_ += 2;
        build_nodes();
        if (std::fabs(v_norm_ - v_low) <= 0.01 * tol_ * std::fabs(v_norm_)) break;
    }
    if (v_norm_ <= 0) throw numeric_error("volume normalization is not positive");
}

RatVec FanoProblem::to_z(const RatVec& ambient) const {
    return datum_.to_lattice_coords(sub(ambient, chi0_));
}

RatVec FanoProblem::ambient_of_z(const RatVec& z) const {
    RatVec y = chi0_;
    for (int j = 0; j < rank(); ++j) y = add(y, scale(datum_.lattice_basis[j], z[j]));
    return y;
}

double FanoProblem::density(const RatVec& ambient) const {
    double p = 1;
    for (const auto& a : active_)
        p *= rat_to_double(rs_->pair(a.coords, ambient));
    return p;
}

double FanoProblem::density(const std::vector<double>& ambient) const {
    double p = 1;
    for (const auto& a : active_) {
        double s = 0;
        for (std::size_t i = 0; i < ambient.size(); ++i)
            s += rat_to_double(a.coords[i]) * ambient[i];
        p *= s;
    }
    return p;
}

double FanoProblem::density_constant() const {
    double s = 0;
    for (const auto& a : active_)
        s += std::log(rat_to_double(rs_->pair(a.coords, rs_->rho().coords)));
    return s;
}

void FanoProblem::build_nodes() {
    nodes_.clear();
    int r = rank();
    std::vector<std::vector<double>> basis_d(r, std::vector<double>(delta_.ambient_dim()));
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < delta_.ambient_dim(); ++i)
            basis_d[j][i] = rat_to_double(datum_.lattice_basis[j][i]);
    std::vector<double> chi_d;
    for (const auto& x : chi0_) chi_d.push_back(rat_to_double(x));

    for (const auto& simplex : quad::triangulate(zpoly_)) {
        std::vector<std::vector<double>> sd;
        for (const auto& v : simplex) {
            std::vector<double> vd;
            for (const auto& x : v) vd.push_back(rat_to_double(x));
            sd.push_back(std::move(vd));
        }
        quad::GMRule rule = quad::gm_rule(sd, order_);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            Node n;
            n.z = rule.nodes[i];
            n.ambient = chi_d;
            for (int j = 0; j < r; ++j)
                for (std::size_t t = 0; t < n.ambient.size(); ++t)
                    n.ambient[t] += n.z[j] * basis_d[j][t];
            n.weight = rule.weights[i] * density(n.ambient);
            nodes_.push_back(std::move(n));
        }
    }
    v_norm_ = 0;
    for (const auto& n : nodes_) v_norm_ += n.weight;
}

void FanoProblem::refine() {
    order_ += 2;
    if (order_ > 20) throw numeric_error("quadrature refinement limit reached");
    build_nodes();
}

IntegralValue integrate_exp_poly(const RationalPolytope& delta,
                                 const std::vector<double>& lambda_lin, double lambda_const,
                                 const std::vector<std::vector<double>>& pi_forms,
                                 double rel_tol) {
    if (rel_tol <= 0) throw std::invalid_argument("tolerance must be positive");
    auto f = [&](const std::vector<double>& y) {
        double e = lambda_const;
        for (std::size_t i = 0; i < y.size(); ++i) e += lambda_lin[i] * y[i];
        double p = 1;
        for (const auto& form : pi_forms) {
            double s = 0;
            for (std::size_t i = 0; i < y.size(); ++i) s += form[i] * y[i];
            p *= s;
        }
        return std::exp(-e) * p;
    };
    quad::IntegralResult r = quad::integrate(delta, f, rel_tol);
    return {r.value, r.error_estimate};
}

namespace {

struct Moments {
    double j = 0;                  // ln((1/V) sum w exp(-a))
    std::vector<double> ez;        // E[z]
    std::vector<std::vector<double>> cov;
};

// a_q = <lambda, z_q - z_ref>; log-shifted for stability
Moments moments(const FanoProblem& prob, const std::vector<double>& lambda,
                const std::vector<double>& z_ref, bool with_cov) {
    int r = prob.rank();
    const auto& nodes = prob.nodes();
    std::vector<double> a(nodes.size());
    double amin = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        double s = 0;
        for (int j = 0; j < r; ++j) s += lambda[j] * (nodes[q].z[j] - z_ref[j]);
        a[q] = s;
        if (q == 0 || s < amin) amin = s;
    }
    double s0 = 0;
    std::vector<double> s1(r, 0.0);
    std::vector<std::vector<double>> s2;
    if (with_cov) s2.assign(r, std::vector<double>(r, 0.0));
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        double w = nodes[q].weight * std::exp(-(a[q] - amin));
        s0 += w;
        for (int j = 0; j < r; ++j) s1[j] += w * nodes[q].z[j];
        if (with_cov)
            for (int j = 0; j < r; ++j)
                for (int t = j; t < r; ++t) s2[j][t] += w * nodes[q].z[j] * nodes[q].z[t];
    }
    Moments m;
    m.j = -amin + std::log(s0) - std::log(prob.v_norm());
    m.ez.resize(r);
    for (int j = 0; j < r; ++j) m.ez[j] = s1[j] / s0;
    if (with_cov) {
        m.cov.assign(r, std::vector<double>(r, 0.0));
        for (int j = 0; j < r; ++j)
            for (int t = j; t < r; ++t) {
                double c = s2[j][t] / s0 - m.ez[j] * m.ez[t];
                m.cov[j][t] = m.cov[t][j] = c;
            }
    }
    return m;
}

std::vector<double> z_ref_of(const FanoProblem& prob, bool two_kappa) {
    RatVec ref = prob.kappa().coords;
    if (two_kappa) ref = scale(ref, Rat(2));
    RatVec z = prob.to_z(ref);
    std::vector<double> zd;
    for (const auto& x : z) zd.push_back(rat_to_double(x));
    return zd;
}

}  // namespace

std::vector<double> barycenter(const FanoProblem& prob, const std::vector<double>& lambda_z) {
    std::vector<double> zero(prob.rank(), 0.0);
    Moments m = moments(prob, lambda_z, zero, false);
    // ambient barycenter from E[z]
    std::vector<double> b;
    for (const auto& x : prob.chi0()) b.push_back(rat_to_double(x));
    for (int j = 0; j < prob.rank(); ++j)
        for (std::size_t t = 0; t < b.size(); ++t)
            b[t] += m.ez[j] * rat_to_double(prob.datum().lattice_basis[j][t]);
    return b;
}

SymReal l_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, bool two_kappa) {
    RatVec ref = prob.kappa().coords;
    if (two_kappa) ref = scale(ref, Rat(2));
    if (!cfg.f.domain().contains(ref))
        throw validation_error("reference point is outside the moment polytope");
    return cfg.f.eval(ref);
}

double s_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, double tol) {
    if (!(cfg.f.domain() == prob.delta_plus()))
        throw validation_error("configuration domain differs from the moment polytope");
    double total = 0;
    int r = prob.rank();
    for (std::size_t ci = 0; ci < cfg.f.cells().size(); ++ci) {
        const auto& cell = cfg.f.cells()[ci];
        const auto& piece = cfg.f.pieces()[ci];
        std::vector<RatVec> zverts;
        for (const auto& v : cell.vertices()) zverts.push_back(prob.to_z(v));
        RationalPolytope zcell = RationalPolytope::from_vertices(r, zverts);
        // f on the cell in z coordinates: <ell, z> + c0
        std::vector<double> ell(r);
        for (int j = 0; j < r; ++j)
            ell[j] = sym_dot(prob.datum().lattice_basis[j], piece.gradient).value_double();
        double c0 = piece.eval(prob.chi0()).value_double();
        auto f = [&](const std::vector<double>& z) {
            double e = c0;
            for (int j = 0; j < r; ++j) e += ell[j] * z[j];
            RatVec zr;  // ambient point for the density
            std::vector<double> y;
            for (const auto& x : prob.chi0()) y.push_back(rat_to_double(x));
            for (int j = 0; j < r; ++j)
                for (std::size_t t = 0; t < y.size(); ++t)
                    y[t] += z[j] * rat_to_double(prob.datum().lattice_basis[j][t]);
            return std::exp(-e) * prob.density(y);
        };
        total += quad::integrate(zcell, f, tol).value;
    }
    return -std::log(total / prob.v_norm()) + prob.density_constant();
}

double h_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, double tol,
            bool two_kappa) {
    return l_na(cfg, prob, two_kappa).value_double() - s_na(cfg, prob, tol);
}

namespace {

struct KKTSolution {
    Eigen::VectorXd step;
    Eigen::VectorXd mu;
};

KKTSolution solve_kkt(const Eigen::MatrixXd& h, const Eigen::MatrixXd& ns,
                      const Eigen::VectorXd& g) {
    int r = static_cast<int>(h.rows());
    int m = static_cast<int>(ns.rows());
    Eigen::MatrixXd kkt(r + m, r + m);
    kkt.setZero();
    kkt.topLeftCorner(r, r) = h;
    if (m > 0) {
        kkt.topRightCorner(r, m) = ns.transpose();
        kkt.bottomLeftCorner(m, r) = ns;
    }
    Eigen::VectorXd rhs(r + m);
    rhs.head(r) = -g;
    rhs.tail(m).setZero();
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    KKTSolution out;
    out.step = sol.head(r);
    out.mu = sol.tail(m);
    return out;
}

}  // namespace

HReport minimize_h(FanoProblem& prob, const MinimizeOptions& opts) {
    int r = prob.rank();
    spherical::ValCone vc = spherical::valuation_cone(prob.datum());
    int nroots = static_cast<int>(vc.root_functionals.size());
    std::vector<std::vector<double>> normals(nroots, std::vector<double>(r));
    for (int i = 0; i < nroots; ++i)
        for (int j = 0; j < r; ++j)
            normals[i][j] = rat_to_double(vc.root_functionals[i][j]);

    std::vector<double> z_ref = z_ref_of(prob, opts.two_kappa);
    auto eval = [&](const std::vector<double>& lam, bool with_cov) {
        Moments m = moments(prob, lam, z_ref, with_cov);
        m.j = opts.obj_scale * m.j + opts.obj_offset;
        return m;
    };
    auto grad_of = [&](const Moments& m, const std::vector<double>& /*lam*/) {
        Eigen::VectorXd g(r);
        for (int j = 0; j < r; ++j) g(j) = opts.obj_scale * (z_ref[j] - m.ez[j]);
        return g;
    };

    std::vector<double> lam(r, 0.0);
    std::vector<int> active;
    HReport rep;
    rep.ref_point = opts.two_kappa ? "two_kappa" : "kappa";
    rep.dropped_constant = prob.density_constant();

    int outer_limit = 4;
    for (int outer = 0; outer < outer_limit; ++outer) {
        bool converged = false;
        int iterations = 0;
        Eigen::VectorXd mu;
        for (int it = 0; it < opts.max_iter; ++it) {
            iterations = it + 1;
            Moments m = eval(lam, true);
            Eigen::VectorXd g = grad_of(m, lam);
            Eigen::MatrixXd h(r, r);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) h(a, b) = opts.obj_scale * m.cov[a][b];
            for (int a = 0; a < r; ++a) h(a, a) += 1e-14 * (1.0 + std::fabs(h(a, a)));

            Eigen::MatrixXd ns(active.size(), r);
            for (std::size_t i = 0; i < active.size(); ++i)
                for (int j = 0; j < r; ++j) ns(i, j) = normals[active[i]][j];

            KKTSolution kkt = solve_kkt(h, ns, g);
            mu = kkt.mu;
            double step_norm = kkt.step.lpNorm<Eigen::Infinity>();
            double lam_scale = 1.0;
            for (double x : lam) lam_scale = std::max(lam_scale, std::fabs(x));

            if (step_norm <= 1e-13 * lam_scale) {
                // stationary on the active face; check multiplier signs
                int worst = -1;
                double worst_mu = -opts.tol;
                for (int i = 0; i < mu.size(); ++i)
                    if (mu(i) < worst_mu) { worst_mu = mu(i); worst = i; }
                if (worst >= 0) {
                    active.erase(active.begin() + worst);
                    continue;
                }
                converged = true;
                break;
            }

            // ratio test against the inactive constraints
            double alpha_max = std::numeric_limits<double>::infinity();
            int blocking = -1;
            for (int i = 0; i < nroots; ++i) {
                if (std::find(active.begin(), active.end(), i) != active.end()) continue;
                double np = 0, nl = 0;
                for (int j = 0; j < r; ++j) {
                    np += normals[i][j] * kkt.step(j);
                    nl += normals[i][j] * lam[j];
                }
                if (np > 1e-15) {
                    double a = -nl / np;
                    if (a < alpha_max) { alpha_max = a; blocking = i; }
                }
            }
            double alpha = std::min(1.0, alpha_max);
            double j0 = eval(lam, false).j;
            double slope = g.dot(kkt.step);
            std::vector<double> trial(r);
            bool moved = false;
            while (alpha > 1e-18) {
                for (int j = 0; j < r; ++j) trial[j] = lam[j] + alpha * kkt.step(j);
                double jt = eval(trial, false).j;
                if (jt <= j0 + 1e-4 * alpha * slope) { moved = true; break; }
                alpha *= 0.5;
            }
            if (!moved) { converged = true; break; }  // no descent left at this scale
            lam = trial;
            if (blocking >= 0 && alpha >= alpha_max * (1 - 1e-12)) {
                active.push_back(blocking);
                std::sort(active.begin(), active.end());
                // snap exactly onto the active face
                Eigen::MatrixXd na(active.size(), r);
                for (std::size_t i = 0; i < active.size(); ++i)
                    for (int j = 0; j < r; ++j) na(i, j) = normals[active[i]][j];
                Eigen::VectorXd lvec(r);
                for (int j = 0; j < r; ++j) lvec(j) = lam[j];
                Eigen::VectorXd resid = na * lvec;
                Eigen::VectorXd corr =
                    na.transpose() * (na * na.transpose()).fullPivLu().solve(resid);
                for (int j = 0; j < r; ++j) lam[j] -= corr(j);
            }
        }

        // residual of the KKT system at the final iterate
        Moments m = eval(lam, true);
        Eigen::VectorXd g = grad_of(m, lam);
        Eigen::VectorXd stat = g;
        std::vector<double> mus(active.size(), 0.0);
        if (!active.empty()) {
            Eigen::MatrixXd ns(active.size(), r);
            for (std::size_t i = 0; i < active.size(); ++i)
                for (int j = 0; j < r; ++j) ns(i, j) = normals[active[i]][j];
            Eigen::VectorXd best_mu =
                (ns * ns.transpose()).fullPivLu().solve(ns * (-g));
            stat = g + ns.transpose() * best_mu;
            for (std::size_t i = 0; i < active.size(); ++i) mus[i] = best_mu(i);
        }
        double residual = stat.lpNorm<Eigen::Infinity>();
        for (int i = 0; i < nroots; ++i) {
            double nl = 0;
            for (int j = 0; j < r; ++j) nl += normals[i][j] * lam[j];
            residual = std::max(residual, nl);  // feasibility
        }
        for (double mval : mus) residual = std::max(residual, -mval);

        rep.lambda0 = lam;
        rep.kkt_residual = residual;
        rep.active_face = active;
        rep.multipliers = mus;
        rep.iterations = iterations;
        rep.converged = converged && residual <= opts.tol;

        // verify the quadrature is tight enough at the solution
        double j_here = moments(prob, lam, z_ref, false).j;
        prob.refine();
        double j_fine = moments(prob, lam, z_ref, false).j;
        if (std::fabs(j_fine - j_here) <= std::max(0.1 * opts.tol, 1e-13) &&
            rep.converged)
            break;
        if (outer == outer_limit - 1 && !rep.converged)
            throw numeric_error("minimizer did not converge; best residual " +
                                std::to_string(residual));
    }

    Moments m_kappa = moments(prob, lam, z_ref_of(prob, false), false);
    Moments m_two = moments(prob, lam, z_ref_of(prob, true), false);
    rep.objective_kappa = m_kappa.j;
    rep.objective_two_kappa = m_two.j;
    rep.objective = opts.obj_scale * (opts.two_kappa ? m_two.j : m_kappa.j) + opts.obj_offset;
    rep.barycenter = barycenter(prob, lam);
    kr_flow_limit(prob, rep, opts.tol);
    return rep;
}

void kr_flow_limit(const FanoProblem& prob, HReport& report, double tol) {
    int r = prob.rank();
    // w = b - kappa in lattice coordinates: E[z] - z_kappa at the minimizer
    std::vector<double> zero(r, 0.0);
    Moments m = moments(prob, report.lambda0, zero, false);
    std::vector<double> zk = z_ref_of(prob, false);
    std::vector<double> w(r);
    double wscale = 1.0;
    for (int j = 0; j < r; ++j) {
        w[j] = m.ez[j] - zk[j];
        wscale = std::max(wscale, std::fabs(w[j]));
    }

    spherical::ValCone vc = spherical::valuation_cone(prob.datum());
    std::vector<RatVec> gens;
    for (int i : report.active_face) gens.push_back(vc.root_functionals[i]);
    polytope::PolyCone cone = polytope::PolyCone::from_generators(r, gens);

    double margin = tol * 10 * wscale;
    double worst_eq = 0, worst_facet = -std::numeric_limits<double>::infinity();
    for (const auto& e : cone.span_equalities()) {
        double s = 0;
        for (int j = 0; j < r; ++j) s += rat_to_double(e[j]) * w[j];
        worst_eq = std::max(worst_eq, std::fabs(s));
    }
    for (const auto& n : cone.facet_normals()) {
        double s = 0;
        for (int j = 0; j < r; ++j) s += rat_to_double(n[j]) * w[j];
        worst_facet = std::max(worst_facet, s);  // needs to be < 0 for RelInt
    }
    if (cone.facet_normals().empty()) worst_facet = -wscale;

    if (worst_eq > margin || worst_facet > margin) {
        report.kr_flow_limit = "violated";
        report.kr_margin = std::max(worst_eq, worst_facet);
    } else if (worst_facet >= -margin) {
        report.kr_flow_limit = "boundary";
        report.kr_margin = worst_facet;
    } else {
        report.kr_flow_limit = "strict";
        report.kr_margin = worst_facet;
    }
}

}  // namespace sphdegen::fano
