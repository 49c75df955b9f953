#ifndef SPHDEGEN_FANO_HPP
#define SPHDEGEN_FANO_HPP

#include "sphdegen/lie.hpp"
#include "sphdegen/polytope.hpp"
#include "sphdegen/quadrature.hpp"
#include "sphdegen/rtc.hpp"
#include "sphdegen/spherical.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sphdegen::fano {

/// Sum of the positive roots not orthogonal to the affine span of the
/// polytope; the weight of the anticanonical semiinvariant section.
lie::Weight kappa_p(const lie::RootSystem& rs, const polytope::RationalPolytope& delta);

std::vector<lie::Weight> active_roots(const lie::RootSystem& rs,
                                      const polytope::RationalPolytope& delta);

/// Optimization instance for the anticanonical moment polytope. Integration
/// runs in lattice coordinates z (y = chi0 + M z), which normalizes the
/// measure by the lattice covolume; minimizers and barycenters do not depend
/// on this choice.
class FanoProblem {
public:
    FanoProblem(std::shared_ptr<const lie::RootSystem> rs, spherical::SphericalDatum datum,
                polytope::RationalPolytope delta_plus, RatVec chi0, double tol = 1e-9);

    const lie::RootSystem& root_system() const { return *rs_; }
    const spherical::SphericalDatum& datum() const { return datum_; }
    const polytope::RationalPolytope& delta_plus() const { return delta_; }
    const RatVec& chi0() const { return chi0_; }
    const lie::Weight& kappa() const { return kappa_; }
    const std::vector<lie::Weight>& actives() const { return active_; }
    double v_norm() const { return v_norm_; }
    double density_constant() const;  // ln prod_active <alpha, rho>
    int rank() const { return static_cast<int>(datum_.lattice_basis.size()); }

    // z-coordinates of an ambient point of chi0 + span(M)
    RatVec to_z(const RatVec& ambient) const;
    RatVec ambient_of_z(const RatVec& z) const;

    // Duistermaat-Heckman density at an ambient point
    double density(const RatVec& ambient) const;
    double density(const std::vector<double>& ambient) const;

    struct Node {
        std::vector<double> z;
        std::vector<double> ambient;
        double weight;  // quadrature weight times density
    };
    const std::vector<Node>& nodes() const { return nodes_; }
    void refine();  // rebuild the node cache at the next quadrature order

private:
    void build_nodes();

    std::shared_ptr<const lie::RootSystem> rs_;
    spherical::SphericalDatum datum_;
    polytope::RationalPolytope delta_;
    RatVec chi0_;
    lie::Weight kappa_;
    std::vector<lie::Weight> active_;
    polytope::RationalPolytope zpoly_;
    double tol_;
    int order_;
    std::vector<Node> nodes_;
    double v_norm_ = 0;
};

struct IntegralValue {
    double value;
    double error_estimate;
};

/// integral over Delta of exp(-<lambda_lin, y> - lambda_const) * pi(y) dy
/// with pi a product of linear forms <form_i, y>; full-dimensional Delta in
/// its ambient coordinates.
IntegralValue integrate_exp_poly(const polytope::RationalPolytope& delta,
                                 const std::vector<double>& lambda_lin, double lambda_const,
                                 const std::vector<std::vector<double>>& pi_forms,
                                 double rel_tol);

/// Weighted barycenter of the problem under exp(-Lambda(y)) times the density.
std::vector<double> barycenter(const FanoProblem& prob, const std::vector<double>& lambda_z);

/// f evaluated at the reference point (kappa by default, 2 kappa optionally).
SymReal l_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, bool two_kappa = false);

/// Entropy-type functional: -ln((1/V) integral e^{-f} pi) + ln prod <alpha,rho>,
/// integrated cell by cell over the domains of linearity.
double s_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, double tol);

double h_na(const rtc::RTestConfig& cfg, const FanoProblem& prob, double tol,
            bool two_kappa = false);

struct MinimizeOptions {
    double tol = 1e-8;
    int max_iter = 200;
    double obj_scale = 1.0;   // minimize obj_scale * J + obj_offset
    double obj_offset = 0.0;
    bool two_kappa = false;   // reference point choice
};

struct HReport {
    std::vector<double> lambda0;       // coordinates dual to the lattice basis
    double objective = 0;              // at the chosen reference point
    double objective_kappa = 0;
    double objective_two_kappa = 0;
    double kkt_residual = 0;
    std::vector<int> active_face;      // spherical root indices
    std::vector<double> multipliers;
    std::vector<double> barycenter;    // ambient coordinates
    std::string kr_flow_limit;         // strict | boundary | violated
    double kr_margin = 0;
    std::string ref_point;             // kappa | two_kappa
    double dropped_constant = 0;       // ln prod <alpha, rho>
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton with active-set projection onto the facets of the valuation
/// cone; starts at 0, certifies the KKT system to the requested residual.
HReport minimize_h(FanoProblem& prob, const MinimizeOptions& opts = {});

/// Tests the barycenter condition for the central fibre at the minimizer and
/// fills kr_flow_limit / kr_margin of the report.
void kr_flow_limit(const FanoProblem& prob, HReport& report, double tol = 1e-8);

}  // namespace sphdegen::fano

#endif
