#ifndef SPHDEGEN_QUADRATURE_HPP
#define SPHDEGEN_QUADRATURE_HPP

#include "sphdegen/polytope.hpp"

#include <functional>
#include <vector>

namespace sphdegen::quad {

/// Deterministic triangulation: lexicographic fan from the first vertex.
/// Simplices are (dim+1)-tuples of vertices, only for full-dimensional input.
std::vector<std::vector<RatVec>> triangulate(const polytope::RationalPolytope& p);

/// Grundmann-Moller rule of degree 2s+1 on the simplex with the given
/// vertices (full-dimensional). Returns sum(w_i f(x_i)); weights include the
/// simplex volume.
struct GMRule {
    std::vector<std::vector<double>> nodes;
    std::vector<double> weights;
};
GMRule gm_rule(const std::vector<std::vector<double>>& simplex, int s);

using Integrand = std::function<double(const std::vector<double>&)>;

struct IntegralResult {
    double value = 0;
    double error_estimate = 0;  // absolute
};

/// Adaptive integration over a full-dimensional rational polytope: fixed fan
/// triangulation, per-simplex order escalation, deterministic longest-edge
/// subdivision as a fallback. Throws numeric_error with the achieved bound
/// when the relative tolerance is unreachable.
IntegralResult integrate(const polytope::RationalPolytope& p, const Integrand& f,
                         double rel_tol);

/// Same integrand over an explicit simplex list (double coordinates).
IntegralResult integrate_simplices(const std::vector<std::vector<std::vector<double>>>& simplices,
                                   const Integrand& f, double rel_tol);

int thread_cap();  // SPHERICAL_DEGEN_THREADS, clamped to [1, hardware]

}  // namespace sphdegen::quad

#endif
