#include "sphdegen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace sphdegen::quad {

using polytope::RationalPolytope;

std::vector<std::vector<RatVec>> triangulate(const RationalPolytope& p) {
    int q = p.dim();
    if (q == 0) return {{p.vertices().front()}};
    const RatVec& apex = p.vertices().front();
    std::vector<std::vector<RatVec>> out;
    if (q == 1) {
        out.push_back({p.vertices().front(), p.vertices().back()});
        return out;
    }
    for (const auto& f : p.facets()) {
        if (dot(f.normal, apex) == f.offset) continue;  // apex lies on this facet
        std::vector<RatVec> on_facet;
        for (const auto& v : p.vertices())
            if (dot(f.normal, v) == f.offset) on_facet.push_back(v);
        RationalPolytope facet = RationalPolytope::from_vertices(p.ambient_dim(), on_facet);
        for (auto sub_simplex : triangulate(facet)) {
            sub_simplex.push_back(apex);
            out.push_back(std::move(sub_simplex));
        }
    }
    return out;
}

namespace {

Real factorial_real(int n) {
    Real r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// compositions of total into k nonnegative parts
void compositions(int total, int k, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& emit) {
    if (k == 1) {
        cur.push_back(total);
        emit(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur.push_back(v);
        compositions(total - v, k - 1, cur, emit);
        cur.pop_back();
    }
}

double simplex_volume(const std::vector<std::vector<double>>& verts) {
    int d = static_cast<int>(verts.size()) - 1;
    std::vector<std::vector<double>> m(d, std::vector<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i][j] = verts[i + 1][j] - verts[0][j];
    double det = 1;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (m[piv][c] == 0) return 0;
        if (piv != c) { std::swap(m[piv], m[c]); det = -det; }
        det *= m[c][c];
        for (int r = c + 1; r < d; ++r) {
            double f = m[r][c] / m[c][c];
            for (int j = c; j < d; ++j) m[r][j] -= f * m[c][j];
        }
    }
    double fact = 1;
    for (int i = 2; i <= d; ++i) fact *= i;
    return std::fabs(det) / fact;
}

}  // namespace

GMRule gm_rule(const std::vector<std::vector<double>>& simplex, int s) {
    int d = static_cast<int>(simplex.size()) - 1;
    GMRule rule;
    double vol = simplex_volume(simplex);
    // reference rule integrates against volume 1/d!; rescale to |simplex|
    double vol_scale = vol * factorial_real(d).convert_to<double>();
    double two_pow = std::ldexp(1.0, -2 * s);  // 2^{-2s}
    const int degree = 2 * s + 1;              // exactness degree of the rule
    for (int i = 0; i <= s; ++i) {
        int k = s - i;
        double denom_base = d + 1 + 2 * k;     // = degree + d - 2i
        Real wr = 1;
        for (int t = 0; t < degree; ++t) wr *= Real(denom_base);
        wr /= factorial_real(i) * factorial_real(degree + d - i);
        double w = wr.convert_to<double>() * two_pow * ((i % 2) ? -1.0 : 1.0) * vol_scale;
        std::vector<int> cur;
        compositions(k, d + 1, cur, [&](const std::vector<int>& beta) {
            std::vector<double> bary(d + 1);
            for (int j = 0; j <= d; ++j) bary[j] = (2.0 * beta[j] + 1.0) / denom_base;
            std::vector<double> x(simplex[0].size(), 0.0);
            for (int j = 0; j <= d; ++j)
                for (std::size_t t = 0; t < x.size(); ++t) x[t] += bary[j] * simplex[j][t];
            rule.nodes.push_back(std::move(x));
            rule.weights.push_back(w);
        });
    }
    return rule;
}

namespace {

double apply_rule(const GMRule& rule, const Integrand& f) {
    double s = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

struct SimplexTask {
    std::vector<std::vector<double>> verts;
    int depth = 0;
};

// order escalation then longest-edge bisection
IntegralResult integrate_one(const SimplexTask& task, const Integrand& f, double rel_tol,
                             int max_order, int max_depth) {
    double prev = apply_rule(gm_rule(task.verts, 1), f);
    for (int s = 2; s <= max_order; ++s) {
        double cur = apply_rule(gm_rule(task.verts, s), f);
        double est = std::fabs(cur - prev);
        double scale = std::max(std::fabs(cur), 1e-300);
        if (est <= 0.25 * rel_tol * scale)
            return {cur, est};
        prev = cur;
    }
    if (task.depth >= max_depth) {
        double cur = apply_rule(gm_rule(task.verts, max_order), f);
        return {cur, std::fabs(cur - prev)};
    }
    // bisect the longest edge (deterministic tie break by index order)
    int bi = 0, bj = 1;
    double best = -1;
    int n = static_cast<int>(task.verts.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double len = 0;
            for (std::size_t t = 0; t < task.verts[i].size(); ++t) {
                double dsp = task.verts[i][t] - task.verts[j][t];
                len += dsp * dsp;
            }
            if (len > best) { best = len; bi = i; bj = j; }
        }
    std::vector<double> mid(task.verts[bi].size());
    for (std::size_t t = 0; t < mid.size(); ++t)
        mid[t] = 0.5 * (task.verts[bi][t] + task.verts[bj][t]);
    SimplexTask a = task, b = task;
    a.depth = b.depth = task.depth + 1;
    a.verts[bi] = mid;
    b.verts[bj] = mid;
    IntegralResult ra = integrate_one(a, f, rel_tol, max_order, max_depth);
    IntegralResult rb = integrate_one(b, f, rel_tol, max_order, max_depth);
    return {ra.value + rb.value, ra.error_estimate + rb.error_estimate};
}

}  // namespace

int thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("SPHERICAL_DEGEN_THREADS");
    if (!env) return static_cast<int>(hw);
    long v = std::strtol(env, nullptr, 10);
    if (v < 1) v = 1;
    if (v > static_cast<long>(hw)) v = static_cast<long>(hw);
    return static_cast<int>(v);
}

IntegralResult integrate_simplices(
    const std::vector<std::vector<std::vector<double>>>& simplices, const Integrand& f,
    double rel_tol) {
    const int max_order = 14;
    const int max_depth = 10;
    std::vector<IntegralResult> partial(simplices.size());
    int nthreads = std::min<int>(thread_cap(), static_cast<int>(simplices.size()));
    if (nthreads <= 1 || simplices.size() < 4) {
        for (std::size_t i = 0; i < simplices.size(); ++i)
            partial[i] = integrate_one({simplices[i], 0}, f, rel_tol, max_order, max_depth);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < simplices.size(); i += nthreads)
                    partial[i] =
                        integrate_one({simplices[i], 0}, f, rel_tol, max_order, max_depth);
            });
        for (auto& th : pool) th.join();
    }
    IntegralResult total;
    for (const auto& r : partial) {  // fixed order: bit-stable for any thread count
        total.value += r.value;
        total.error_estimate += r.error_estimate;
    }
    double scale = std::max(std::fabs(total.value), 1e-300);
    if (total.error_estimate > rel_tol * scale)
        throw numeric_error("integration tolerance unreachable; achieved relative error " +
                            std::to_string(total.error_estimate / scale));
    return total;
}

IntegralResult integrate(const RationalPolytope& p, const Integrand& f, double rel_tol) {
    if (p.dim() != p.ambient_dim())
        throw numeric_error("integration domain is degenerate (measure zero)");
    std::vector<std::vector<std::vector<double>>> simplices;
    for (const auto& s : triangulate(p)) {
        std::vector<std::vector<double>> sd;
        for (const auto& v : s) {
            std::vector<double> vd;
            for (const auto& x : v) vd.push_back(rat_to_double(x));
            sd.push_back(std::move(vd));
        }
        simplices.push_back(std::move(sd));
    }
    return integrate_simplices(simplices, f, rel_tol);
}

}  // namespace sphdegen::quad
