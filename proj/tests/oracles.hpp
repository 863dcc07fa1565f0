#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"
#include "swhs/rearrange.hpp"

// Independent reference computations the tests compare the library against.
// Everything here trades speed for obviousness: dense enumeration, explicit
// matrices, closed forms.

namespace oracles {

inline void fill_uniform(swhs::BoundaryField& f, std::mt19937_64& rng, double lo = 0.0,
                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : f.value) v = dist(rng);
}

inline void fill_uniform(swhs::HalfField& g, std::mt19937_64& rng, double lo = 0.0,
                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : g.value) v = dist(rng);
}

/// Objective ||V f||_q as a function of the mass vector m on the p-simplex.
/// Writing f_i = (m_i / w_i)^{1/p} makes ||f||_p = 1 equivalent to
/// sum m_i = 1, so the feasible set is the standard simplex and a dense
/// grid search is possible.
struct SimplexObjective {
    const swhs::BoundaryGrid* bg;
    const swhs::HalfGrid* hg;
    const swhs::KernelTable* table;
    swhs::OpParams op;
    double p;
    double q;

    double operator()(const std::vector<double>& m) const {
        swhs::BoundaryField f = swhs::make_field(*bg);
        for (std::size_t i = 0; i < m.size(); ++i)
            f.value[i] = m[i] <= 0.0 ? 0.0 : std::pow(m[i] / bg->weight[i], 1.0 / p);
        swhs::HalfField vf = swhs::apply_V(f, *hg, op, *table);
        return swhs::lp_norm(vf, q);
    }
};

namespace detail {

inline void enumerate_compositions(const SimplexObjective& ev, std::vector<double>& m,
                                   std::vector<int>& c, int idx, int left, int levels,
                                   double& best, std::vector<double>& argbest) {
    const int parts = static_cast<int>(c.size());
    if (idx == parts - 1) {
        c[idx] = left;
        for (int i = 0; i < parts; ++i) m[i] = static_cast<double>(c[i]) / levels;
        double val = ev(m);
        if (val > best) {
            best = val;
            argbest = m;
        }
        return;
    }
    for (int k = 0; k <= left; ++k) {
        c[idx] = k;
        enumerate_compositions(ev, m, c, idx + 1, left - k, levels, best, argbest);
    }
}

/// Pairwise mass transfer with a shrinking step, started from the grid-search
/// winner. Keeps the iterate on the simplex exactly.
inline double polish(const SimplexObjective& ev, std::vector<double> m, double val) {
    const int parts = static_cast<int>(m.size());
    double step = 0.02;
    while (step > 1e-7) {
        bool improved = false;
        for (int i = 0; i < parts; ++i) {
            for (int j = 0; j < parts; ++j) {
                if (i == j) continue;
                double d = std::min(step, m[i]);
                if (d <= 0.0) continue;
                std::vector<double> trial = m;
                trial[i] -= d;
                trial[j] += d;
                double tv = ev(trial);
                if (tv > val) {
                    val = tv;
                    m = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return val;
}

}  // namespace detail

/// Dense maximization of ||V f||_q over the unit p-sphere of nonnegative
/// boundary fields: enumerate all compositions of `levels` mass units over
/// the nodes, then hill-climb from the winner. Exponential in the node
/// count, so callers keep the boundary grid at a handful of nodes.
inline double brute_force_constant(const swhs::InequalityParams& ip,
                                   const swhs::BoundaryGrid& bg, const swhs::HalfGrid& hg,
                                   const swhs::KernelTable& table, int levels = 50) {
    swhs::AdmissibilityReport rep = swhs::validate(ip);
    SimplexObjective ev{&bg, &hg, &table, swhs::OpParams::from(ip), swhs::to_double(ip.p),
                        swhs::to_double(*rep.q)};
    const int parts = static_cast<int>(bg.size());
    std::vector<double> m(parts), argbest(parts);
    std::vector<int> comp(parts);
    double best = 0.0;
    detail::enumerate_compositions(ev, m, comp, 0, levels, levels, best, argbest);
    return detail::polish(ev, argbest, best);
}

/// Dominant eigenvalue of the composed map f -> W(V(f)) computed from the
/// explicit matrix: assemble column by column, square it with trace
/// normalization until it collapses to the rank-1 spectral projector, then
/// read the eigenvalue off a Rayleigh quotient. Independent of the solver's
/// iteration and normalization choices.
inline double dense_dominant_eigenvalue(const swhs::BoundaryGrid& bg, const swhs::HalfGrid& hg,
                                        const swhs::OpParams& op,
                                        const swhs::KernelTable& table) {
    const std::size_t N = bg.size();
    std::vector<double> M(N * N);
    for (std::size_t j = 0; j < N; ++j) {
        swhs::BoundaryField e = swhs::make_field(bg);
        e.value[j] = 1.0;
        swhs::BoundaryField we = swhs::apply_W(swhs::apply_V(e, hg, op, table), bg, op, table);
        for (std::size_t i = 0; i < N; ++i) M[i * N + j] = we.value[i];
    }
    auto matmul = [N](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(N * N, 0.0);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const double aik = a[i * N + k];
                const double* brow = &b[k * N];
                double* crow = &c[i * N];
                for (std::size_t j = 0; j < N; ++j) crow[j] += aik * brow[j];
            }
        return c;
    };
    std::vector<double> B = M;
    for (int step = 0; step < 9; ++step) {
        double t = 0.0;
        for (std::size_t i = 0; i < N; ++i) t += B[i * N + i];
        for (double& x : B) x /= t;
        B = matmul(B, B);
    }
    std::size_t jbest = 0;
    double nbest = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        double nn = 0.0;
        for (std::size_t i = 0; i < N; ++i) nn += B[i * N + j] * B[i * N + j];
        if (nn > nbest) {
            nbest = nn;
            jbest = j;
        }
    }
    std::vector<double> u(N), Mu(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) u[i] = B[i * N + jbest];
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) Mu[i] += M[i * N + j] * u[j];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        num += Mu[i] * u[i];
        den += u[i] * u[i];
    }
    return num / den;
}

/// Radial profile 1/(1 + r^2) on the boundary grid, decreasing in every
/// shell and constant across angles, so symmetrization fixes it exactly.
inline swhs::BoundaryField radial_decreasing_boundary(const swhs::BoundaryGrid& bg) {
    swhs::BoundaryField f = swhs::make_field(bg);
    for (std::size_t i = 0; i < f.value.size(); ++i) {
        double r = bg.node_radius(i);
        f.value[i] = 1.0 / (1.0 + r * r);
    }
    return f;
}

inline swhs::HalfField radial_decreasing_half(const swhs::HalfGrid& hg) {
    swhs::HalfField g = swhs::make_field(hg);
    for (std::size_t i = 0; i < g.value.size(); ++i) {
        double r = hg.node_radius(i);
        double xn = hg.node_height(i);
        g.value[i] = 1.0 / (1.0 + r * r + xn * xn);
    }
    return g;
}

}  // namespace oracles
