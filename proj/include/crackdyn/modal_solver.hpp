#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "crackdyn/crack_physics.hpp"
#include "crackdyn/errors.hpp"
#include "crackdyn/log.hpp"
#include "crackdyn/quadrature.hpp"

namespace crackdyn {

// State vector convention: s = (u, u', u'', u''').
using StateVec = Eigen::Vector4d;

// One eigenpair of the operator: the eigenvalue is lambda^4, the eigenfunction
// solves u'''' = lambda^4 u on each segment. Two equivalent per-segment
// representations are stored: the state vector at the segment's left endpoint,
// and the coefficients (alpha, beta, gamma, delta) of the boundary-layer basis
//   u(xi) = alpha e^{-lambda xi} + beta e^{-lambda (h - xi)}
//         + gamma cos(lambda xi) + delta sin(lambda xi)
// in the segment-local coordinate xi in [0, h]. Evaluation goes through the
// coefficients: every basis function is bounded by one on the segment, so no
// precision is lost to the e^{lambda x} growth that contaminates naive state
// propagation at large lambda.
struct Eigenpair {
    double lambda = 0.0;
    std::vector<double> segment_nodes;     // 0 = x_0 < x_1 < ... < pi
    std::vector<StateVec> segment_states;  // state at x_{i-1}^+, one per segment
    std::vector<Eigen::Vector4d> segment_coeffs;
    double norm = 0.0;                     // H-norm before normalization
};

enum class Side { left, right };

namespace detail {

// Krylov-Duncan functions of z = lambda*dx:
//   S = (cosh + cos)/2, T = (sinh + sin)/2, U = (cosh - cos)/2, V = (sinh - sin)/2.
// For z > 30 the circular parts fall below double precision relative to the
// hyperbolic ones, so cosh and sinh collapse to the factored e^z/2.
struct KrylovDuncan {
    double s, t, u, v;

    explicit KrylovDuncan(double z) {
        double ch, sh;
        if (z > 30.0) {
            ch = sh = 0.5 * std::exp(z);
        } else {
            ch = std::cosh(z);
            sh = std::sinh(z);
        }
        const double c = std::cos(z), sn = std::sin(z);
        s = 0.5 * (ch + c);
        t = 0.5 * (sh + sn);
        u = 0.5 * (ch - c);
        v = 0.5 * (sh - sn);
    }
};

} // namespace detail

// Exact fundamental matrix of u'''' = lambda^4 u over a span dx: maps the state
// (u, u', u'', u''') at x to the state at x + dx.
inline Eigen::Matrix4d segment_propagator(double lambda, double dx) {
    if (!(lambda > 0.0)) throw std::invalid_argument("segment_propagator: lambda must be positive");
    if (dx < 0.0) throw std::invalid_argument("segment_propagator: dx must be nonnegative");
    const double l = lambda, l2 = l * l, l3 = l2 * l;
    const detail::KrylovDuncan f(l * dx);
    Eigen::Matrix4d p;
    p << f.s,      f.t / l,  f.u / l2, f.v / l3,
         l * f.v,  f.s,      f.t / l,  f.u / l2,
         l2 * f.u, l * f.v,  f.s,      f.t / l,
         l3 * f.t, l2 * f.u, l * f.v,  f.s;
    return p;
}

// Crossing a crack keeps u, u'', u''' and adds theta * u'' to the slope.
inline Eigen::Matrix4d crack_jump_matrix(double theta) {
    if (theta < 0.0) throw std::invalid_argument("crack_jump_matrix: theta must be nonnegative");
    Eigen::Matrix4d j = Eigen::Matrix4d::Identity();
    j(1, 2) = theta;
    return j;
}

namespace detail {

// The characteristic determinant is a 2x2 minor of two propagated states, and
// forming it from the states themselves cancels e^{2z}-sized products down to
// an O(e^z) difference, losing eps*e^z absolutely. Carrying the six Pluecker
// coordinates m_ij = a_i b_j - a_j b_i instead keeps every intermediate a
// mixed product (cosh*cos, sinh*sin, cosh*sin, sinh*cos) with full relative
// accuracy. Entries here are scaled by e^{-z} once z > 30; the compound is
// used up to positive factors only.
struct KrylovMixed {
    double one, p, q, e, f;

    explicit KrylovMixed(double z) {
        const double c = std::cos(z), sn = std::sin(z);
        double ch, sh;
        if (z > 30.0) {
            one = std::exp(-z);
            ch = sh = 0.5;
        } else {
            one = 1.0;
            ch = std::cosh(z);
            sh = std::sinh(z);
        }
        p = ch * c;
        q = sh * sn;
        const double cs = ch * sn, sc = sh * c;
        e = 0.5 * (cs + sc);
        f = 0.5 * (cs - sc);
    }
};

using Minor6 = Eigen::Matrix<double, 6, 1>;

// Second compound of the segment propagator in lambda-scaled coordinates
// m_ij / lambda^{i+j}, pair order (01, 02, 03, 12, 13, 23).
inline Eigen::Matrix<double, 6, 6> compound_propagator(double z) {
    const KrylovMixed k(z);
    const double a1 = 0.5 * (k.one + k.p);
    const double a2 = 0.5 * (k.one - k.p);
    const double qh = 0.5 * k.q;
    Eigen::Matrix<double, 6, 6> c;
    c << a1,    k.e,  qh,    qh,   k.f,  a2,
         -k.f,  k.p,  k.e,   k.e,  k.q,  k.f,
         -qh,  -k.f,  a1,   -a2,   k.e,  qh,
         -qh,  -k.f, -a2,    a1,   k.e,  qh,
         -k.e, -k.q, -k.f,  -k.f,  k.p,  k.e,
         a2,   -k.e, -qh,   -qh,  -k.f,  a1;
    return c;
}

} // namespace detail

// Determinant of the hinged end conditions at pi over the two-parameter family
// of solutions admissible at 0: the states (0,1,0,0) and (0,0,0,1) are carried
// from 0 to pi through segment propagators and crack jumps as the 6-vector of
// their 2x2 minors, rescaled by the max-abs entry after every segment
// (positive scaling preserves the sign and the zero set), and the (u, u'')
// minor at pi is returned. Zero exactly at the eigenvalues.
inline double characteristic_value(const NondimModel& model, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("characteristic_value: lambda must be positive");
    const std::vector<double> nodes = model.segment_nodes();
    detail::Minor6 m = detail::Minor6::Zero();
    m[4] = 1.0; // (0,1,0,0) wedge (0,0,0,1) is the single minor m13
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        m = detail::compound_propagator(lambda * (nodes[i + 1] - nodes[i])) * m;
        const double scale = m.cwiseAbs().maxCoeff();
        if (scale > 0.0) m /= scale;
        if (i + 2 < nodes.size()) {
            // Scaled compound of the crack jump: m01 += theta*lambda*m02 and
            // m13 += theta*lambda*m23, everything else unchanged.
            const double tl = model.flexibilities[i] * lambda;
            m[0] += tl * m[1];
            m[4] += tl * m[5];
        }
    }
    return m[1];
}

struct ScanSettings {
    double lambda_max = 0.0; // 0 selects the default max(n+2, 2n)
    double step = 0.01;
};

// Scans (1e-3, lambda_max] for sign changes of the characteristic value and
// refines each bracket by bisection to |dlambda| < 1e-12. Extends the range
// geometrically (x1.5, up to 8 times) if fewer than n roots are found.
inline std::vector<double> find_eigenvalues(const NondimModel& model, int n,
                                            ScanSettings scan = {}) {
    if (n < 1) throw std::invalid_argument("find_eigenvalues: n must be at least 1");
    if (!(scan.step > 0.0)) throw std::invalid_argument("find_eigenvalues: step must be positive");
    double lambda_max = scan.lambda_max > 0.0
                            ? scan.lambda_max
                            : static_cast<double>(std::max(n + 2, 2 * n));

    std::vector<double> roots;
    double lo = 1e-3;
    double f_lo = characteristic_value(model, lo);
    for (int extension = 0; extension <= 8; ++extension) {
        double x = lo;
        double fx = f_lo;
        while (x < lambda_max && static_cast<int>(roots.size()) < n) {
            const double x_next = std::min(x + scan.step, lambda_max);
            const double f_next = characteristic_value(model, x_next);
            if (fx == 0.0) {
                roots.push_back(x);
            } else if (f_next != 0.0 && std::signbit(fx) != std::signbit(f_next)) {
                double a = x, b = x_next, fa = fx;
                while (b - a > 1e-12) {
                    const double mid = 0.5 * (a + b);
                    const double fm = characteristic_value(model, mid);
                    if (fm == 0.0) { a = b = mid; break; }
                    if (std::signbit(fm) == std::signbit(fa)) {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                roots.push_back(0.5 * (a + b));
            }
            x = x_next;
            fx = f_next;
        }
        if (static_cast<int>(roots.size()) >= n) break;
        lo = lambda_max;
        f_lo = characteristic_value(model, lo);
        lambda_max *= 1.5;
    }

    if (static_cast<int>(roots.size()) < n)
        throw numerical_error("find_eigenvalues: found only " + std::to_string(roots.size()) +
                              " of " + std::to_string(n) + " requested eigenvalues");
    roots.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        if (roots[i + 1] - roots[i] < 1e-8)
            log::warn("near-degenerate eigenvalues at lambda=%.12g and %.12g", roots[i], roots[i + 1]);
    return roots;
}

namespace detail {

// Order-r derivative of the boundary-layer basis at xi, divided by lambda^r:
//   d^r/dxi^r [e^{-l xi}, e^{-l (h - xi)}, cos(l xi), sin(l xi)] / l^r.
inline Eigen::RowVector4d basis_row(double lambda, double h, double xi, int order) {
    const double z = lambda * xi;
    const double el = std::exp(-z);
    const double er = std::exp(-lambda * (h - xi));
    const double c = std::cos(z), s = std::sin(z);
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    double dc = 0.0, ds = 0.0;
    switch (order & 3) {
        case 0: dc = c;  ds = s;  break;
        case 1: dc = -s; ds = c;  break;
        case 2: dc = -c; ds = -s; break;
        case 3: dc = s;  ds = -c; break;
    }
    return {sign * el, er, dc, ds};
}

} // namespace detail

// Evaluates the eigenfunction (or one of its first three derivatives) at x
// from the containing segment's basis coefficients. At a crack abscissa the
// right limit is returned unless side == Side::left.
inline double evaluate(const Eigenpair& phi, double x, int order, Side side = Side::right) {
    if (order < 0 || order > 3) throw std::invalid_argument("evaluate: order must be 0..3");
    if (x < 0.0 || x > kPi) throw std::domain_error("evaluate: x must lie in [0, pi]");
    const std::vector<double>& nodes = phi.segment_nodes;
    std::size_t seg;
    if (side == Side::right) {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
        seg = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    } else {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
        seg = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    }
    seg = (seg == 0) ? 0 : seg - 1;
    seg = std::min(seg, phi.segment_coeffs.size() - 1);
    const double h = nodes[seg + 1] - nodes[seg];
    const double xi = std::clamp(x - nodes[seg], 0.0, h);
    const double scale = std::pow(phi.lambda, order);
    return scale * detail::basis_row(phi.lambda, h, xi, order).dot(phi.segment_coeffs[seg]);
}

// Builds and normalizes the eigenfunction for a refined root of the
// characteristic value. The hinged end conditions and the junction conditions
// assemble into a square homogeneous system for the per-segment basis
// coefficients; its null vector (the smallest singular direction, residual
// checked against 1e-8) is the eigenfunction. |phi|_H = 1 by composite
// Gauss-Legendre quadrature (32 points per segment, doubled until the relative
// change is below 1e-12), sign fixed by phi'(0) > 0 with phi'''(0) > 0 as
// fallback.
inline Eigenpair build_eigenfunction(const NondimModel& model, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("build_eigenfunction: lambda must be positive");
    const std::vector<double> nodes = model.segment_nodes();
    const std::size_t nseg = nodes.size() - 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(4 * nseg);
    const auto h = [&nodes](std::size_t i) { return nodes[i + 1] - nodes[i]; };

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index row = 0;
    // u(0) = u''(0) = 0.
    m.block<1, 4>(row++, 0) = detail::basis_row(lambda, h(0), 0.0, 0);
    m.block<1, 4>(row++, 0) = detail::basis_row(lambda, h(0), 0.0, 2);
    // Junctions at each crack: continuity of u, u'', u''' plus the slope jump
    // u'+ - u'- = theta u''+, all orders scaled by lambda^-r.
    for (std::size_t j = 0; j + 1 < nseg; ++j) {
        const Eigen::Index cl = static_cast<Eigen::Index>(4 * j);
        const Eigen::Index cr = cl + 4;
        for (int r : {0, 2, 3}) {
            m.block<1, 4>(row, cl) = detail::basis_row(lambda, h(j), h(j), r);
            m.block<1, 4>(row, cr) = -detail::basis_row(lambda, h(j + 1), 0.0, r);
            ++row;
        }
        const double tl = model.flexibilities[j] * lambda;
        m.block<1, 4>(row, cl) = -detail::basis_row(lambda, h(j), h(j), 1);
        m.block<1, 4>(row, cr) = detail::basis_row(lambda, h(j + 1), 0.0, 1) -
                                 tl * detail::basis_row(lambda, h(j + 1), 0.0, 2);
        ++row;
    }
    // u(pi) = u''(pi) = 0.
    m.block<1, 4>(row++, dim - 4) = detail::basis_row(lambda, h(nseg - 1), h(nseg - 1), 0);
    m.block<1, 4>(row++, dim - 4) = detail::basis_row(lambda, h(nseg - 1), h(nseg - 1), 2);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv[0];
    if (!(smax > 0.0) || sv[dim - 1] / smax > 1e-8)
        throw numerical_error("build_eigenfunction: lambda=" + std::to_string(lambda) +
                              " is not an eigenvalue (null residual " +
                              std::to_string(smax > 0.0 ? sv[dim - 1] / smax : 1.0) + ")");
    if (dim >= 2 && sv[dim - 2] / smax <= 1e-8)
        throw numerical_error("build_eigenfunction: degenerate eigenvalue at lambda=" +
                              std::to_string(lambda) + " (rank deficiency > 1)");
    const Eigen::VectorXd null_vec = svd.matrixV().col(dim - 1);

    Eigenpair pair;
    pair.lambda = lambda;
    pair.segment_nodes = nodes;
    pair.segment_coeffs.reserve(nseg);
    pair.segment_states.reserve(nseg);
    const double l2 = lambda * lambda, l3 = l2 * lambda;
    for (std::size_t i = 0; i < nseg; ++i) {
        const Eigen::Vector4d q = null_vec.segment<4>(static_cast<Eigen::Index>(4 * i));
        pair.segment_coeffs.push_back(q);
        StateVec s;
        s[0] = detail::basis_row(lambda, h(i), 0.0, 0).dot(q);
        s[1] = lambda * detail::basis_row(lambda, h(i), 0.0, 1).dot(q);
        s[2] = l2 * detail::basis_row(lambda, h(i), 0.0, 2).dot(q);
        s[3] = l3 * detail::basis_row(lambda, h(i), 0.0, 3).dot(q);
        pair.segment_states.push_back(s);
    }

    const double norm_sq = integrate_adaptive(
        [&pair](double x) {
            const double v = evaluate(pair, x, 0);
            return v * v;
        },
        nodes);
    if (!(norm_sq > 0.0))
        throw numerical_error("build_eigenfunction: eigenfunction has vanishing H-norm");
    pair.norm = std::sqrt(norm_sq);

    double scale = 1.0 / pair.norm;
    const StateVec& first = pair.segment_states.front();
    const double lead = (first[1] != 0.0) ? first[1] : first[3];
    if (lead < 0.0) scale = -scale;
    for (Eigen::Vector4d& q : pair.segment_coeffs) q *= scale;
    for (StateVec& s : pair.segment_states) s *= scale;
    return pair;
}

// Gram matrix of first derivatives, G_ij = (phi_i', phi_j')_H, by the same
// adaptive per-segment quadrature; symmetrized as (G + G^T)/2.
inline Eigen::MatrixXd gram_matrix(const std::vector<Eigenpair>& pairs) {
    const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigenpair& pi = pairs[static_cast<std::size_t>(i)];
            const Eigenpair& pj = pairs[static_cast<std::size_t>(j)];
            const double v = integrate_adaptive(
                [&pi, &pj](double x) { return evaluate(pi, x, 1) * evaluate(pj, x, 1); },
                pi.segment_nodes);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return 0.5 * (g + g.transpose());
}

// Computed modal basis: eigenpairs in increasing lambda order plus the Gram
// matrix of first derivatives.
struct ModalBasis {
    NondimModel model;
    std::vector<Eigenpair> pairs;
    Eigen::MatrixXd gram;

    std::size_t size() const { return pairs.size(); }
    double lambda(std::size_t k) const { return pairs[k].lambda; }
    double lambda4(std::size_t k) const {
        const double l = pairs[k].lambda;
        return l * l * l * l;
    }
};

inline ModalBasis build_basis(const NondimModel& model, int n, ScanSettings scan = {}) {
    validate(model);
    ModalBasis basis;
    basis.model = model;
    for (double lambda : find_eigenvalues(model, n, scan))
        basis.pairs.push_back(build_eigenfunction(model, lambda));
    basis.gram = gram_matrix(basis.pairs);
    return basis;
}

} // namespace crackdyn
