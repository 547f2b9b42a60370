#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "crackdyn/errors.hpp"
#include "crackdyn/modal_solver.hpp"

namespace crackdyn {

// Modal coordinates of the displacement field y = sum c_k phi_k and the
// velocity field ydot = sum v_k phi_k.
struct State {
    Eigen::VectorXd c;
    Eigen::VectorXd v;

    static State zero(Eigen::Index n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)}; }
};

struct EnergyReport {
    double kinetic = 0.0;
    double bending = 0.0;
    double axial = 0.0;
    double total = 0.0;
};

namespace detail {

inline void check_size(const ModalBasis& basis, const Eigen::VectorXd& c, const char* who) {
    if (c.size() != static_cast<Eigen::Index>(basis.size()))
        throw std::invalid_argument(std::string(who) + ": coefficient size does not match basis");
}

} // namespace detail

// The operator is diagonal in its own eigenbasis: (A y)_k = lambda_k^4 c_k.
inline Eigen::VectorXd apply_A(const ModalBasis& basis, const Eigen::VectorXd& c) {
    detail::check_size(basis, c, "apply_A");
    Eigen::VectorXd out(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k)
        out[k] = basis.lambda4(static_cast<std::size_t>(k)) * c[k];
    return out;
}

// Weak realization of the axial-coupling operator, <B u, v> = (u', v')_H:
// the Galerkin projection on the basis is the Gram matrix product G c. The
// distributional delta terms of the classical form never appear.
inline Eigen::VectorXd apply_B(const ModalBasis& basis, const Eigen::VectorXd& c) {
    detail::check_size(basis, c, "apply_B");
    return basis.gram * c;
}

inline double energy_kinetic(const Eigen::VectorXd& v) { return 0.5 * v.squaredNorm(); }

// U_b = (1/2) <A y, y> = (1/2) sum lambda_k^4 c_k^2.
inline double energy_bending(const ModalBasis& basis, const Eigen::VectorXd& c) {
    detail::check_size(basis, c, "energy_bending");
    double sum = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        sum += basis.lambda4(static_cast<std::size_t>(k)) * c[k] * c[k];
    return 0.5 * sum;
}

// U_a = (1/2pi) (beta + |y'|_H^2 / 2)^2 with |y'|_H^2 = c' G c.
inline double energy_axial(const ModalBasis& basis, const Eigen::VectorXd& c, double beta) {
    detail::check_size(basis, c, "energy_axial");
    const double stretch = beta + 0.5 * c.dot(basis.gram * c);
    return stretch * stretch / (2.0 * kPi);
}

inline Eigen::VectorXd grad_Ub(const ModalBasis& basis, const Eigen::VectorXd& c) {
    return apply_A(basis, c);
}

inline Eigen::VectorXd grad_Ua(const ModalBasis& basis, const Eigen::VectorXd& c, double beta) {
    detail::check_size(basis, c, "grad_Ua");
    const Eigen::VectorXd gc = basis.gram * c;
    return ((beta + 0.5 * c.dot(gc)) / kPi) * gc;
}

// Samples y (or a derivative up to order 2) on the reconstructed field
// y = sum c_k phi_k; one-sided values at crack abscissae via the side flag.
inline std::vector<double> reconstruct_field(const ModalBasis& basis, const Eigen::VectorXd& c,
                                             const std::vector<double>& x_samples, int order,
                                             Side side = Side::right) {
    detail::check_size(basis, c, "reconstruct_field");
    if (order < 0 || order > 2)
        throw std::invalid_argument("reconstruct_field: order must be 0..2");
    std::vector<double> out;
    out.reserve(x_samples.size());
    for (double x : x_samples) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < c.size(); ++k)
            acc += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], x, order, side);
        out.push_back(acc);
    }
    return out;
}

// Axial energy participates for the arch only; the beam neglects the axial
// force, realized as U_a identically zero.
inline EnergyReport energy_report(const ModalBasis& basis, const State& state, double beta,
                                  bool with_axial) {
    EnergyReport r;
    r.kinetic = energy_kinetic(state.v);
    r.bending = energy_bending(basis, state.c);
    r.axial = with_axial ? energy_axial(basis, state.c, beta) : 0.0;
    r.total = r.kinetic + r.bending + r.axial;
    return r;
}

} // namespace crackdyn
