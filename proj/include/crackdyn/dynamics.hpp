#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crackdyn/errors.hpp"
#include "crackdyn/log.hpp"
#include "crackdyn/modal_algebra.hpp"
#include "crackdyn/modal_solver.hpp"
#include "crackdyn/quadrature.hpp"

namespace crackdyn {

enum class ModelKind { beam, arch };
enum class LoadKind { zero, modal, uniform };
enum class TimeProfile { constant, sinusoid };

struct LoadModel {
    LoadKind kind = LoadKind::zero;
    Eigen::VectorXd modal_amplitudes; // kind == modal
    double p0 = 0.0;                  // kind == uniform
    TimeProfile profile = TimeProfile::constant;
    double amplitude = 1.0; // sinusoid profile
    double omega = 0.0;
    double phase = 0.0;
};

// Separable projected load p_k(t) = g(t) * P_k with P_k = (p, phi_k)_H
// computed once by per-segment quadrature.
struct ProjectedLoad {
    Eigen::VectorXd p; // P_k
    TimeProfile profile = TimeProfile::constant;
    double amplitude = 1.0;
    double omega = 0.0;
    double phase = 0.0;

    double g(double t) const {
        return profile == TimeProfile::constant ? 1.0
                                                : amplitude * std::sin(omega * t + phase);
    }
    bool is_zero() const { return p.size() == 0 || p.isZero(0.0); }
};

inline ProjectedLoad project_load(const ModalBasis& basis, const LoadModel& load) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    ProjectedLoad out;
    out.profile = load.profile;
    out.amplitude = load.amplitude;
    out.omega = load.omega;
    out.phase = load.phase;
    switch (load.kind) {
        case LoadKind::zero:
            out.p = Eigen::VectorXd::Zero(n);
            break;
        case LoadKind::modal:
            if (load.modal_amplitudes.size() != n)
                throw std::invalid_argument("project_load: modal amplitude size does not match basis");
            out.p = load.modal_amplitudes;
            break;
        case LoadKind::uniform:
            out.p.resize(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                const Eigenpair& phi = basis.pairs[static_cast<std::size_t>(k)];
                out.p[k] = load.p0 * integrate_adaptive(
                                         [&phi](double x) { return evaluate(phi, x, 0); },
                                         phi.segment_nodes);
            }
            break;
    }
    return out;
}

struct SimConfig {
    ModelKind model_kind = ModelKind::beam;
    int n_modes = 16;
    double t_final = 1.0;
    double dt = 1e-3;
    int record_every = 1;
    State initial;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<EnergyReport> energies;
    std::vector<double> balance_residuals;
};

namespace detail {

inline void rhs_into(const ModalBasis& basis, const NondimModel& model, const ProjectedLoad& load,
                     double t, const Eigen::VectorXd& c, const Eigen::VectorXd& v,
                     ModelKind kind, Eigen::VectorXd& cdot, Eigen::VectorXd& vdot) {
    cdot = v;
    const double g = load.g(t);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double l4 = basis.lambda4(static_cast<std::size_t>(k));
        vdot[k] = g * load.p[k] - l4 * c[k] - (model.mu * l4 + model.c_d) * v[k];
    }
    if (kind == ModelKind::arch) {
        // (1/pi)(beta + c'Gc/2) Gc, the subdifferential of U_a.
        Eigen::VectorXd gc = basis.gram * c;
        vdot -= ((model.beta + 0.5 * c.dot(gc)) / kPi) * gc;
    }
}

} // namespace detail

// Equations of motion in modal coordinates:
//   cdot_k = v_k
//   vdot_k = p_k(t) - lambda_k^4 c_k - mu lambda_k^4 v_k - c_d v_k
//            - [arch only] (1/pi)(beta + c'Gc/2)(Gc)_k.
// The beam neglects the axial force, so its U_a term is identically zero.
inline State rhs(const ModalBasis& basis, const NondimModel& model, const ProjectedLoad& load,
                 double t, const State& state, ModelKind kind) {
    if (state.c.size() != static_cast<Eigen::Index>(basis.size()) ||
        state.v.size() != state.c.size())
        throw std::invalid_argument("rhs: state dimensions do not match basis");
    State out = State::zero(state.c.size());
    detail::rhs_into(basis, model, load, t, state.c, state.v, kind, out.c, out.v);
    return out;
}

// One classical fourth-order Runge-Kutta step.
inline State step_rk4(const ModalBasis& basis, const NondimModel& model, const ProjectedLoad& load,
                      double t, const State& state, double dt, ModelKind kind) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    const Eigen::Index n = state.c.size();
    State k1 = State::zero(n), k2 = State::zero(n), k3 = State::zero(n), k4 = State::zero(n);
    State mid = State::zero(n);

    detail::rhs_into(basis, model, load, t, state.c, state.v, kind, k1.c, k1.v);
    mid.c = state.c + 0.5 * dt * k1.c;
    mid.v = state.v + 0.5 * dt * k1.v;
    detail::rhs_into(basis, model, load, t + 0.5 * dt, mid.c, mid.v, kind, k2.c, k2.v);
    mid.c = state.c + 0.5 * dt * k2.c;
    mid.v = state.v + 0.5 * dt * k2.v;
    detail::rhs_into(basis, model, load, t + 0.5 * dt, mid.c, mid.v, kind, k3.c, k3.v);
    mid.c = state.c + dt * k3.c;
    mid.v = state.v + dt * k3.v;
    detail::rhs_into(basis, model, load, t + dt, mid.c, mid.v, kind, k4.c, k4.v);

    State next = State::zero(n);
    next.c = state.c + (dt / 6.0) * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
    next.v = state.v + (dt / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    if (!next.c.allFinite() || !next.v.allFinite())
        throw numerical_error("step_rk4: non-finite state at t=" + std::to_string(t + dt));
    return next;
}

// Fixed-step RK4 from t=0 to t_final, recording every record_every steps (the
// final step is always recorded). Each record carries an energy report and the
// running energy-balance residual
//   R(t) = E(t) - E(0) + int_0^t (c_d |ydot|_H^2 + mu sum lambda_k^4 v_k^2) dtau
//          - int_0^t (p, ydot)_H dtau,
// with both work integrals accumulated by the trapezoid rule on the recorded
// samples.
inline Trajectory simulate(const ModalBasis& basis, const NondimModel& model,
                           const ProjectedLoad& load, const SimConfig& config) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    if (config.initial.c.size() != n || config.initial.v.size() != n)
        throw std::invalid_argument("simulate: initial state dimensions do not match basis");
    if (!(config.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (!(config.t_final > 0.0)) throw std::invalid_argument("simulate: t_final must be positive");
    if (config.record_every < 1) throw std::invalid_argument("simulate: record_every must be at least 1");

    const double lambda_max = basis.lambda(basis.size() - 1);
    if (config.dt * lambda_max * lambda_max > 2.5)
        log::warn("dt*lambda_max^2 = %.3g exceeds the RK4 stability advisory 2.5",
                  config.dt * lambda_max * lambda_max);

    const bool with_axial = config.model_kind == ModelKind::arch;
    const bool conservative = load.is_zero() && model.c_d == 0.0 && model.mu == 0.0;

    const long long nsteps = static_cast<long long>(std::ceil(config.t_final / config.dt - 1e-9));

    Trajectory traj;
    State state = config.initial;

    double dissipated = 0.0, work = 0.0;
    double prev_t = 0.0, prev_diss_rate = 0.0, prev_work_rate = 0.0;
    const auto rates = [&](double t, const State& s, double& diss, double& wrk) {
        double sum_l4v2 = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            sum_l4v2 += basis.lambda4(static_cast<std::size_t>(k)) * s.v[k] * s.v[k];
        diss = model.c_d * s.v.squaredNorm() + model.mu * sum_l4v2;
        wrk = load.g(t) * load.p.dot(s.v);
    };

    const EnergyReport e0 = energy_report(basis, state, model.beta, with_axial);
    rates(0.0, state, prev_diss_rate, prev_work_rate);
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    traj.energies.push_back(e0);
    traj.balance_residuals.push_back(0.0);

    const auto record = [&](double t, const State& s) {
        double diss_rate, work_rate;
        rates(t, s, diss_rate, work_rate);
        const double half = 0.5 * (t - prev_t);
        dissipated += half * (prev_diss_rate + diss_rate);
        work += half * (prev_work_rate + work_rate);
        prev_t = t;
        prev_diss_rate = diss_rate;
        prev_work_rate = work_rate;

        const EnergyReport e = energy_report(basis, s, model.beta, with_axial);
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.energies.push_back(e);
        traj.balance_residuals.push_back(e.total - e0.total + dissipated - work);

        if (conservative && e0.total > 0.0 && e.total > 1e6 * e0.total)
            throw numerical_error("simulate: energy blow-up at t=" + std::to_string(t) +
                                  " (unstable step size?)");
    };

    for (long long i = 1; i <= nsteps; ++i) {
        const double t_prev = (static_cast<double>(i) - 1.0) * config.dt;
        state = step_rk4(basis, model, load, t_prev, state, config.dt, config.model_kind);
        if (i % config.record_every == 0 || i == nsteps)
            record(static_cast<double>(i) * config.dt, state);
    }
    return traj;
}

} // namespace crackdyn
