#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "crackdyn/crack_physics.hpp"
#include "crackdyn/errors.hpp"

namespace crackdyn {

// Hermite cubic mesh on [0, pi] whose nodes contain every crack position
// exactly; elements never straddle a crack.
struct FemMesh {
    std::vector<double> nodes;
    std::vector<std::size_t> crack_node_index; // one per crack, into nodes
    std::vector<int> elements_per_segment;
};

// Assembled generalized eigenproblem K v = lambda^4 M v. Each node carries a
// displacement DOF and a slope DOF; crack nodes carry two independent slopes
// (left/right), coupled by the rotational spring 1/theta. The hinged-end
// displacements are eliminated, so dof = 2*nodes + cracks - 2.
struct FemSystem {
    FemMesh mesh;
    Eigen::MatrixXd k, m;
    std::vector<Eigen::Index> disp_dof;        // -1 where eliminated
    std::vector<Eigen::Index> slope_left_dof;  // slope seen by the left element
    std::vector<Eigen::Index> slope_right_dof; // slope seen by the right element

    Eigen::Index dof() const { return k.rows(); }
};

namespace detail {

// Exact element integrals for Hermite cubics on an element of length h,
// DOF order (w_1, w_1', w_2, w_2').
inline Eigen::Matrix4d hermite_bending(double h) {
    const double h2 = h * h, h3 = h2 * h;
    Eigen::Matrix4d k;
    k << 12.0 / h3, 6.0 / h2, -12.0 / h3, 6.0 / h2,
         6.0 / h2,  4.0 / h,  -6.0 / h2,  2.0 / h,
         -12.0 / h3, -6.0 / h2, 12.0 / h3, -6.0 / h2,
         6.0 / h2,  2.0 / h,  -6.0 / h2,  4.0 / h;
    return k;
}

inline Eigen::Matrix4d hermite_mass(double h) {
    const double h2 = h * h;
    Eigen::Matrix4d m;
    m << 156.0,      22.0 * h,  54.0,      -13.0 * h,
         22.0 * h,   4.0 * h2,  13.0 * h,  -3.0 * h2,
         54.0,       13.0 * h,  156.0,     -22.0 * h,
         -13.0 * h,  -3.0 * h2, -22.0 * h, 4.0 * h2;
    return (h / 420.0) * m;
}

inline Eigen::Matrix4d hermite_first_derivative(double h) {
    const double h2 = h * h;
    Eigen::Matrix4d g;
    g << 36.0,     3.0 * h,  -36.0,    3.0 * h,
         3.0 * h,  4.0 * h2, -3.0 * h, -h2,
         -36.0,    -3.0 * h, 36.0,     -3.0 * h,
         3.0 * h,  -h2,      -3.0 * h, 4.0 * h2;
    return g / (30.0 * h);
}

// Global DOF indices of element e (between nodes e and e+1): the slope on the
// right side of the left node and on the left side of the right node.
inline std::array<Eigen::Index, 4> element_dofs(const FemSystem& sys, std::size_t e) {
    return {sys.disp_dof[e], sys.slope_right_dof[e],
            sys.disp_dof[e + 1], sys.slope_left_dof[e + 1]};
}

template <typename Accum>
void scatter(const Eigen::Matrix4d& local, const std::array<Eigen::Index, 4>& dofs, Accum&& add) {
    for (int a = 0; a < 4; ++a) {
        if (dofs[static_cast<std::size_t>(a)] < 0) continue;
        for (int b = 0; b < 4; ++b) {
            if (dofs[static_cast<std::size_t>(b)] < 0) continue;
            add(dofs[static_cast<std::size_t>(a)], dofs[static_cast<std::size_t>(b)], local(a, b));
        }
    }
}

} // namespace detail

inline FemMesh build_mesh(const NondimModel& model, int elements_per_unit) {
    if (elements_per_unit < 4)
        throw std::invalid_argument("build_mesh: elements_per_unit must be at least 4");
    const std::vector<double> breaks = model.segment_nodes();
    FemMesh mesh;
    mesh.nodes.push_back(0.0);
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double h = breaks[s + 1] - breaks[s];
        const int ne = std::max(1, static_cast<int>(std::ceil(h * elements_per_unit)));
        mesh.elements_per_segment.push_back(ne);
        for (int e = 1; e <= ne; ++e)
            mesh.nodes.push_back(breaks[s] + h * e / ne);
        mesh.nodes.back() = breaks[s + 1]; // crack/end abscissae exact
        if (s + 2 < breaks.size())
            mesh.crack_node_index.push_back(mesh.nodes.size() - 1);
    }
    return mesh;
}

inline FemSystem assemble(const NondimModel& model, int elements_per_unit) {
    for (double theta : model.flexibilities)
        if (!(theta > 0.0)) throw std::invalid_argument("assemble: crack flexibility must be positive");

    FemSystem sys;
    sys.mesh = build_mesh(model, elements_per_unit);
    const std::size_t nn = sys.mesh.nodes.size();

    sys.disp_dof.assign(nn, -1);
    sys.slope_left_dof.assign(nn, -1);
    sys.slope_right_dof.assign(nn, -1);
    std::vector<bool> is_crack(nn, false);
    for (std::size_t c : sys.mesh.crack_node_index) is_crack[c] = true;

    Eigen::Index next = 0;
    for (std::size_t i = 0; i < nn; ++i) {
        if (i != 0 && i + 1 != nn) sys.disp_dof[i] = next++;
        sys.slope_left_dof[i] = next++;
        sys.slope_right_dof[i] = is_crack[i] ? next++ : sys.slope_left_dof[i];
    }

    sys.k = Eigen::MatrixXd::Zero(next, next);
    sys.m = Eigen::MatrixXd::Zero(next, next);
    for (std::size_t e = 0; e + 1 < nn; ++e) {
        const double h = sys.mesh.nodes[e + 1] - sys.mesh.nodes[e];
        const auto dofs = detail::element_dofs(sys, e);
        detail::scatter(detail::hermite_bending(h), dofs,
                        [&sys](Eigen::Index a, Eigen::Index b, double v) { sys.k(a, b) += v; });
        detail::scatter(detail::hermite_mass(h), dofs,
                        [&sys](Eigen::Index a, Eigen::Index b, double v) { sys.m(a, b) += v; });
    }
    for (std::size_t c = 0; c < sys.mesh.crack_node_index.size(); ++c) {
        const std::size_t node = sys.mesh.crack_node_index[c];
        const double w = 1.0 / model.flexibilities[c];
        const Eigen::Index sl = sys.slope_left_dof[node], sr = sys.slope_right_dof[node];
        sys.k(sl, sl) += w;
        sys.k(sr, sr) += w;
        sys.k(sl, sr) -= w;
        sys.k(sr, sl) -= w;
    }
    return sys;
}

// Gram matrix of first derivatives in the FEM space, exact per element; used
// to cross-check the modal Gram matrix.
inline Eigen::MatrixXd assemble_first_derivative_form(const FemSystem& sys) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sys.dof(), sys.dof());
    for (std::size_t e = 0; e + 1 < sys.mesh.nodes.size(); ++e) {
        const double h = sys.mesh.nodes[e + 1] - sys.mesh.nodes[e];
        detail::scatter(detail::hermite_first_derivative(h), detail::element_dofs(sys, e),
                        [&g](Eigen::Index a, Eigen::Index b, double v) { g(a, b) += v; });
    }
    return g;
}

struct FemModes {
    Eigen::VectorXd lambda4;  // ascending
    Eigen::MatrixXd vectors;  // M-orthonormal columns
};

// Dense generalized symmetric-definite eigensolve; deliberately simple, this
// is a verification oracle at desk scale (dof <= ~3000). Solved in the
// spectrally inverted form M v = mu K v with lambda^4 = 1/mu: a dense solver
// carries absolute round-off of order eps * (largest eigenvalue), which for
// the direct form is eps/h^4 and would swamp the low modes on fine meshes.
// In the inverted form the low modes are the top of the spectrum and keep
// relative accuracy eps * lambda_k^4 / lambda_1^4.
inline FemModes solve_modes(const FemSystem& sys, int n, bool eigenvalues_only = false) {
    if (n < 1 || n > sys.dof())
        throw std::invalid_argument("solve_modes: n must be in [1, dof]");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(sys.m, sys.k,
                   (eigenvalues_only ? Eigen::EigenvaluesOnly : Eigen::ComputeEigenvectors) |
                       Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success)
        throw numerical_error("solve_modes: generalized eigensolve failed (stiffness matrix not positive definite?)");
    const Eigen::Index dof = sys.dof();
    FemModes modes;
    modes.lambda4.resize(n);
    if (!eigenvalues_only) modes.vectors.resize(dof, n);
    for (int k = 0; k < n; ++k) {
        const double mu = solver.eigenvalues()[dof - 1 - k];
        if (!(mu > 0.0))
            throw numerical_error("solve_modes: mass matrix not positive definite (mesh bug)");
        modes.lambda4[k] = 1.0 / mu;
        if (!eigenvalues_only)
            // K-orthonormal columns rescaled to M-orthonormal: v'Mv = mu.
            modes.vectors.col(k) = solver.eigenvectors().col(dof - 1 - k) / std::sqrt(mu);
    }
    return modes;
}

// Evaluates the FEM field (or derivative up to order 3) carried by a DOF
// vector; at a crack node the side flag picks the element supplying the value.
inline double fem_eval(const FemSystem& sys, const Eigen::VectorXd& vec, double x, int order,
                       bool from_left = false) {
    if (order < 0 || order > 3) throw std::invalid_argument("fem_eval: order must be 0..3");
    const std::vector<double>& nodes = sys.mesh.nodes;
    if (x < nodes.front() || x > nodes.back()) throw std::domain_error("fem_eval: x outside mesh");
    std::size_t e;
    if (from_left) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
        e = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    } else {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
        e = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    }
    e = (e == 0) ? 0 : e - 1;
    e = std::min(e, nodes.size() - 2);
    const double h = nodes[e + 1] - nodes[e];
    const double t = std::clamp((x - nodes[e]) / h, 0.0, 1.0);
    const auto dofs = detail::element_dofs(sys, e);
    const auto val = [&vec, &dofs](int a) {
        const Eigen::Index d = dofs[static_cast<std::size_t>(a)];
        return d < 0 ? 0.0 : vec[d];
    };
    // Hermite shape functions and derivatives in t = (x - x_e)/h.
    double sh[4];
    switch (order) {
        case 0:
            sh[0] = 1.0 - 3.0 * t * t + 2.0 * t * t * t;
            sh[1] = h * (t - 2.0 * t * t + t * t * t);
            sh[2] = 3.0 * t * t - 2.0 * t * t * t;
            sh[3] = h * (-t * t + t * t * t);
            break;
        case 1:
            sh[0] = (-6.0 * t + 6.0 * t * t) / h;
            sh[1] = 1.0 - 4.0 * t + 3.0 * t * t;
            sh[2] = (6.0 * t - 6.0 * t * t) / h;
            sh[3] = -2.0 * t + 3.0 * t * t;
            break;
        case 2:
            sh[0] = (-6.0 + 12.0 * t) / (h * h);
            sh[1] = (-4.0 + 6.0 * t) / h;
            sh[2] = (6.0 - 12.0 * t) / (h * h);
            sh[3] = (-2.0 + 6.0 * t) / h;
            break;
        default:
            sh[0] = 12.0 / (h * h * h);
            sh[1] = 6.0 / (h * h);
            sh[2] = -12.0 / (h * h * h);
            sh[3] = 6.0 / (h * h);
            break;
    }
    return sh[0] * val(0) + sh[1] * val(1) + sh[2] * val(2) + sh[3] * val(3);
}

// Two-level Richardson extrapolation for an h^4-convergent quantity sampled on
// meshes with spacing ratio 2 (coarse, medium, fine).
inline double richardson4(double coarse, double medium, double fine) {
    const double r1 = (16.0 * medium - coarse) / 15.0;
    const double r2 = (16.0 * fine - medium) / 15.0;
    return (64.0 * r2 - r1) / 63.0;
}

// Convenience wrapper: Richardson-extrapolated first n eigenvalues lambda
// (fourth roots) over meshes {epu, 2 epu, 4 epu}.
inline std::vector<double> fem_reference_lambdas(const NondimModel& model, int elements_per_unit,
                                                 int n) {
    Eigen::VectorXd l4[3];
    for (int i = 0; i < 3; ++i)
        l4[i] = solve_modes(assemble(model, elements_per_unit << i), n, true).lambda4;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] =
            std::pow(richardson4(l4[0][k], l4[1][k], l4[2][k]), 0.25);
    return out;
}

} // namespace crackdyn
