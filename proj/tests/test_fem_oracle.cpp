#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "crackdyn/fem_oracle.hpp"
#include "crackdyn/modal_solver.hpp"

using namespace crackdyn;

namespace {

NondimModel midpoint_model(double theta) {
    NondimModel m;
    m.crack_positions = {kPi / 2.0};
    m.flexibilities = {theta};
    return m;
}

// Hermite interpolant of sin(x) on the mesh, expressed in free DOFs.
Eigen::VectorXd interpolate_sine(const FemSystem& sys) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sys.dof());
    for (std::size_t i = 0; i < sys.mesh.nodes.size(); ++i) {
        const double x = sys.mesh.nodes[i];
        if (sys.disp_dof[i] >= 0) w[sys.disp_dof[i]] = std::sin(x);
        if (sys.slope_left_dof[i] >= 0) w[sys.slope_left_dof[i]] = std::cos(x);
        if (sys.slope_right_dof[i] >= 0) w[sys.slope_right_dof[i]] = std::cos(x);
    }
    return w;
}

} // namespace

TEST_CASE("assembled matrices are symmetric") {
    FemSystem sys = assemble(midpoint_model(1.0), 16);
    CHECK((sys.k - sys.k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sys.m - sys.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt_k(sys.k);
    CHECK(llt_k.info() == Eigen::Success);
    Eigen::LLT<Eigen::MatrixXd> llt_m(sys.m);
    CHECK(llt_m.info() == Eigen::Success);
}

TEST_CASE("mesh places crack abscissae on nodes") {
    NondimModel m;
    m.crack_positions = {0.9, 2.0};
    m.flexibilities = {1.0, 1.0};
    FemMesh mesh = build_mesh(m, 7);
    for (double s : m.crack_positions) {
        bool found = false;
        for (double x : mesh.nodes) found = found || x == s;
        CHECK(found);
    }
    CHECK(mesh.nodes.front() == 0.0);
    CHECK(mesh.nodes.back() == kPi);
    for (std::size_t i = 0; i + 1 < mesh.nodes.size(); ++i)
        CHECK(mesh.nodes[i] < mesh.nodes[i + 1]);
}

TEST_CASE("dof count matches 2 nodes + cracks - 2") {
    NondimModel m;
    m.crack_positions = {1.0, 2.2};
    m.flexibilities = {0.5, 2.0};
    FemSystem sys = assemble(m, 8);
    CHECK(static_cast<std::size_t>(sys.dof()) == 2 * sys.mesh.nodes.size() + 2 - 2);
}

TEST_CASE("patch test reproduces the bending energy of sine") {
    // For the interpolant of sin the discrete form converges to
    // int (sin'')^2 = pi/2 at fourth order.
    const double exact = kPi / 2.0;
    double prev_err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const int epu = 8 << i;
        FemSystem sys = assemble(NondimModel{}, epu);
        Eigen::VectorXd w = interpolate_sine(sys);
        const double err = std::fabs(w.dot(sys.k * w) - exact);
        if (i == 1) {
            const double ratio = prev_err / err;
            CHECK(ratio > 8.0);
            CHECK(ratio < 32.0);
        }
        prev_err = err;
    }
    CHECK(prev_err < 1e-5);
}

TEST_CASE("uniform fundamental eigenvalue converges to one") {
    double prev = 2.0;
    for (int epu : {4, 8, 16}) {
        const double l4 = solve_modes(assemble(NondimModel{}, epu), 1, true).lambda4[0];
        CHECK(l4 >= 1.0);
        CHECK(l4 <= prev);
        prev = l4;
    }
    CHECK_THAT(prev, Catch::Matchers::WithinRel(1.0, 1e-6));
}

TEST_CASE("uniform spectrum follows the quartic convergence law") {
    // Discretization error of lambda^4 is (kh)^4/720 to leading order; a
    // small absolute allowance covers round-off in the factorized solve.
    const int epu = 64;
    FemModes modes = solve_modes(assemble(NondimModel{}, epu), 6, true);
    for (int k = 1; k <= 6; ++k) {
        const double exact = std::pow(static_cast<double>(k), 4.0);
        const double rel = std::fabs(modes.lambda4[k - 1] - exact) / exact;
        const double law = std::pow(static_cast<double>(k) / epu, 4.0) / 720.0;
        CHECK(rel <= 1.3 * law + 1.5e-8);
    }
}

TEST_CASE("Richardson extrapolation reaches 1e-8 on the uniform spectrum") {
    std::vector<double> lam = fem_reference_lambdas(NondimModel{}, 16, 6);
    for (int k = 1; k <= 6; ++k)
        CHECK_THAT(lam[static_cast<std::size_t>(k - 1)],
                   Catch::Matchers::WithinRel(static_cast<double>(k), 1e-8));
}

TEST_CASE("eigenvalue error decreases at fourth order") {
    const double exact = 81.0; // k = 3
    double errs[3];
    for (int i = 0; i < 3; ++i)
        errs[i] = std::fabs(solve_modes(assemble(NondimModel{}, 4 << i), 3, true).lambda4[2] -
                            exact);
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    CHECK(p1 > 3.5);
    CHECK(p1 < 4.5);
    CHECK(p2 > 3.5);
    CHECK(p2 < 4.5);
}

TEST_CASE("eigenvalue estimates are monotone from above under refinement") {
    const NondimModel m = midpoint_model(1.0);
    Eigen::VectorXd prev;
    for (int epu : {4, 8, 16}) {
        Eigen::VectorXd l4 = solve_modes(assemble(m, epu), 4, true).lambda4;
        if (prev.size() > 0)
            for (int k = 0; k < 4; ++k) CHECK(l4[k] <= prev[k] * (1.0 + 1e-12));
        prev = l4;
    }
}

TEST_CASE("even modes are barely touched by a midpoint crack") {
    // The zero-curvature modes gain nothing from the slope jump; the extra
    // slope DOF still enriches the trial space, so the discrete eigenvalue
    // drops, but only by a sliver of its own discretization error.
    const int epu = 32;
    Eigen::VectorXd cracked = solve_modes(assemble(midpoint_model(1.0), epu), 4, true).lambda4;
    Eigen::VectorXd plain = solve_modes(assemble(NondimModel{}, epu), 4, true).lambda4;
    for (int k : {1, 3}) {
        const double exact = std::pow(k + 1.0, 4.0);
        const double shift = plain[k] - cracked[k];
        CHECK(shift >= 0.0);
        CHECK(shift <= 0.1 * (plain[k] - exact));
    }
    CHECK(cracked[0] < 0.9 * plain[0]);
    CHECK(cracked[2] < 0.95 * plain[2]);
}

TEST_CASE("fundamental eigenvalue matches the transfer matrix oracle") {
    const NondimModel m = midpoint_model(1.0);
    const double tm = find_eigenvalues(m, 1)[0];
    const double fem = fem_reference_lambdas(m, 32, 1)[0];
    CHECK_THAT(fem, Catch::Matchers::WithinRel(tm, 1e-6));
}

TEST_CASE("eigenvectors are mass orthonormal") {
    FemSystem sys = assemble(midpoint_model(1.0), 16);
    FemModes modes = solve_modes(sys, 5);
    Eigen::MatrixXd gram = modes.vectors.transpose() * sys.m * modes.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("computed modes satisfy the spring relation at the crack") {
    const double theta = 1.0;
    const NondimModel m = midpoint_model(theta);
    FemSystem sys = assemble(m, 64);
    FemModes modes = solve_modes(sys, 1);
    const Eigen::VectorXd v = modes.vectors.col(0);
    const double s = m.crack_positions[0];
    const double jump = fem_eval(sys, v, s, 1, false) - fem_eval(sys, v, s, 1, true);
    const double curv = 0.5 * (fem_eval(sys, v, s, 2, true) + fem_eval(sys, v, s, 2, false));
    CHECK_THAT(jump, Catch::Matchers::WithinRel(theta * curv, 1e-3));
}

TEST_CASE("assemble and solve reject invalid input") {
    NondimModel bad;
    bad.crack_positions = {1.0};
    bad.flexibilities = {0.0};
    CHECK_THROWS_AS(assemble(bad, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(NondimModel{}, 3), std::invalid_argument);
    FemSystem sys = assemble(NondimModel{}, 4);
    CHECK_THROWS_AS(solve_modes(sys, sys.dof() + 1), std::invalid_argument);
    CHECK_THROWS_AS(solve_modes(sys, 0), std::invalid_argument);
}

TEST_CASE("richardson4 annihilates quartic and sextic error terms") {
    const double a = 16.0, b = 3.7, c = -2.1;
    auto f = [&](double h) { return a + b * h * h * h * h + c * std::pow(h, 6.0); };
    const double out = richardson4(f(0.1), f(0.05), f(0.025));
    CHECK_THAT(out, Catch::Matchers::WithinRel(a, 1e-12));
}
