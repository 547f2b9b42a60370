#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "crackdyn/modal_algebra.hpp"
#include "crackdyn/modal_solver.hpp"
#include "crackdyn/quadrature.hpp"

using namespace crackdyn;

namespace {

NondimModel two_crack_model() {
    NondimModel m;
    m.crack_positions = {1.0, 2.2};
    m.flexibilities = {0.5, 2.0};
    return m;
}

const ModalBasis& uniform_basis() {
    static ModalBasis basis = build_basis(NondimModel{}, 8);
    return basis;
}

const ModalBasis& cracked_basis() {
    static ModalBasis basis = build_basis(two_crack_model(), 8);
    return basis;
}

Eigen::VectorXd unit(int n, int k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[k] = 1.0;
    return e;
}

} // namespace

TEST_CASE("apply_A is diagonal in the eigenbasis") {
    const ModalBasis& basis = uniform_basis();
    Eigen::VectorXd out = apply_A(basis, unit(8, 0));
    CHECK_THAT(out[0], Catch::Matchers::WithinRel(1.0, 1e-12));
    for (int k = 1; k < 8; ++k) CHECK(out[k] == 0.0);
    CHECK(apply_A(basis, Eigen::VectorXd::Zero(8)).isZero(0.0));

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8);
    for (int k = 0; k < 8; ++k) c[k] = ud(rng);
    CHECK_THAT(c.dot(apply_A(basis, c)),
               Catch::Matchers::WithinRel(2.0 * energy_bending(basis, c), 1e-14));
}

TEST_CASE("apply_B is the Gram matrix action") {
    const ModalBasis& basis = uniform_basis();
    for (int k = 0; k < 8; ++k) {
        Eigen::VectorXd out = apply_B(basis, unit(8, k));
        CHECK_THAT(out[k], Catch::Matchers::WithinAbs((k + 1.0) * (k + 1.0), 1e-9));
    }

    const ModalBasis& cb = cracked_basis();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd c(8), d(8);
        for (int k = 0; k < 8; ++k) {
            c[k] = ud(rng);
            d[k] = ud(rng);
        }
        CHECK(c.dot(apply_B(cb, c)) >= 0.0);
        CHECK_THAT(d.dot(apply_B(cb, c)), Catch::Matchers::WithinRel(c.dot(apply_B(cb, d)), 1e-12));
    }
}

TEST_CASE("bending energy is the half sum of lambda4 c squared") {
    const ModalBasis& basis = uniform_basis();
    CHECK(energy_bending(basis, Eigen::VectorXd::Zero(8)) == 0.0);
    CHECK_THAT(energy_bending(basis, unit(8, 0)), Catch::Matchers::WithinRel(0.5, 1e-12));
}

TEST_CASE("bending energy matches piecewise quadrature with jump terms") {
    const ModalBasis& basis = cracked_basis();
    const NondimModel& m = basis.model;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8);
    for (int k = 0; k < 8; ++k) c[k] = ud(rng);

    const auto field = [&](double x, int order, Side side) {
        double acc = 0.0;
        for (int k = 0; k < 8; ++k)
            acc += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], x, order, side);
        return acc;
    };
    double form = integrate_adaptive(
        [&](double x) {
            const double w = field(x, 2, Side::right);
            return w * w;
        },
        m.segment_nodes());
    for (std::size_t i = 0; i < m.crack_count(); ++i) {
        const double s = m.crack_positions[i];
        const double jump = field(s, 1, Side::right) - field(s, 1, Side::left);
        form += jump * jump / m.flexibilities[i];
    }
    CHECK_THAT(energy_bending(basis, c), Catch::Matchers::WithinRel(0.5 * form, 1e-7));
}

TEST_CASE("axial energy follows the quartic potential") {
    const ModalBasis& basis = uniform_basis();
    CHECK(energy_axial(basis, Eigen::VectorXd::Zero(8), 0.0) == 0.0);
    CHECK_THAT(energy_axial(basis, Eigen::VectorXd::Zero(8), 1.7),
               Catch::Matchers::WithinRel(1.7 * 1.7 / (2.0 * kPi), 1e-12));
    CHECK_THAT(energy_axial(basis, unit(8, 0), 0.0),
               Catch::Matchers::WithinRel(1.0 / (8.0 * kPi), 1e-9));
}

TEST_CASE("gradients match five-point central differences") {
    const ModalBasis& basis = cracked_basis();
    const double beta = 1.3;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd c(8);
        for (int k = 0; k < 8; ++k) c[k] = ud(rng);
        const Eigen::VectorXd gb = grad_Ub(basis, c);
        const Eigen::VectorXd ga = grad_Ua(basis, c, beta);
        const double h = 1e-4;
        for (int k = 0; k < 8; ++k) {
            const auto diff5 = [&](auto&& f) {
                Eigen::VectorXd p = c;
                const double x = c[k];
                p[k] = x + 2 * h;
                const double f2p = f(p);
                p[k] = x + h;
                const double f1p = f(p);
                p[k] = x - h;
                const double f1m = f(p);
                p[k] = x - 2 * h;
                const double f2m = f(p);
                return (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
            };
            const double db = diff5([&](const Eigen::VectorXd& p) { return energy_bending(basis, p); });
            const double da =
                diff5([&](const Eigen::VectorXd& p) { return energy_axial(basis, p, beta); });
            CHECK_THAT(db, Catch::Matchers::WithinAbs(gb[k], 1e-6 * std::max(1.0, std::fabs(gb[k]))));
            CHECK_THAT(da, Catch::Matchers::WithinAbs(ga[k], 1e-6 * std::max(1.0, std::fabs(ga[k]))));
        }
    }
}

TEST_CASE("grad_Ub is linear and symmetric") {
    const ModalBasis& basis = cracked_basis();
    CHECK(grad_Ub(basis, Eigen::VectorXd::Zero(8)).isZero(0.0));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8), d(8);
    for (int k = 0; k < 8; ++k) {
        c[k] = ud(rng);
        d[k] = ud(rng);
    }
    CHECK_THAT(d.dot(grad_Ub(basis, c)), Catch::Matchers::WithinRel(c.dot(grad_Ub(basis, d)), 1e-12));
    Eigen::VectorXd sum = grad_Ub(basis, c + d);
    CHECK((sum - grad_Ub(basis, c) - grad_Ub(basis, d)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("grad_Ua on a single uniform mode is the closed form") {
    const ModalBasis& basis = uniform_basis();
    const double beta = 0.8, c1 = 0.6;
    Eigen::VectorXd c = c1 * unit(8, 0);
    Eigen::VectorXd g = grad_Ua(basis, c, beta);
    CHECK_THAT(g[0], Catch::Matchers::WithinAbs((beta + 0.5 * c1 * c1) * c1 / kPi, 1e-9));
    CHECK(grad_Ua(basis, Eigen::VectorXd::Zero(8), beta).isZero(0.0));
}

TEST_CASE("axial energy is convex along rays for nonnegative beta") {
    const ModalBasis& basis = cracked_basis();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8);
    for (int k = 0; k < 8; ++k) c[k] = ud(rng);
    for (double beta : {0.0, 0.5, 2.0}) {
        for (int i = -10; i <= 10; ++i) {
            const double t = i * 0.2, dt = 0.2;
            const double second = energy_axial(basis, (t + dt) * c, beta) -
                                  2.0 * energy_axial(basis, t * c, beta) +
                                  energy_axial(basis, (t - dt) * c, beta);
            CHECK(second >= -1e-12);
        }
    }
}

TEST_CASE("weak form of B matches quadrature of the slope energy") {
    const ModalBasis& basis = cracked_basis();
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8);
    for (int k = 0; k < 8; ++k) c[k] = ud(rng);
    const double quad = integrate_adaptive(
        [&](double x) {
            double dy = 0.0;
            for (int k = 0; k < 8; ++k)
                dy += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], x, 1);
            return dy * dy;
        },
        basis.model.segment_nodes());
    CHECK_THAT(c.dot(apply_B(basis, c)), Catch::Matchers::WithinRel(quad, 1e-8));
}

TEST_CASE("reconstruct_field reproduces eigenfunctions and boundary conditions") {
    const ModalBasis& basis = cracked_basis();
    std::vector<double> xs = {0.0, 0.4, 1.0, 1.7, 2.2, 2.9, kPi};
    std::vector<double> y = reconstruct_field(basis, unit(8, 2), xs, 0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK_THAT(y[i], Catch::Matchers::WithinAbs(evaluate(basis.pairs[2], xs[i], 0), 1e-13));
    CHECK_THAT(y.front(), Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(y.back(), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("reconstructed fields inherit the junction identity") {
    const ModalBasis& basis = cracked_basis();
    const NondimModel& m = basis.model;
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Eigen::VectorXd c(8);
    for (int k = 0; k < 8; ++k) c[k] = ud(rng);
    for (std::size_t i = 0; i < m.crack_count(); ++i) {
        const double s = m.crack_positions[i];
        double jl = 0.0, jr = 0.0, curv = 0.0;
        for (int k = 0; k < 8; ++k) {
            jl += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], s, 1, Side::left);
            jr += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], s, 1, Side::right);
            curv += c[k] * evaluate(basis.pairs[static_cast<std::size_t>(k)], s, 2, Side::right);
        }
        CHECK_THAT(jr - jl, Catch::Matchers::WithinAbs(m.flexibilities[i] * curv, 1e-8));
    }
}

TEST_CASE("energy report totals its parts") {
    const ModalBasis& basis = cracked_basis();
    State s = State::zero(8);
    s.c << 0.3, -0.1, 0.2, 0.0, 0.05, -0.02, 0.0, 0.1;
    s.v << -0.2, 0.4, 0.0, 0.1, 0.0, 0.0, 0.03, -0.05;
    EnergyReport arch = energy_report(basis, s, 1.5, true);
    CHECK(arch.kinetic >= 0.0);
    CHECK(arch.bending >= 0.0);
    CHECK(arch.axial >= 0.0);
    CHECK_THAT(arch.total,
               Catch::Matchers::WithinRel(arch.kinetic + arch.bending + arch.axial, 1e-14));
    CHECK_THAT(arch.kinetic, Catch::Matchers::WithinRel(0.5 * s.v.squaredNorm(), 1e-14));

    EnergyReport beam = energy_report(basis, s, 1.5, false);
    CHECK(beam.axial == 0.0);
    CHECK_THAT(beam.total, Catch::Matchers::WithinRel(beam.kinetic + beam.bending, 1e-14));
}

TEST_CASE("dimension mismatches are rejected") {
    const ModalBasis& basis = uniform_basis();
    CHECK_THROWS_AS(apply_A(basis, Eigen::VectorXd::Zero(5)), std::invalid_argument);
    CHECK_THROWS_AS(apply_B(basis, Eigen::VectorXd::Zero(9)), std::invalid_argument);
    CHECK_THROWS_AS(grad_Ua(basis, Eigen::VectorXd::Zero(3), 1.0), std::invalid_argument);
}
