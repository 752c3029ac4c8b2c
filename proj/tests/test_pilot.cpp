#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jumpkit/pilot.hpp"
#include "helpers.hpp"

using namespace jumpkit;
using jumpkit::testing::random_hermitian;
using jumpkit::testing::random_state;

namespace {

Matrix sigma_x() {
    Matrix s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

Matrix sigma_z() {
    Matrix s(2, 2);
    s << 1.0, 0.0, 0.0, -1.0;
    return s;
}

}  // namespace

TEST_CASE("null Hamiltonian gives a constant trajectory") {
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    Trajectory traj = evolve(HamiltonianSchedule::constant(Matrix::Zero(2, 2)), psi0,
                             uniform_grid(0.0, 3.0, 31));
    for (const Vector& s : traj.states) REQUIRE((s - psi0).norm() < 1e-12);
}

TEST_CASE("rk4 reproduces the closed-form Rabi rotation") {
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    Trajectory traj = evolve(HamiltonianSchedule::constant(sigma_x()), psi0,
                             uniform_grid(0.0, M_PI / 2.0, 101));
    Vector expected(2);
    expected << 0.0, Complex(0.0, -1.0);
    REQUIRE((traj.states.back() - expected).norm() < 1e-8);
}

TEST_CASE("time-dependent phase accumulation matches the exact integral") {
    // H(t) = t sigma_z; phases exp(-+ i t^2/2), so t = sqrt(2 pi) gives -1 on both.
    Vector psi0(2);
    psi0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    double t_end = std::sqrt(2.0 * M_PI);
    auto schedule = HamiltonianSchedule::time_varying([](double t) { return Matrix(t * sigma_z()); });
    Trajectory traj = evolve(schedule, psi0, uniform_grid(0.0, t_end, 201));
    Vector expected = -psi0;
    REQUIRE((traj.states.back() - expected).norm() < 1e-8);
}

TEST_CASE("eig_exact equals rk4 for a static Hamiltonian") {
    std::mt19937_64 rng(41);
    Matrix h = random_hermitian(4, rng);
    Vector psi0 = random_state(4, rng);
    auto grid = uniform_grid(0.0, 2.0, 101);
    Trajectory exact = evolve(HamiltonianSchedule::constant(h), psi0, grid, EvolveMethod::eig_exact);
    Trajectory rk = evolve(HamiltonianSchedule::constant(h), psi0, grid, EvolveMethod::rk4);
    REQUIRE(detail::max_state_deviation(exact, rk) < 1e-8);
}

TEST_CASE("eig_exact refuses time-dependent schedules") {
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    auto schedule = HamiltonianSchedule::time_varying([](double t) { return Matrix(t * sigma_z()); });
    REQUIRE_THROWS_AS(evolve(schedule, psi0, uniform_grid(0.0, 1.0, 11), EvolveMethod::eig_exact),
                      ContractViolation);
}

TEST_CASE("norm drift stays below 1e-8 under the Hermitian contract") {
    std::mt19937_64 rng(6);
    Matrix h = random_hermitian(6, rng);
    Vector psi0 = random_state(6, rng);
    Trajectory traj = evolve(HamiltonianSchedule::constant(h), psi0, uniform_grid(0.0, 10.0, 401));
    REQUIRE(detail::max_norm_drift(traj) < 1e-8);
}

TEST_CASE("rk4 error drops ~16x per step halving against eig_exact") {
    std::mt19937_64 rng(9);
    Matrix h = random_hermitian(6, rng);
    Vector psi0 = random_state(6, rng);
    auto grid = uniform_grid(0.0, 1.0, 9);
    auto schedule = HamiltonianSchedule::constant(h);
    Trajectory exact = evolve(schedule, psi0, grid, EvolveMethod::eig_exact);
    Trajectory coarse = detail::rk4_pass(schedule, psi0, grid, 2);
    Trajectory fine = detail::rk4_pass(schedule, psi0, grid, 4);
    double e_coarse = detail::max_state_deviation(exact, coarse);
    double e_fine = detail::max_state_deviation(exact, fine);
    double ratio = e_coarse / e_fine;
    REQUIRE(ratio > 8.0);
    REQUIRE(ratio < 32.0);
}

TEST_CASE("evolution is linear in the initial state") {
    std::mt19937_64 rng(13);
    Matrix h = random_hermitian(5, rng);
    Vector psi1 = random_state(5, rng);
    // Orthonormalize a second direction so the combination stays normalized.
    Vector psi2 = random_state(5, rng);
    psi2 -= psi1 * psi1.dot(psi2);
    psi2.normalize();
    Complex alpha(0.6, 0.0), beta(0.0, 0.8);
    Vector combo = alpha * psi1 + beta * psi2;

    auto grid = uniform_grid(0.0, 1.5, 61);
    auto schedule = HamiltonianSchedule::constant(h);
    Trajectory t1 = evolve(schedule, psi1, grid);
    Trajectory t2 = evolve(schedule, psi2, grid);
    Trajectory tc = evolve(schedule, combo, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        REQUIRE((tc.states[k] - alpha * t1.states[k] - beta * t2.states[k]).norm() < 1e-8);
}

TEST_CASE("non-Hermitian samples violate the Hermitian contract") {
    Matrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    REQUIRE_THROWS_AS(evolve(HamiltonianSchedule::constant(bad), psi0, uniform_grid(0.0, 1.0, 11)),
                      ContractViolation);
}

TEST_CASE("step floor raises a convergence error") {
    Matrix huge = 1e8 * sigma_x();
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    EvolveOptions opt;
    opt.max_doublings = 3;
    REQUIRE_THROWS_AS(evolve(HamiltonianSchedule::constant(huge), psi0, uniform_grid(0.0, 1.0, 3),
                             EvolveMethod::rk4, opt),
                      ConvergenceError);
}

TEST_CASE("effective evolution: pure decay on one level") {
    // H = -i gamma |1><1| with gamma = 1: amplitude e^{-t} on level 1.
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = Complex(0.0, -1.0);
    Vector psi0(2);
    psi0 << 0.0, 1.0;
    Trajectory traj = evolve_effective(HamiltonianSchedule::constant(h, /*hermitian=*/false), psi0,
                                       uniform_grid(0.0, 1.0, 101));
    REQUIRE(std::abs(traj.states.back()[1] - Complex(std::exp(-1.0), 0.0)) < 1e-9);
    REQUIRE(std::abs(traj.states.back()[0]) < 1e-12);
}

TEST_CASE("effective evolution keeps the norm constant for H = 0") {
    Vector psi0(2);
    psi0 << 0.6, 0.8;
    Trajectory traj = evolve_effective(HamiltonianSchedule::constant(Matrix::Zero(2, 2), false), psi0,
                                       uniform_grid(0.0, 5.0, 51));
    for (const Vector& s : traj.states) REQUIRE(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("effective evolution matches the dense exponential oracle") {
    // Non-Hermitian 3x3 with decaying levels, against scaling-and-squaring.
    Matrix h(3, 3);
    h << Complex(0.0, 0.0), Complex(0.7, 0.0), Complex(0.0, 0.1),
         Complex(0.7, 0.0), Complex(0.3, -0.5), Complex(0.0, 0.0),
         Complex(0.0, -0.1), Complex(0.0, 0.0), Complex(-0.2, -0.05);
    Vector psi0(3);
    psi0 << 1.0, 0.0, 0.0;
    auto grid = uniform_grid(0.0, 4.0, 81);
    Trajectory traj = evolve_effective(HamiltonianSchedule::constant(h, false), psi0, grid);
    for (std::size_t k = 0; k < grid.size(); k += 16) {
        Vector oracle = matrix_exponential_apply(Operator::general(h), grid[k], psi0);
        REQUIRE((traj.states[k] - oracle).norm() < 1e-8);
    }
}

TEST_CASE("effective evolution rejects initial norms above one") {
    Vector psi0(2);
    psi0 << 1.0, 1.0;
    REQUIRE_THROWS_AS(
        evolve_effective(HamiltonianSchedule::constant(Matrix::Zero(2, 2), false), psi0,
                         uniform_grid(0.0, 1.0, 11)),
        ContractViolation);
}

TEST_CASE("trajectory grid lookup") {
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    Trajectory traj = evolve(HamiltonianSchedule::constant(Matrix::Zero(2, 2)), psi0,
                             uniform_grid(0.0, 1.0, 11));
    REQUIRE(traj.index_of(0.5) == 5);
    REQUIRE(traj.index_of(0.123) == 1);  // within half a step of t = 0.1
    REQUIRE_THROWS_AS(traj.index_of(1.2), ContractViolation);
}
