#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jumpkit/decay.hpp"
#include "jumpkit/zeno.hpp"
#include "helpers.hpp"

using namespace jumpkit;

namespace {

Matrix sigma_x() {
    Matrix s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

Vector ground() {
    Vector v(2);
    v << 1.0, 0.0;
    return v;
}

Projector pi_ground() { return Projector::onto_basis(2, {0}); }

}  // namespace

TEST_CASE("dissection validation") {
    REQUIRE_THROWS_AS(Dissection({0.5, 1.0}), ContractViolation);
    REQUIRE_THROWS_AS(Dissection({0.0, 1.0, 1.0}), ContractViolation);
    REQUIRE(Dissection::uniform(2.0, 4).segments() == 4);
}

TEST_CASE("watched pot matches cos^{2N}(Omega T / N) for the Rabi model") {
    double t_end = M_PI / 2.0;
    for (int n : {1, 2, 4}) {
        auto p = watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(t_end, n));
        double expected = std::pow(std::cos(t_end / n), 2.0 * n);
        REQUIRE(std::abs(p.back() - expected) < 1e-12);
    }
    // The stated values.
    REQUIRE(watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(t_end, 1)).back() ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE(watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(t_end, 2)).back() ==
            Catch::Approx(0.25).margin(1e-12));
    REQUIRE(watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(t_end, 4)).back() ==
            Catch::Approx(0.5307900429449552).margin(1e-10));
}

TEST_CASE("watched pot closed form holds for all N up to 1024") {
    double t_end = M_PI / 2.0;
    for (int n = 1; n <= 1024; n *= 2) {
        auto p = watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(t_end, n));
        double expected = std::pow(std::cos(t_end / n), 2.0 * n);
        REQUIRE(std::abs(p.back() - expected) < 1e-10);
    }
}

TEST_CASE("survival probabilities are non-increasing in k") {
    std::mt19937_64 rng(17);
    Matrix h = jumpkit::testing::random_hermitian(4, rng);
    Matrix u = jumpkit::testing::random_unitary(4, rng);
    Projector pi = Projector::from_frame(u.leftCols(2));
    Vector psi0 = project(pi, jumpkit::testing::random_state(4, rng));
    psi0.normalize();
    auto p = watched_pot(h, psi0, pi, Dissection::uniform(3.0, 24));
    for (std::size_t k = 1; k < p.size(); ++k) REQUIRE(p[k] <= p[k - 1] + 1e-14);
}

TEST_CASE("watched pot rejects states outside the projector range") {
    Vector bad(2);
    bad << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    REQUIRE_THROWS_AS(watched_pot(sigma_x(), bad, pi_ground(), Dissection::uniform(1.0, 2)),
                      ContractViolation);
}

TEST_CASE("zeno limit: survival increases toward 1 with O(1/N) deficit") {
    std::vector<int> n_list{1, 2, 4, 8, 16, 32, 64, 128, 256};
    ZenoTable table = zeno_limit_check(sigma_x(), ground(), pi_ground(), M_PI / 2.0, n_list);
    for (std::size_t k = 1; k < table.rows.size(); ++k)
        REQUIRE(table.rows[k].p_n > table.rows[k - 1].p_n);
    REQUIRE(1.0 - table.rows.back().p_n < 0.01);

    // The 1/N convergence rate is asymptotic; fit past the first octaves.
    ZenoTable tail = zeno_limit_check(sigma_x(), ground(), pi_ground(), M_PI / 2.0,
                                      {4, 8, 16, 32, 64, 128, 256, 512, 1024});
    REQUIRE(tail.slope_valid);
    REQUIRE(tail.slope == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("zeno limit: H = 0 never decays") {
    ZenoTable table = zeno_limit_check(Matrix::Zero(2, 2), ground(), pi_ground(), 1.0, {1, 2, 4, 8});
    for (const ZenoRow& row : table.rows) REQUIRE(row.p_n == Catch::Approx(1.0).margin(1e-14));
    REQUIRE_FALSE(table.slope_valid);
}

TEST_CASE("frozen evolution bound: 1 - p_N < pi^2/(4N) + 1e-6") {
    for (int n = 1; n <= 1024; n *= 2) {
        auto p = watched_pot(sigma_x(), ground(), pi_ground(), Dissection::uniform(M_PI / 2.0, n));
        REQUIRE(1.0 - p.back() < M_PI * M_PI / (4.0 * n) + 1e-6);
    }
}

TEST_CASE("small-time law: Rabi decay signal has slope 2") {
    double slope = small_time_law(sigma_x(), ground(), pi_ground(), log_grid(1e-3, 1e-1, 24));
    REQUIRE(slope == Catch::Approx(2.0).margin(0.05));
}

TEST_CASE("small-time law: degenerate case raises an underflow error") {
    REQUIRE_THROWS_AS(small_time_law(Matrix::Zero(2, 2), ground(), pi_ground(), log_grid(1e-3, 1e-1, 8)),
                      NumericError);
}

TEST_CASE("small-time law: decay model shows the same quadratic start") {
    DecayModel model = DecayModel::make(0.1, 0.0, 60, 1.0);
    Matrix h = model.full_hamiltonian();
    Vector psi0 = Vector::Zero(model.dim());
    psi0[0] = 1.0;
    Projector pi = Projector::onto_basis(model.dim(), {0});
    double slope = small_time_law(h, psi0, pi, log_grid(1e-3, 1e-1, 16));
    REQUIRE(slope == Catch::Approx(2.0).margin(0.05));
}

TEST_CASE("unconditional watched pot agrees with a density-matrix oracle") {
    // Oracle: rho -> Pi U rho U+ Pi + (1-Pi) U rho U+ (1-Pi), p_k = tr(Pi rho).
    Matrix h = sigma_x();
    Vector psi0 = ground();
    Projector pi = pi_ground();
    int n = 10;
    Dissection d = Dissection::uniform(M_PI / 2.0, n);

    auto p_tree = watched_pot_unconditional(h, psi0, pi, d);

    SpectralDecomposition spec(h);
    Matrix u_step = spec.eigenvectors() *
                    (Eigen::VectorXcd((spec.eigenvalues() * Complex(0.0, -(d.times[1] - d.times[0]))).array().exp()))
                        .asDiagonal() *
                    spec.eigenvectors().adjoint();
    Matrix rho = psi0 * psi0.adjoint();
    const Matrix& p_mat = pi.matrix();
    Matrix q_mat = Matrix::Identity(2, 2) - p_mat;
    std::vector<double> p_oracle{1.0};
    for (int k = 0; k < n; ++k) {
        rho = u_step * rho * u_step.adjoint();
        p_oracle.push_back((p_mat * rho).trace().real());
        rho = p_mat * rho * p_mat + q_mat * rho * q_mat;
    }
    REQUIRE(p_tree.size() == p_oracle.size());
    for (std::size_t k = 0; k < p_tree.size(); ++k)
        REQUIRE(p_tree[k] == Catch::Approx(p_oracle[k]).margin(1e-12));
}

TEST_CASE("unconditional survival also converges to 1 with fine dissections") {
    std::vector<double> p_final;
    for (int n : {2, 4, 8, 16})
        p_final.push_back(watched_pot_unconditional(sigma_x(), ground(), pi_ground(),
                                                    Dissection::uniform(M_PI / 2.0, n))
                              .back());
    for (std::size_t k = 1; k < p_final.size(); ++k) REQUIRE(p_final[k] > p_final[k - 1]);
    REQUIRE(p_final.back() > 0.85);
}

TEST_CASE("unconditional watched pot caps the branch tree at N = 20") {
    REQUIRE_THROWS_AS(
        watched_pot_unconditional(sigma_x(), ground(), pi_ground(), Dissection::uniform(1.0, 21)),
        ContractViolation);
}
