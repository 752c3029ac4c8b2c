#ifndef JUMPKIT_DECAY_HPP
#define JUMPKIT_DECAY_HPP

// Unstable level coupled to a tight-binding half-line of decay products:
// dispersal kernel, survival amplitude by direct integration and by Volterra
// convolution quadrature, decay-rate extraction, one-way transition rates,
// and the refined time-since-decay pointer family.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jumpkit/beables.hpp"
#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"
#include "jumpkit/pilot.hpp"

namespace jumpkit {

// Basis: index 0 = unstable level, indices 1..L = chain sites. The hop g sets
// the dispersal speed; the revival time g*L bounds the usable window.
struct DecayModel {
    double epsilon;   // coupling of the unstable level to site 1
    double e0;        // unstable-level energy
    int chain_len;    // L
    double hop;       // nearest-neighbor hopping g
    double tau;       // nominal dispersal time, ~1/g

    static DecayModel make(double epsilon, double e0, int chain_len, double hop) {
        if (!(hop > 0.0)) throw ContractViolation("DecayModel: hop must be positive");
        if (chain_len < 50) throw ContractViolation("DecayModel: chain_len must be >= 50");
        if (epsilon < 0.0 || epsilon > 0.5 * hop)
            throw ContractViolation("DecayModel: need 0 <= epsilon <= hop/2 (weak coupling)");
        return DecayModel{epsilon, e0, chain_len, hop, 1.0 / hop};
    }

    Eigen::Index dim() const { return chain_len + 1; }

    Matrix full_hamiltonian() const {
        Matrix h = Matrix::Zero(dim(), dim());
        h(0, 0) = e0;
        for (int k = 1; k < chain_len; ++k) {
            h(k, k + 1) = hop;
            h(k + 1, k) = hop;
        }
        h(0, 1) = epsilon;
        h(1, 0) = epsilon;
        return h;
    }

    // Decay-product dynamics only (sites 1..L, no unstable level).
    Matrix chain_hamiltonian() const {
        Matrix h = Matrix::Zero(chain_len, chain_len);
        for (int k = 0; k + 1 < chain_len; ++k) {
            h(k, k + 1) = hop;
            h(k + 1, k) = hop;
        }
        return h;
    }

    double revival_window() const { return chain_len / (2.0 * hop); }

    // {undecayed, decayed}: span{e_0} and the full chain subspace.
    ViableFamily two_block_family() const {
        Matrix undecayed = Matrix::Zero(dim(), 1);
        undecayed(0, 0) = 1.0;
        Matrix chain = Matrix::Zero(dim(), chain_len);
        for (int k = 0; k < chain_len; ++k) chain(k + 1, k) = 1.0;
        return ViableFamily::fixed({undecayed, chain}, {"undecayed", "decayed"});
    }

    // Every basis state its own subspace: chain sites realize the
    // "time since decay" pointer states.
    ViableFamily site_family() const {
        std::vector<Matrix> frames;
        std::vector<std::string> labels;
        frames.reserve(dim());
        for (Eigen::Index m = 0; m < dim(); ++m) {
            Matrix f = Matrix::Zero(dim(), 1);
            f(m, 0) = 1.0;
            frames.push_back(std::move(f));
            labels.push_back(m == 0 ? "undecayed" : "site" + std::to_string(m));
        }
        return ViableFamily::fixed(std::move(frames), std::move(labels));
    }
};

struct Kernel {
    std::vector<double> times;  // uniform grid from 0
    Vector chi;                 // chi(t) = <site1| e^{-i H_chain t} |site1>
    double tau_eff = 0.0;       // first time after which |chi| stays below 0.05
};

namespace detail {

inline void check_uniform_from_zero(const std::vector<double>& grid, const std::string& who) {
    if (grid.size() < 3 || grid.front() != 0.0)
        throw ContractViolation(who + ": grid must start at 0 with at least 3 points");
    double dt = grid[1] - grid[0];
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (std::abs(grid[k] - grid[k - 1] - dt) > 1e-9 * dt)
            throw ContractViolation(who + ": grid must be uniform");
}

}  // namespace detail

constexpr double kDispersalThreshold = 0.05;

inline Kernel dispersal_kernel(const DecayModel& m, const std::vector<double>& grid) {
    detail::check_uniform_from_zero(grid, "dispersal_kernel");
    if (grid.back() > m.revival_window())
        throw WindowError("dispersal_kernel: grid extends past the pre-revival window L/(2g)");

    SpectralDecomposition spec(m.chain_hamiltonian());
    // |<site1|v_k>|^2 weights; site 1 is row 0 of the chain matrix.
    RealVector w = spec.eigenvectors().row(0).cwiseAbs2().real().transpose();

    Kernel kernel;
    kernel.times = grid;
    kernel.chi.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < w.size(); ++j)
            acc += w[j] * std::exp(Complex(0.0, -spec.eigenvalues()[j] * grid[k]));
        kernel.chi[static_cast<Eigen::Index>(k)] = acc;
    }
    if (std::abs(kernel.chi[0] - Complex(1.0, 0.0)) > 1e-10)
        throw NumericError("dispersal_kernel: chi(0) != 1");

    // Last time the kernel magnitude still reaches the threshold.
    std::ptrdiff_t last_above = -1;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (std::abs(kernel.chi[static_cast<Eigen::Index>(k)]) >= kDispersalThreshold)
            last_above = static_cast<std::ptrdiff_t>(k);
    if (last_above + 1 >= static_cast<std::ptrdiff_t>(grid.size()))
        throw WindowError("dispersal_kernel: |chi| has not decayed below threshold by the window end");
    kernel.tau_eff = grid[static_cast<std::size_t>(last_above + 1)];
    if (kernel.tau_eff > 0.5 * grid.back())
        throw WindowError("dispersal_kernel: kernel revival inside the window; increase chain_len");
    return kernel;
}

struct ComplexSamples {
    std::vector<double> times;
    Vector values;
};

// f(t) = <unstable|Psi(t)> from exact integration of the full Hamiltonian.
inline ComplexSamples survival_direct(const DecayModel& m, const std::vector<double>& grid) {
    detail::check_uniform_from_zero(grid, "survival_direct");
    if (grid.back() > m.revival_window())
        throw WindowError("survival_direct: grid extends past the pre-revival window L/(2g)");
    Vector psi0 = Vector::Zero(m.dim());
    psi0[0] = 1.0;
    Trajectory traj = evolve(HamiltonianSchedule::constant(m.full_hamiltonian()), psi0, grid,
                             EvolveMethod::eig_exact);
    ComplexSamples out;
    out.times = grid;
    out.values.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) out.values[static_cast<Eigen::Index>(k)] = traj.states[k][0];
    return out;
}

// Survival amplitude from the memory-kernel equation
//   d/dt [e^{+i e0 t} f(t)] = -eps^2 Int_0^t chi(t-s) e^{i e0 (t-s)} [e^{+i e0 s} f(s)] ds
// stepped by trapezoidal convolution quadrature on the kernel grid.
inline ComplexSamples survival_volterra(const Kernel& kernel, double epsilon, double e0,
                                        const std::vector<double>& grid) {
    detail::check_uniform_from_zero(grid, "survival_volterra");
    if (grid.size() != kernel.times.size() ||
        std::abs(grid.back() - kernel.times.back()) > 1e-9 * std::max(1.0, grid.back()))
        throw ContractViolation("survival_volterra: grid does not match the kernel grid");

    const std::size_t n = grid.size();
    const double dt = grid[1] - grid[0];
    const double eps2 = epsilon * epsilon;

    Vector k_phase(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        k_phase[static_cast<Eigen::Index>(j)] =
            kernel.chi[static_cast<Eigen::Index>(j)] * std::exp(Complex(0.0, e0 * grid[j]));

    Vector u(static_cast<Eigen::Index>(n));   // u = e^{+i e0 t} f
    Vector g(static_cast<Eigen::Index>(n));   // g = du/dt
    u[0] = 1.0;
    g[0] = 0.0;
    const Complex k0 = k_phase[0];
    for (std::size_t idx = 0; idx + 1 < n; ++idx) {
        // Trapezoidal history sum for the convolution at t_{idx+1},
        // excluding the (implicit) endpoint term in u_{idx+1}.
        Complex hist = 0.5 * k_phase[static_cast<Eigen::Index>(idx + 1)] * u[0];
        for (std::size_t j = 1; j <= idx; ++j)
            hist += k_phase[static_cast<Eigen::Index>(idx + 1 - j)] * u[static_cast<Eigen::Index>(j)];
        Complex rhs = u[static_cast<Eigen::Index>(idx)] + 0.5 * dt * g[static_cast<Eigen::Index>(idx)] -
                      0.5 * dt * eps2 * dt * hist;
        Complex denom = 1.0 + 0.25 * dt * dt * eps2 * k0;
        u[static_cast<Eigen::Index>(idx + 1)] = rhs / denom;
        g[static_cast<Eigen::Index>(idx + 1)] =
            -eps2 * dt * (hist + 0.5 * k0 * u[static_cast<Eigen::Index>(idx + 1)]);
    }

    ComplexSamples out;
    out.times = grid;
    out.values.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        out.values[static_cast<Eigen::Index>(j)] = std::exp(Complex(0.0, -e0 * grid[j])) * u[static_cast<Eigen::Index>(j)];
    return out;
}

// Gamma = eps^2 * Int_0^{window} chi(t) dt, the upper limit taken to the
// window end where chi is already negligible.
inline Complex gamma_estimate(const Kernel& kernel, double epsilon) {
    const std::size_t n = kernel.times.size();
    std::size_t tail_start = n - std::max<std::size_t>(1, n / 10);
    for (std::size_t k = tail_start; k < n; ++k)
        if (std::abs(kernel.chi[static_cast<Eigen::Index>(k)]) >= kDispersalThreshold)
            throw WindowError("gamma_estimate: kernel has not decayed by the window end");
    const double dt = kernel.times[1] - kernel.times[0];
    Complex acc = 0.5 * (kernel.chi[0] + kernel.chi[static_cast<Eigen::Index>(n - 1)]);
    for (std::size_t k = 1; k + 1 < n; ++k) acc += kernel.chi[static_cast<Eigen::Index>(k)];
    return epsilon * epsilon * dt * acc;
}

// Helper: exact pilot trajectory of the full model from the undecayed state.
inline Trajectory decay_pilot(const DecayModel& m, const std::vector<double>& grid) {
    Vector psi0 = Vector::Zero(m.dim());
    psi0[0] = 1.0;
    return evolve(HamiltonianSchedule::constant(m.full_hamiltonian()), psi0, grid, EvolveMethod::eig_exact);
}

// Bell rates for the {undecayed, decayed} family at a grid time t:
// returns (T_0d, T_d0) = (rate into the undecayed level, rate out of it).
inline std::pair<double, double> decay_bell_rates(const DecayModel& m, const Trajectory& pilot, double t) {
    std::size_t k = pilot.index_of(t);
    ViableFamily fam = m.two_block_family();
    const Vector& psi = pilot.states[k];
    Matrix h = m.full_hamiltonian();
    RealMatrix j = current_matrix(psi, h, fam, pilot.times[k]);
    RealVector p = born_probabilities(psi, fam, pilot.times[k]);
    RealMatrix rates = bell_rates(j, p);
    return {rates(0, 1), rates(1, 0)};
}

// Rates out of the undecayed level into each pointer site; entry m is the
// rate to site m (entry 0 unused). Vanishes identically for m >= 2 because
// the coupling only reaches site 1.
inline RealVector refined_jump_target(const DecayModel& m, const Trajectory& pilot, double t) {
    std::size_t k = pilot.index_of(t);
    ViableFamily fam = m.site_family();
    const Vector& psi = pilot.states[k];
    Matrix h = m.full_hamiltonian();
    RealMatrix j = current_matrix(psi, h, fam, pilot.times[k]);
    RealVector p = born_probabilities(psi, fam, pilot.times[k]);
    RealMatrix rates = bell_rates(j, p);
    return rates.col(0);
}

}  // namespace jumpkit

#endif
