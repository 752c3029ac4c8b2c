#ifndef JUMPKIT_PILOT_HPP
#define JUMPKIT_PILOT_HPP

// Pilot-state integration: dpsi/dt = -i H(t) psi on a fixed output grid.
// The RK4 path refines its internal substeps (halving) until a step-doubling
// Cauchy bound and, under the Hermitian contract, a norm-drift bound are met.
// Deterministic by construction: no adaptive step controller.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"

namespace jumpkit {

struct HamiltonianSchedule {
    std::function<Matrix(double)> evaluator;
    bool hermitian_contract = true;
    bool time_independent = false;

    static HamiltonianSchedule constant(Matrix h, bool hermitian = true) {
        auto shared = std::make_shared<Matrix>(std::move(h));
        HamiltonianSchedule s;
        s.evaluator = [shared](double) { return *shared; };
        s.hermitian_contract = hermitian;
        s.time_independent = true;
        return s;
    }

    static HamiltonianSchedule time_varying(std::function<Matrix(double)> f, bool hermitian = true) {
        HamiltonianSchedule s;
        s.evaluator = std::move(f);
        s.hermitian_contract = hermitian;
        s.time_independent = false;
        return s;
    }

    Matrix sample(double t) const {
        Matrix h = evaluator(t);
        require_finite(h, "HamiltonianSchedule");
        if (hermitian_contract) require_hermitian(h, "HamiltonianSchedule(t=" + std::to_string(t) + ")");
        return h;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;

    std::size_t size() const { return times.size(); }

    // Index of the grid point nearest to t; t must lie on the grid within half a step.
    std::size_t index_of(double t) const {
        if (times.empty()) throw ContractViolation("Trajectory: empty");
        auto it = std::lower_bound(times.begin(), times.end(), t);
        std::size_t k = static_cast<std::size_t>(it - times.begin());
        if (k == times.size()) k = times.size() - 1;
        if (k > 0 && std::abs(times[k - 1] - t) < std::abs(times[k] - t)) --k;
        double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
        if (std::abs(times[k] - t) > 0.5 * dt + 1e-12)
            throw ContractViolation("Trajectory: time " + std::to_string(t) + " is not on the grid");
        return k;
    }

    const Vector& state_at(double t) const { return states[index_of(t)]; }
};

enum class EvolveMethod { rk4, eig_exact };

struct EvolveOptions {
    double cauchy_tol = 1e-9;   // max deviation between s and 2s substep runs
    double drift_tol = 1e-8;    // norm drift bound under the Hermitian contract
    int initial_substeps = 1;   // substeps per grid interval before refinement
    int max_doublings = 22;     // step floor: give up past initial * 2^max
};

namespace detail {

inline void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw ContractViolation("evolve: grid needs at least 2 points");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ContractViolation("evolve: grid must be strictly increasing");
}

// One full pass over the grid with a fixed number of substeps per interval.
// H(t) is sampled exactly at the RK4 stage times t, t+dt/2, t+dt.
inline Trajectory rk4_pass(const HamiltonianSchedule& h, const Vector& psi0, const std::vector<double>& grid,
                           int substeps) {
    Trajectory traj;
    traj.times = grid;
    traj.states.reserve(grid.size());
    traj.states.push_back(psi0);

    const Complex minus_i(0.0, -1.0);
    Matrix h_const;
    if (h.time_independent) h_const = h.sample(grid.front());

    Vector psi = psi0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double dt = (grid[k + 1] - grid[k]) / substeps;
        for (int s = 0; s < substeps; ++s) {
            double t = grid[k] + dt * s;
            const Matrix& h0 = h.time_independent ? h_const : h.sample(t);
            const Matrix& hm = h.time_independent ? h_const : h.sample(t + 0.5 * dt);
            const Matrix& h1 = h.time_independent ? h_const : h.sample(t + dt);
            Vector k1 = minus_i * (h0 * psi);
            Vector k2 = minus_i * (hm * (psi + (0.5 * dt) * k1));
            Vector k3 = minus_i * (hm * (psi + (0.5 * dt) * k2));
            Vector k4 = minus_i * (h1 * (psi + dt * k3));
            psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        require_finite(psi, "evolve");
        traj.states.push_back(psi);
    }
    return traj;
}

inline double max_state_deviation(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        worst = std::max(worst, (a.states[k] - b.states[k]).norm());
    return worst;
}

inline double max_norm_drift(const Trajectory& traj) {
    double n0 = traj.states.front().norm();
    double worst = 0.0;
    for (const Vector& s : traj.states) worst = std::max(worst, std::abs(s.norm() - n0));
    return worst;
}

// Instability on a too-coarse pass shows up as non-finite amplitudes; that
// counts as an unmet bound and triggers refinement like any other failure.
inline bool try_rk4_pass(const HamiltonianSchedule& h, const Vector& psi0, const std::vector<double>& grid,
                         int substeps, Trajectory& out) {
    try {
        out = rk4_pass(h, psi0, grid, substeps);
        return true;
    } catch (const NumericError&) {
        return false;
    }
}

inline Trajectory rk4_refined(const HamiltonianSchedule& h, const Vector& psi0, const std::vector<double>& grid,
                              const EvolveOptions& opt, bool enforce_drift) {
    int substeps = std::max(1, opt.initial_substeps);
    Trajectory coarse, fine;
    bool coarse_ok = try_rk4_pass(h, psi0, grid, substeps, coarse);
    for (int round = 0; round <= opt.max_doublings; ++round) {
        bool fine_ok = try_rk4_pass(h, psi0, grid, substeps * 2, fine);
        if (coarse_ok && fine_ok) {
            double dev = max_state_deviation(coarse, fine);
            bool drift_ok = !enforce_drift || max_norm_drift(fine) < opt.drift_tol;
            if (dev < opt.cauchy_tol && drift_ok) return fine;
        }
        substeps *= 2;
        coarse = std::move(fine);
        coarse_ok = fine_ok;
    }
    throw ConvergenceError("evolve: step floor reached without meeting the accuracy bound");
}

}  // namespace detail

// Schroedinger evolution of a normalized pilot state.
inline Trajectory evolve(const HamiltonianSchedule& h, const Vector& psi0, const std::vector<double>& grid,
                         EvolveMethod method = EvolveMethod::rk4, const EvolveOptions& opt = {}) {
    detail::check_grid(grid);
    require_finite(psi0, "evolve");
    if (h.hermitian_contract) require_normalized(psi0, "evolve");

    if (method == EvolveMethod::eig_exact) {
        if (!h.time_independent) throw ContractViolation("evolve: eig_exact requires a time-independent H");
        SpectralDecomposition spec(h.sample(grid.front()));
        Trajectory traj;
        traj.times = grid;
        traj.states.reserve(grid.size());
        for (double t : grid) traj.states.push_back(spec.apply_exp(t - grid.front(), psi0));
        return traj;
    }
    return detail::rk4_refined(h, psi0, grid, opt, h.hermitian_contract);
}

// Same ODE without renormalization; for norm-decaying effective Hamiltonians.
// The norm is non-increasing whenever the anti-Hermitian part of H(t) is
// negative semidefinite, which is the caller's model obligation.
inline Trajectory evolve_effective(const HamiltonianSchedule& h, const Vector& psi0,
                                   const std::vector<double>& grid, const EvolveOptions& opt = {}) {
    detail::check_grid(grid);
    require_finite(psi0, "evolve_effective");
    if (psi0.norm() > 1.0 + kNormTol)
        throw ContractViolation("evolve_effective: initial norm exceeds 1");
    HamiltonianSchedule relaxed = h;
    relaxed.hermitian_contract = false;
    return detail::rk4_refined(relaxed, psi0, grid, opt, /*enforce_drift=*/false);
}

}  // namespace jumpkit

#endif
