#ifndef JUMPKIT_ZENO_HPP
#define JUMPKIT_ZENO_HPP

// Watched-pot experiments: repeated instantaneous projective measurements on
// an evolving system, the fine-dissection limit, and the small-time t^2 law.

#include <cmath>
#include <string>
#include <vector>

#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"

namespace jumpkit {

struct Dissection {
    std::vector<double> times;  // 0 = t_0 < t_1 < ... < t_N = T

    explicit Dissection(std::vector<double> ts) : times(std::move(ts)) {
        if (times.size() < 2 || times.front() != 0.0)
            throw ContractViolation("Dissection: need t_0 = 0 and at least one later time");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw ContractViolation("Dissection: times must be strictly increasing");
    }

    static Dissection uniform(double total_time, int n_measurements) {
        if (n_measurements < 1 || !(total_time > 0.0))
            throw ContractViolation("Dissection: need N >= 1 and T > 0");
        std::vector<double> ts(static_cast<std::size_t>(n_measurements) + 1);
        for (int k = 0; k <= n_measurements; ++k) ts[k] = total_time * k / n_measurements;
        return Dissection(std::move(ts));
    }

    int segments() const { return static_cast<int>(times.size()) - 1; }
};

namespace detail {

inline void check_watched_pot_inputs(const Matrix& h, const Vector& psi0, const Projector& pi_a) {
    require_hermitian(h, "watched_pot");
    require_normalized(psi0, "watched_pot");
    if ((project(pi_a, psi0) - psi0).norm() > kNormTol)
        throw ContractViolation("watched_pot: psi0 is not in the range of the projector");
}

}  // namespace detail

// Post-selected survival: the probability that every measurement so far gave
// the projector outcome. Evolve, project, accumulate the conditional factor,
// renormalize, repeat. p[k] is the value after the measurement at t_k.
inline std::vector<double> watched_pot(const Matrix& h, const Vector& psi0, const Projector& pi_a,
                                       const Dissection& d) {
    detail::check_watched_pot_inputs(h, psi0, pi_a);
    SpectralDecomposition spec(h);

    std::vector<double> p;
    p.reserve(d.times.size());
    p.push_back(1.0);
    Vector psi = psi0;
    for (std::size_t k = 0; k + 1 < d.times.size(); ++k) {
        psi = spec.apply_exp(d.times[k + 1] - d.times[k], psi);
        Vector kept = project(pi_a, psi);
        double survive = kept.squaredNorm() / psi.squaredNorm();
        p.push_back(p.back() * survive);
        if (kept.norm() == 0.0) {
            // Fully absorbed; every later conditional survival is zero.
            while (p.size() < d.times.size()) p.push_back(0.0);
            return p;
        }
        psi = kept / kept.norm();
    }
    return p;
}

// Unconditional variant: p[k] is the probability that the measurement at t_k
// gives the projector outcome, with both branches kept and remeasured. The
// binary branch tree is summed exactly, so N is capped at 20.
inline std::vector<double> watched_pot_unconditional(const Matrix& h, const Vector& psi0,
                                                     const Projector& pi_a, const Dissection& d) {
    detail::check_watched_pot_inputs(h, psi0, pi_a);
    if (d.segments() > 20)
        throw ContractViolation("watched_pot_unconditional: branch tree limited to N <= 20");
    SpectralDecomposition spec(h);

    struct Branch {
        Vector state;  // normalized
        double weight;
    };
    std::vector<double> p(d.times.size(), 0.0);
    p[0] = 1.0;
    std::vector<Branch> branches{{psi0, 1.0}};
    const Matrix complement = Matrix::Identity(h.rows(), h.cols()) - pi_a.matrix();

    for (std::size_t k = 0; k + 1 < d.times.size(); ++k) {
        std::vector<Branch> next;
        next.reserve(branches.size() * 2);
        for (const Branch& b : branches) {
            Vector evolved = spec.apply_exp(d.times[k + 1] - d.times[k], b.state);
            Vector yes = pi_a.matrix() * evolved;
            Vector no = complement * evolved;
            double w_yes = b.weight * yes.squaredNorm();
            double w_no = b.weight * no.squaredNorm();
            p[k + 1] += w_yes;
            if (w_yes > 1e-300) next.push_back({yes / yes.norm(), w_yes});
            if (w_no > 1e-300) next.push_back({no / no.norm(), w_no});
        }
        branches = std::move(next);
    }
    return p;
}

struct ZenoRow {
    int n;
    double p_n;
};

struct ZenoTable {
    std::vector<ZenoRow> rows;
    double slope = 0.0;      // fitted slope of log(1 - p_N) against log N
    bool slope_valid = false;
};

// Survival at fixed T across a list of measurement counts, with the
// convergence-rate fit log(1 - p_N) ~ -log N.
inline ZenoTable zeno_limit_check(const Matrix& h, const Vector& psi0, const Projector& pi_a, double total_time,
                                  const std::vector<int>& n_list) {
    ZenoTable table;
    std::vector<double> log_n, log_deficit;
    for (int n : n_list) {
        double p_n = watched_pot(h, psi0, pi_a, Dissection::uniform(total_time, n)).back();
        table.rows.push_back({n, p_n});
        double deficit = 1.0 - p_n;
        if (deficit > 1e-15) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_deficit.push_back(std::log(deficit));
        }
    }
    if (log_n.size() >= 2) {
        table.slope = fit_slope(log_n, log_deficit);
        table.slope_valid = true;
    }
    return table;
}

// Fits log(1 - ||Pi_A e^{-iHt} psi0||^2) against log t; ~2 for small t.
inline double small_time_law(const Matrix& h, const Vector& psi0, const Projector& pi_a,
                             const std::vector<double>& t_list) {
    detail::check_watched_pot_inputs(h, psi0, pi_a);
    if (t_list.size() < 2) throw ContractViolation("small_time_law: need at least 2 times");
    SpectralDecomposition spec(h);
    std::vector<double> log_t, log_q;
    for (double t : t_list) {
        Vector psi = spec.apply_exp(t, psi0);
        double q = 1.0 - project(pi_a, psi).squaredNorm() / psi.squaredNorm();
        if (q < 1e-14)
            throw NumericError("small_time_law: decay signal below 1e-14 at t = " + std::to_string(t) +
                               "; increase t");
        log_t.push_back(std::log(t));
        log_q.push_back(std::log(q));
    }
    return fit_slope(log_t, log_q);
}

}  // namespace jumpkit

#endif
