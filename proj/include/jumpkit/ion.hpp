#ifndef JUMPKIT_ION_HPP
#define JUMPKIT_ION_HPP

// Three-level ion under a strong (red) and a weak (blue) drive: no-jump
// amplitude ODEs, the n-photon probability recursion, Monte Carlo telegraph
// fluorescence, and dark-period statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"
#include "jumpkit/pilot.hpp"
#include "jumpkit/rng.hpp"

namespace jumpkit {

// Angular-frequency units, hbar = 1. The imaginary parts of the complex
// decay rates are level shifts and act as additional detunings.
struct IonParams {
    Complex lambda_r;  // strong coupling to the red-excited state
    Complex lambda_b;  // weak coupling to the shelf state
    double delta_r = 0.0;
    double delta_b = 0.0;
    Complex gamma_r;   // decay rate of the red-excited state, Re >= 0
    Complex gamma_b;   // decay rate of the shelf state, Re >= 0

    void validate() const {
        if (gamma_r.real() < 0.0 || gamma_b.real() < 0.0)
            throw ContractViolation("IonParams: decay rates must have Re >= 0");
    }

    // Shelving regime: blue coupling and decay both well below the red scale.
    bool shelving_regime() const {
        double red_scale = std::max(std::abs(lambda_r), gamma_r.real());
        return std::abs(lambda_b) <= 0.1 * red_scale && gamma_b.real() <= 0.1 * red_scale;
    }

    // Non-Hermitian generator: d(f,g,h)/dt = -i H_eff (f,g,h).
    Matrix effective_hamiltonian() const {
        validate();
        const Complex i(0.0, 1.0);
        Matrix h = Matrix::Zero(3, 3);
        h(0, 1) = std::conj(lambda_r);
        h(0, 2) = std::conj(lambda_b);
        h(1, 0) = lambda_r;
        h(2, 0) = lambda_b;
        h(1, 1) = delta_r - i * gamma_r;
        h(2, 2) = delta_b - i * gamma_b;
        return h;
    }
};

struct AmplitudeTriple {
    Complex f, g, h;  // ground, red-excited, shelf
    double survival() const { return std::norm(f) + std::norm(g) + std::norm(h); }
};

inline AmplitudeTriple amplitude_triple(const Vector& state) {
    if (state.size() != 3) throw ContractViolation("amplitude_triple: need a 3-dim state");
    return {state[0], state[1], state[2]};
}

// No-jump evolution from the ground state: f(0)=1, g(0)=h(0)=0. The squared
// norm decays at 2 Re(gamma_r)|g|^2 + 2 Re(gamma_b)|h|^2 pointwise.
inline Trajectory no_jump_amplitudes(const IonParams& p, const std::vector<double>& grid,
                                     const EvolveOptions& opt = {}) {
    Vector psi0(3);
    psi0 << 1.0, 0.0, 0.0;
    return evolve_effective(HamiltonianSchedule::constant(p.effective_hamiltonian(), /*hermitian=*/false),
                            psi0, grid, opt);
}

enum class AtomState { ground = 0, red = 1, shelf = 2 };

// P[a][n](t): probability of n emitted photons with the atom in state a,
// built by the renewal recursion with the no-jump moduli as kernels.
class PhotonDistribution {
  public:
    PhotonDistribution(const IonParams& p, double horizon, int n_max, std::size_t grid_points) {
        if (n_max < 0) throw ContractViolation("photon_number_distribution: n_max must be >= 0");
        if (grid_points < 8) throw ContractViolation("photon_number_distribution: need >= 8 grid points");
        p.validate();
        times_ = uniform_grid(0.0, horizon, grid_points);
        n_max_ = n_max;
        const std::size_t n_pts = times_.size();
        const double dt = times_[1] - times_[0];
        const double rate_red = 2.0 * p.gamma_r.real();
        const double rate_blue = 2.0 * p.gamma_b.real();

        Trajectory nj = no_jump_amplitudes(p, times_);
        std::array<std::vector<double>, 3> w;  // |f|^2, |g|^2, |h|^2
        for (auto& v : w) v.resize(n_pts);
        for (std::size_t k = 0; k < n_pts; ++k) {
            AmplitudeTriple a = amplitude_triple(nj.states[k]);
            w[0][k] = std::norm(a.f);
            w[1][k] = std::norm(a.g);
            w[2][k] = std::norm(a.h);
        }

        prob_.assign(static_cast<std::size_t>(n_max) + 1, w);  // n = 0 starts as the no-jump moduli
        for (int n = 1; n <= n_max; ++n) {
            std::vector<double> source(n_pts);
            for (std::size_t j = 0; j < n_pts; ++j)
                source[j] = rate_red * prob_[n - 1][1][j] + rate_blue * prob_[n - 1][2][j];
            for (int a = 0; a < 3; ++a) {
                auto& out = prob_[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)];
                out.assign(n_pts, 0.0);
                for (std::size_t k = 1; k < n_pts; ++k) {
                    double acc = 0.5 * (w[static_cast<std::size_t>(a)][k] * source[0] +
                                        w[static_cast<std::size_t>(a)][0] * source[k]);
                    for (std::size_t j = 1; j < k; ++j)
                        acc += w[static_cast<std::size_t>(a)][k - j] * source[j];
                    out[k] = acc * dt;
                }
            }
        }

        // Geometric extrapolation of the un-tracked n > n_max mass.
        double mass_last = layer_mass(n_max, n_pts - 1);
        double mass_prev = n_max >= 1 ? layer_mass(n_max - 1, n_pts - 1) : 0.0;
        double ratio = (mass_prev > 0.0) ? std::min(mass_last / mass_prev, 0.98) : 0.0;
        tail_estimate_ = n_max >= 1 ? mass_last * ratio / (1.0 - ratio) : 1.0 - layer_mass(0, n_pts - 1);
        if (tail_estimate_ > 1e-2)
            throw NumericError("photon_number_distribution: truncation tail " +
                               std::to_string(tail_estimate_) + " exceeds 1e-2; increase n_max");
    }

    const std::vector<double>& times() const { return times_; }
    int n_max() const { return n_max_; }
    double tail_estimate() const { return tail_estimate_; }

    double value(AtomState a, int n, std::size_t k) const {
        return prob_[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)][k];
    }

    // Total probability over all tracked (a, n) at grid index k.
    double total(std::size_t k) const {
        double acc = 0.0;
        for (int n = 0; n <= n_max_; ++n) acc += layer_mass(n, k);
        return acc;
    }

    double mean_count(std::size_t k) const {
        double acc = 0.0;
        for (int n = 1; n <= n_max_; ++n) acc += n * layer_mass(n, k);
        return acc;
    }

    // Occupation of atom state a at grid index k, summed over photon number.
    double occupation(AtomState a, std::size_t k) const {
        double acc = 0.0;
        for (int n = 0; n <= n_max_; ++n) acc += value(a, n, k);
        return acc;
    }

  private:
    double layer_mass(int n, std::size_t k) const {
        return value(AtomState::ground, n, k) + value(AtomState::red, n, k) + value(AtomState::shelf, n, k);
    }

    std::vector<double> times_;
    int n_max_ = 0;
    double tail_estimate_ = 0.0;
    // prob_[n][a][k]
    std::vector<std::array<std::vector<double>, 3>> prob_;
};

inline PhotonDistribution photon_number_distribution(const IonParams& p, double horizon, int n_max,
                                                     std::size_t grid_points) {
    return PhotonDistribution(p, horizon, n_max, grid_points);
}

enum class PhotonColor { red, blue };

inline const char* to_string(PhotonColor c) { return c == PhotonColor::red ? "red" : "blue"; }

struct PhotonEvent {
    double time;
    PhotonColor color;
};

struct JumpRecord {
    std::vector<PhotonEvent> events;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    bool truncated = false;  // a no-jump stretch outlived the internal cap
};

// Waiting-time sampler: inverts the no-jump survival S(t) on a dense grid
// (fine segment for the fast bright dynamics, coarse tail out to the cap
// 100/Re(gamma_b)) with linear interpolation. Safe to share across threads.
class TelegraphSampler {
  public:
    explicit TelegraphSampler(const IonParams& p) : params_(p) {
        p.validate();
        if (!(p.gamma_b.real() > 0.0))
            throw ContractViolation("TelegraphSampler: Re(gamma_b) must be positive (sets the cap)");
        const double cap = 100.0 / p.gamma_b.real();
        double fast = std::max({std::abs(p.lambda_r), std::abs(p.lambda_b), std::abs(p.delta_r),
                                std::abs(p.delta_b), p.gamma_r.real(), p.gamma_b.real()});
        double t_fine = std::min(cap, 80.0 / fast);

        Matrix generator = Complex(0.0, -1.0) * p.effective_hamiltonian();
        Vector state(3);
        state << 1.0, 0.0, 0.0;
        fine_ = make_segment(generator, state, 0.0, t_fine, 80000);
        state = fine_.end_state;
        if (t_fine < cap) {
            double dt_coarse = std::max(fine_.dt, (cap - t_fine) / 200000.0);
            auto n_coarse = static_cast<std::size_t>(std::ceil((cap - t_fine) / dt_coarse));
            coarse_ = make_segment(generator, state, t_fine, cap, n_coarse);
            has_coarse_ = true;
        }
    }

    JumpRecord sample(double horizon, std::uint64_t seed) const {
        if (!(horizon > 0.0)) throw ContractViolation("sample_telegraph: horizon must be positive");
        Rng rng(seed);
        JumpRecord record;
        record.horizon = horizon;
        record.seed = seed;

        double t_global = 0.0;
        const double s_floor = has_coarse_ ? coarse_.s.back() : fine_.s.back();
        const double w_red = params_.gamma_r.real();
        const double w_blue = params_.gamma_b.real();
        while (t_global <= horizon) {
            double u = rng.uniform();
            if (u < s_floor) {
                record.truncated = true;  // effectively dark beyond the cap
                break;
            }
            auto [wait, g2, h2] = invert_survival(u);
            t_global += wait;
            if (t_global > horizon) break;
            double p_red_weight = w_red * g2;
            double p_total = p_red_weight + w_blue * h2;
            PhotonColor color =
                (p_total > 0.0 && rng.uniform() < p_red_weight / p_total) ? PhotonColor::red : PhotonColor::blue;
            record.events.push_back({t_global, color});
        }
        return record;
    }

    // No-jump lookup at elapsed time since the last emission:
    // (survival, |f|^2, |g|^2, |h|^2), linearly interpolated.
    struct NoJumpPoint {
        double survival, ground, red, shelf;
    };
    NoJumpPoint lookup(double elapsed) const {
        const Segment& seg = (!has_coarse_ || elapsed <= fine_.t0 + fine_.dt * (fine_.s.size() - 1))
                                 ? fine_
                                 : coarse_;
        double x = (elapsed - seg.t0) / seg.dt;
        auto i = static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(seg.s.size() - 1)));
        if (i + 1 >= seg.s.size()) i = seg.s.size() - 2;
        double frac = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
        auto lerp = [&](const std::vector<double>& v) { return v[i] + frac * (v[i + 1] - v[i]); };
        double s = lerp(seg.s), g2 = lerp(seg.g2), h2 = lerp(seg.h2);
        return {s, std::max(s - g2 - h2, 0.0), g2, h2};
    }

    double cap_time() const {
        const Segment& seg = has_coarse_ ? coarse_ : fine_;
        return seg.t0 + seg.dt * (seg.s.size() - 1);
    }

  private:
    struct Segment {
        double t0 = 0.0;
        double dt = 0.0;
        std::vector<double> s, g2, h2;  // survival and component moduli
        Vector end_state;
    };

    static Segment make_segment(const Matrix& generator, Vector state, double t0, double t1, std::size_t steps) {
        Segment seg;
        seg.t0 = t0;
        seg.dt = (t1 - t0) / static_cast<double>(steps);
        seg.s.reserve(steps + 1);
        seg.g2.reserve(steps + 1);
        seg.h2.reserve(steps + 1);
        Matrix step = (generator * seg.dt).exp();
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= steps; ++k) {
            double s = std::min(state.squaredNorm(), prev);  // guard roundoff against monotonicity
            prev = s;
            seg.s.push_back(s);
            seg.g2.push_back(std::norm(state[1]));
            seg.h2.push_back(std::norm(state[2]));
            if (k < steps) state = step * state;
        }
        seg.end_state = std::move(state);
        return seg;
    }

    // First time with S(t) <= u, linear interpolation between grid points.
    std::tuple<double, double, double> invert_survival(double u) const {
        const Segment& seg = (u >= fine_.s.back()) ? fine_ : coarse_;
        auto it = std::lower_bound(seg.s.begin(), seg.s.end(), u, std::greater<double>());
        auto i = static_cast<std::size_t>(it - seg.s.begin());
        if (i == 0) i = 1;
        if (i >= seg.s.size()) i = seg.s.size() - 1;
        double s_lo = seg.s[i - 1], s_hi = seg.s[i];
        double frac = (s_lo > s_hi) ? (s_lo - u) / (s_lo - s_hi) : 1.0;
        double wait = seg.t0 + seg.dt * (static_cast<double>(i - 1) + frac);
        double g2 = seg.g2[i - 1] + frac * (seg.g2[i] - seg.g2[i - 1]);
        double h2 = seg.h2[i - 1] + frac * (seg.h2[i] - seg.h2[i - 1]);
        return {wait, g2, h2};
    }

    IonParams params_;
    Segment fine_, coarse_;
    bool has_coarse_ = false;
};

inline JumpRecord sample_telegraph(const IonParams& p, double horizon, std::uint64_t seed) {
    return TelegraphSampler(p).sample(horizon, seed);
}

struct DarkStats {
    int n_dark = 0;
    double mean_dark = 0.0;         // mean length of gaps above threshold
    double mean_bright_rate = 0.0;  // photons per unit time inside bright periods
    double bright_time = 0.0;
    double dark_time = 0.0;
    double threshold = 0.0;
};

// A dark period is a maximal inter-event gap above the threshold. A
// non-positive threshold selects 20x the median gap.
inline DarkStats dark_period_stats(const JumpRecord& record, double threshold = 0.0) {
    if (record.events.size() < 100)
        throw StatisticsError("dark_period_stats: need at least 100 events, got " +
                              std::to_string(record.events.size()));
    std::vector<double> gaps;
    gaps.reserve(record.events.size() - 1);
    for (std::size_t k = 1; k < record.events.size(); ++k)
        gaps.push_back(record.events[k].time - record.events[k - 1].time);

    if (threshold <= 0.0) {
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        threshold = 20.0 * sorted[sorted.size() / 2];
    }

    DarkStats stats;
    stats.threshold = threshold;
    std::size_t n_bright_gaps = 0;
    for (double gap : gaps) {
        if (gap > threshold) {
            stats.n_dark += 1;
            stats.dark_time += gap;
        } else {
            stats.bright_time += gap;
            n_bright_gaps += 1;
        }
    }
    if (stats.n_dark > 0) stats.mean_dark = stats.dark_time / stats.n_dark;
    if (stats.bright_time > 0.0)
        stats.mean_bright_rate = static_cast<double>(n_bright_gaps) / stats.bright_time;
    return stats;
}

}  // namespace jumpkit

#endif
