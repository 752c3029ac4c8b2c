#ifndef JUMPKIT_BEABLES_HPP
#define JUMPKIT_BEABLES_HPP

// Viable-subspace families, Born probabilities, the transition current and
// its minimal one-way rates, the master-equation residual, Schmidt-based
// family construction, and stochastic visible-state sampling.
//
// Subspaces are stored as orthonormal column frames V_m (projector = V V+),
// which keeps rank-one pointer families cheap at a few hundred sites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"
#include "jumpkit/pilot.hpp"
#include "jumpkit/rng.hpp"

namespace jumpkit {

constexpr double kRateFloor = 1e-12;  // occupation floor: no occupation, no outflow

class ViableFamily {
  public:
    static ViableFamily fixed(std::vector<Matrix> frames, std::vector<std::string> labels = {}) {
        ViableFamily f;
        f.static_frames_ = std::make_shared<std::vector<Matrix>>(std::move(frames));
        f.time_dependent_ = false;
        f.labels_ = finish_labels(std::move(labels), f.static_frames_->size());
        f.validate_frames(*f.static_frames_);
        return f;
    }

    static ViableFamily moving(std::function<std::vector<Matrix>(double)> frames_at,
                               std::vector<std::string> labels) {
        if (labels.empty()) throw ContractViolation("ViableFamily::moving: labels are required");
        ViableFamily f;
        f.frames_at_ = std::move(frames_at);
        f.time_dependent_ = true;
        f.labels_ = std::move(labels);
        return f;
    }

    bool time_dependent() const { return time_dependent_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    // Borrows the cached frames for static families, owns fresh ones for
    // moving families; avoids copying large frame sets in per-step loops.
    class FrameSet {
      public:
        explicit FrameSet(const std::vector<Matrix>* borrowed) : borrowed_(borrowed) {}
        explicit FrameSet(std::vector<Matrix> owned) : owned_(std::move(owned)) {}
        const std::vector<Matrix>& operator*() const { return borrowed_ ? *borrowed_ : owned_; }

      private:
        std::vector<Matrix> owned_;
        const std::vector<Matrix>* borrowed_ = nullptr;
    };

    FrameSet frame_set(double t) const {
        if (!time_dependent_) return FrameSet(static_frames_.get());
        std::vector<Matrix> f = frames_at_(t);
        if (f.size() != labels_.size())
            throw ContractViolation("ViableFamily: frame count changed over time");
        validate_frames(f);
        return FrameSet(std::move(f));
    }

    std::vector<Matrix> frames(double t) const { return *frame_set(t); }

    Matrix projector(double t, std::size_t m) const {
        FrameSet f = frame_set(t);
        return (*f).at(m) * (*f).at(m).adjoint();
    }

    // Completeness and pairwise orthogonality of the projector family.
    void validate_frames(const std::vector<Matrix>& frames) const {
        if (frames.empty()) throw ContractViolation("ViableFamily: empty family");
        Eigen::Index dim = frames.front().rows();
        Matrix total = Matrix::Zero(dim, dim);
        for (std::size_t m = 0; m < frames.size(); ++m) {
            const Matrix& v = frames[m];
            if (v.rows() != dim) throw ContractViolation("ViableFamily: inconsistent dimensions");
            if (v.cols() > 0) {
                Matrix gram = v.adjoint() * v;
                if (max_abs(gram - Matrix::Identity(v.cols(), v.cols())) >= kProjectorTol)
                    throw ContractViolation("ViableFamily: frame " + std::to_string(m) +
                                            " columns are not orthonormal");
            }
            total += v * v.adjoint();
            for (std::size_t n = 0; n < m; ++n)
                if (frames[n].cols() > 0 && v.cols() > 0 &&
                    max_abs(frames[n].adjoint() * v) >= kProjectorTol)
                    throw ContractViolation("ViableFamily: subspaces " + std::to_string(n) + " and " +
                                            std::to_string(m) + " are not orthogonal");
        }
        if (max_abs(total - Matrix::Identity(dim, dim)) >= kProjectorTol)
            throw ContractViolation("ViableFamily: projectors do not sum to the identity");
    }

  private:
    static std::vector<std::string> finish_labels(std::vector<std::string> labels, std::size_t n) {
        if (labels.empty()) {
            labels.reserve(n);
            for (std::size_t m = 0; m < n; ++m) labels.push_back("S" + std::to_string(m));
        }
        return labels;
    }

    std::shared_ptr<const std::vector<Matrix>> static_frames_;
    std::function<std::vector<Matrix>(double)> frames_at_;
    std::vector<std::string> labels_;
    bool time_dependent_ = false;
};

// P_m = ||Pi_m psi||^2 = <psi|Pi_m|psi>.
inline RealVector born_probabilities(const Vector& psi, const ViableFamily& fam, double t) {
    require_normalized(psi, "born_probabilities");
    ViableFamily::FrameSet fs = fam.frame_set(t);
    const std::vector<Matrix>& frames = *fs;
    RealVector p(static_cast<Eigen::Index>(frames.size()));
    for (std::size_t m = 0; m < frames.size(); ++m)
        p[static_cast<Eigen::Index>(m)] = (frames[m].adjoint() * psi).squaredNorm();
    if (std::abs(p.sum() - 1.0) > kProjectorTol)
        throw ContractViolation("born_probabilities: probabilities sum to " + std::to_string(p.sum()));
    return p;
}

// Transition current J_mn = 2 Im<psi|Pi_m H Pi_n|psi> plus, for families that
// move in time, the antisymmetrized projector-velocity term built from
// K_mn = Re<psi|(dPi_m/dt) Pi_n|psi> with dPi/dt by central finite difference.
// Row sums reproduce dP_m/dt; zero diagonal; antisymmetric within 1e-10.
inline RealMatrix current_matrix(const Vector& psi, const Matrix& h, const ViableFamily& fam, double t,
                                 double dt_fd = 1e-6) {
    require_normalized(psi, "current_matrix");
    require_hermitian(h, "current_matrix");
    ViableFamily::FrameSet fs = fam.frame_set(t);
    const std::vector<Matrix>& frames = *fs;
    const auto m_count = static_cast<Eigen::Index>(frames.size());

    std::vector<Vector> component(frames.size()), h_component(frames.size());
    for (std::size_t m = 0; m < frames.size(); ++m) {
        component[m] = frames[m] * (frames[m].adjoint() * psi);
        h_component[m] = h * component[m];
    }

    RealMatrix j = RealMatrix::Zero(m_count, m_count);
    for (Eigen::Index m = 0; m < m_count; ++m)
        for (Eigen::Index n = 0; n < m_count; ++n) {
            if (m == n) continue;
            j(m, n) = 2.0 * std::imag(component[m].dot(h_component[n]));
        }

    if (fam.time_dependent()) {
        if (!(dt_fd > 0.0)) throw ContractViolation("current_matrix: dt_fd must be positive");
        ViableFamily::FrameSet fs_plus = fam.frame_set(t + dt_fd);
        ViableFamily::FrameSet fs_minus = fam.frame_set(t - dt_fd);
        const std::vector<Matrix>& plus = *fs_plus;
        const std::vector<Matrix>& minus = *fs_minus;
        RealMatrix k = RealMatrix::Zero(m_count, m_count);
        for (Eigen::Index m = 0; m < m_count; ++m) {
            const Matrix& vp = plus[static_cast<std::size_t>(m)];
            const Matrix& vm = minus[static_cast<std::size_t>(m)];
            for (Eigen::Index n = 0; n < m_count; ++n) {
                const Vector& cn = component[static_cast<std::size_t>(n)];
                Vector dpi_cn = (vp * (vp.adjoint() * cn) - vm * (vm.adjoint() * cn)) / (2.0 * dt_fd);
                k(m, n) = std::real(psi.dot(dpi_cn));
            }
        }
        j += k - k.transpose();
    }

    if ((j + j.transpose()).cwiseAbs().maxCoeff() >= kProjectorTol)
        throw ContractViolation("current_matrix: current is not antisymmetric");
    return j;
}

// Bell's minimal one-way rates: T_mn = max(J_mn, 0)/P_n, floored at empty
// sources. T_mn is the rate n -> m; the diagonal is zero.
inline RealMatrix bell_rates(const RealMatrix& j, const RealVector& p, double p_floor = kRateFloor) {
    if (j.rows() != j.cols() || j.rows() != p.size())
        throw ContractViolation("bell_rates: shape mismatch");
    RealMatrix t = RealMatrix::Zero(j.rows(), j.cols());
    for (Eigen::Index m = 0; m < j.rows(); ++m)
        for (Eigen::Index n = 0; n < j.cols(); ++n) {
            if (m == n) continue;
            if (p[n] >= p_floor) t(m, n) = std::max(j(m, n), 0.0) / p[n];
        }
    return t;
}

// Max over interior grid points and labels of |dP_m/dt - sum_n (w_mn - w_nm)|,
// with dP/dt by central differences on the pilot grid and w_mn = T_mn P_n.
inline double master_residual(const Trajectory& pilot, const ViableFamily& fam, const Matrix& h,
                              double p_floor = kRateFloor) {
    if (pilot.size() < 3) throw ContractViolation("master_residual: need at least 3 grid points");
    const std::size_t n_pts = pilot.size();
    const auto m_count = static_cast<Eigen::Index>(fam.size());

    std::vector<RealVector> p(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) p[k] = born_probabilities(pilot.states[k], fam, pilot.times[k]);

    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n_pts; ++k) {
        double dt_fd = 0.5 * (pilot.times[k + 1] - pilot.times[k - 1]);
        RealMatrix j = current_matrix(pilot.states[k], h, fam, pilot.times[k],
                                      0.5 * (pilot.times[k + 1] - pilot.times[k - 1]));
        for (Eigen::Index m = 0; m < m_count; ++m) {
            double dp = (p[k + 1][m] - p[k - 1][m]) / (2.0 * dt_fd);
            double flow = 0.0;
            for (Eigen::Index n = 0; n < m_count; ++n) {
                double w_mn = p[k][n] >= p_floor ? std::max(j(m, n), 0.0) : 0.0;
                double w_nm = p[k][m] >= p_floor ? std::max(j(n, m), 0.0) : 0.0;
                flow += w_mn - w_nm;
            }
            worst = std::max(worst, std::abs(dp - flow));
        }
    }
    return worst;
}

// Viable family from the Schmidt decomposition of a bipartite pure state:
// one block S_1lambda (x) S_2lambda per (near-)degenerate group of marginal
// eigenvalues, plus the residual subspace completing the family.
inline ViableFamily schmidt_family(const Vector& psi, Eigen::Index dim_a, Eigen::Index dim_b,
                                   double degeneracy_tol = 1e-8) {
    if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != psi.size())
        throw ContractViolation("schmidt_family: split does not match the state dimension");
    require_normalized(psi, "schmidt_family");

    Matrix amp(dim_a, dim_b);
    for (Eigen::Index i = 0; i < dim_a; ++i)
        for (Eigen::Index j = 0; j < dim_b; ++j) amp(i, j) = psi[i * dim_b + j];

    Eigen::JacobiSVD<Matrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sigma = svd.singularValues();

    constexpr double kZeroWeight = 1e-12;
    std::vector<Matrix> frames;
    std::vector<std::string> labels;
    Eigen::Index dim = psi.size();
    Matrix covered = Matrix::Zero(dim, dim);

    Eigen::Index k = 0;
    while (k < sigma.size()) {
        double lambda = sigma[k] * sigma[k];
        if (lambda <= kZeroWeight) break;
        Eigen::Index k_end = k + 1;
        while (k_end < sigma.size()) {
            double next = sigma[k_end] * sigma[k_end];
            if (std::abs(next - lambda) > degeneracy_tol * std::max(lambda, next)) break;
            ++k_end;
        }
        Eigen::Index r = k_end - k;
        Matrix frame_a = svd.matrixU().middleCols(k, r);
        Matrix frame_b = svd.matrixV().middleCols(k, r).conjugate();
        Matrix frame = tensor(frame_a, frame_b);
        covered += frame * frame.adjoint();
        frames.push_back(std::move(frame));
        labels.push_back("lambda=" + std::to_string(lambda));
        k = k_end;
    }

    // Residual frame: eigenvectors of I - sum(Pi) with eigenvalue ~ 1.
    Matrix residual = Matrix::Identity(dim, dim) - covered;
    Eigen::SelfAdjointEigenSolver<Matrix> es(residual);
    Eigen::Index r_res = 0;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (es.eigenvalues()[i] > 0.5) ++r_res;
    Matrix frame_res(dim, r_res);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (es.eigenvalues()[i] > 0.5) frame_res.col(col++) = es.eigenvectors().col(i);
    frames.push_back(std::move(frame_res));
    labels.push_back("residual");

    return ViableFamily::fixed(std::move(frames), std::move(labels));
}

struct Jump {
    double time;
    int from;
    int to;
};

struct VisibleTrajectory {
    std::vector<double> times;
    std::vector<int> label_index;    // viable-subspace index per grid point
    std::vector<std::string> labels; // family labels, for serialization
    std::vector<Jump> jumps;
    std::uint64_t seed = 0;
};

// Precomputed per-step jump probabilities shared across an ensemble of seeds.
// Each pilot step may be subdivided so that every substep keeps the total
// jump probability below 0.1, rates held fixed within the step.
class RateTable {
  public:
    RateTable(const Trajectory& pilot, const ViableFamily& fam, const Matrix& h, double p_floor = kRateFloor)
        : times_(pilot.times), m_count_(static_cast<int>(fam.size())), labels_(fam.labels()) {
        if (pilot.size() < 2) throw ContractViolation("RateTable: need at least 2 grid points");
        p0_ = born_probabilities(pilot.states.front(), fam, pilot.times.front());

        constexpr double kMaxStepProb = 0.1;
        constexpr int kMaxSubdivision = 1 << 16;
        steps_.reserve(pilot.size() - 1);
        for (std::size_t k = 0; k + 1 < pilot.size(); ++k) {
            double dt = pilot.times[k + 1] - pilot.times[k];
            RealMatrix j = current_matrix(pilot.states[k], h, fam, pilot.times[k], dt);
            RealVector p = born_probabilities(pilot.states[k], fam, pilot.times[k]);
            RealMatrix rates = bell_rates(j, p, p_floor);

            double worst_out = 0.0;
            for (int n = 0; n < m_count_; ++n) worst_out = std::max(worst_out, rates.col(n).sum());
            int subdiv = 1;
            if (worst_out * dt >= kMaxStepProb) {
                double needed = std::ceil(worst_out * dt / (0.5 * kMaxStepProb));
                if (!(needed <= kMaxSubdivision))
                    throw StepSizeError("sample_visible: rates too large for the pilot grid (needed " +
                                        std::to_string(needed) + " subdivisions at t=" +
                                        std::to_string(pilot.times[k]) + ")");
                subdiv = static_cast<int>(needed);
            }

            Step st;
            st.subdivisions = subdiv;
            st.dt_sub = dt / subdiv;
            // cum(n, m): cumulative probability over destinations <= n of a
            // jump out of m within one substep.
            st.cum = RealMatrix::Zero(m_count_, m_count_);
            for (int m = 0; m < m_count_; ++m) {
                double acc = 0.0;
                for (int n = 0; n < m_count_; ++n) {
                    acc += rates(n, m) * st.dt_sub;
                    st.cum(n, m) = acc;
                }
            }
            steps_.push_back(std::move(st));
        }
    }

    VisibleTrajectory sample(std::uint64_t seed) const {
        Rng rng(seed);
        VisibleTrajectory out;
        out.times = times_;
        out.labels = labels_;
        out.seed = seed;
        out.label_index.reserve(times_.size());

        int label = draw_from_cumulative(p0_, rng.uniform());
        out.label_index.push_back(label);

        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const Step& st = steps_[k];
            for (int s = 0; s < st.subdivisions; ++s) {
                double u = rng.uniform();
                double total = st.cum(m_count_ - 1, label);
                if (u < total) {
                    int dest = 0;
                    while (dest < m_count_ && u >= st.cum(dest, label)) ++dest;
                    double t_jump = times_[k] + st.dt_sub * (s + 1);
                    out.jumps.push_back(Jump{t_jump, label, dest});
                    label = dest;
                }
            }
            out.label_index.push_back(label);
        }
        return out;
    }

    const RealVector& initial_probabilities() const { return p0_; }
    const std::vector<double>& times() const { return times_; }

  private:
    static int draw_from_cumulative(const RealVector& p, double u) {
        double acc = 0.0;
        for (Eigen::Index m = 0; m < p.size(); ++m) {
            acc += p[m];
            if (u < acc) return static_cast<int>(m);
        }
        return static_cast<int>(p.size() - 1);
    }

    struct Step {
        int subdivisions;
        double dt_sub;
        RealMatrix cum;
    };

    std::vector<double> times_;
    int m_count_;
    std::vector<std::string> labels_;
    RealVector p0_;
    std::vector<Step> steps_;
};

inline VisibleTrajectory sample_visible(const Trajectory& pilot, const ViableFamily& fam, const Matrix& h,
                                        std::uint64_t seed, double p_floor = kRateFloor) {
    return RateTable(pilot, fam, h, p_floor).sample(seed);
}

// Label occupation counts of an ensemble at selected grid indices; rows are
// checkpoints, columns are labels. Seeds are seed0 .. seed0+n-1.
inline Eigen::MatrixXi ensemble_occupancy(const RateTable& table, std::uint64_t seed0, std::size_t n_traj,
                                          const std::vector<std::size_t>& checkpoints) {
    const std::size_t n_cp = checkpoints.size();
    const std::size_t n_labels = table.initial_probabilities().size();
    unsigned workers = worker_count();
    std::vector<Eigen::MatrixXi> partial(workers,
                                         Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_cp),
                                                               static_cast<Eigen::Index>(n_labels)));
    std::size_t chunk = (n_traj + workers - 1) / workers;
    parallel_for_index(workers, [&](std::size_t w) {
        std::size_t lo = w * chunk, hi = std::min(n_traj, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            VisibleTrajectory v = table.sample(seed0 + i);
            for (std::size_t c = 0; c < n_cp; ++c)
                partial[w](static_cast<Eigen::Index>(c), v.label_index[checkpoints[c]]) += 1;
        }
    });
    Eigen::MatrixXi total = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_cp),
                                                  static_cast<Eigen::Index>(n_labels));
    for (const auto& m : partial) total += m;
    return total;
}

}  // namespace jumpkit

#endif
