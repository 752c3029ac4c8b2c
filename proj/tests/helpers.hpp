#ifndef JUMPKIT_TESTS_HELPERS_HPP
#define JUMPKIT_TESTS_HELPERS_HPP

// Seeded random fixtures shared across the test suites.

#include <random>
#include <vector>

#include "jumpkit/beables.hpp"
#include "jumpkit/hilbert.hpp"

namespace jumpkit::testing {

inline Vector random_state(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = Complex(gauss(rng), gauss(rng));
    return v / v.norm();
}

inline Matrix random_matrix(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return m;
}

inline Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    Matrix m = random_matrix(dim, rng);
    return (m + m.adjoint()) / 2.0;
}

inline Matrix random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(dim, rng));
    Matrix q = qr.householderQ();
    return q;
}

// Orthogonal block family built from the column groups of a random unitary.
inline ViableFamily random_block_family(const std::vector<Eigen::Index>& block_sizes, std::mt19937_64& rng) {
    Eigen::Index dim = 0;
    for (Eigen::Index s : block_sizes) dim += s;
    Matrix u = random_unitary(dim, rng);
    std::vector<Matrix> frames;
    Eigen::Index col = 0;
    for (Eigen::Index s : block_sizes) {
        frames.push_back(u.middleCols(col, s));
        col += s;
    }
    return ViableFamily::fixed(std::move(frames));
}

}  // namespace jumpkit::testing

#endif
