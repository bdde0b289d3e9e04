#ifndef DAEKIT_TESTS_SYNTHESIZE_HPP
#define DAEKIT_TESTS_SYNTHESIZE_HPP

#include "daekit/pencil.hpp"

#include <random>
#include <vector>

namespace daekit::testsupport {

// Known block structure for synthesized pencils: right singular blocks with
// the byte sizes in `eps` (ε = 0 gives a zero column), left singular blocks in
// `etas` (η = 0 gives a zero row), a finite regular part of dimension
// `finite_dim`, an index-1 infinite part of dimension `infinite_dim`, and
// optional 2×2 nilpotent blocks that push the regular index to 2.
struct KroneckerSpec {
    std::vector<int> eps;
    std::vector<int> etas;
    int finite_dim = 0;
    int infinite_dim = 0;
    int nilpotent2_blocks = 0;
    std::uint64_t seed = 0;
};

struct SynthesizedPencil {
    Matrix A, B;
    int b = 0, l = 0, a = 0, d = 0; // expected block dimensions
    int ys1 = 0, ys2 = 0;
    int expected_rank = 0;
};

inline Matrix random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    return Q;
}

inline SynthesizedPencil synthesize(const KroneckerSpec& spec) {
    int rows = 0, cols = 0;
    for (int e : spec.eps) {
        rows += e;
        cols += e + 1;
    }
    for (int h : spec.etas) {
        rows += h + 1;
        cols += h;
    }
    rows += spec.finite_dim + spec.infinite_dim + 2 * spec.nilpotent2_blocks;
    cols += spec.finite_dim + spec.infinite_dim + 2 * spec.nilpotent2_blocks;

    Matrix A = Matrix::Zero(rows, cols);
    Matrix B = Matrix::Zero(rows, cols);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    int r = 0, c = 0;
    for (int e : spec.eps) {
        for (int i = 0; i < e; ++i) {
            A(r + i, c + i) = 1.0;
            B(r + i, c + i + 1) = 1.0;
        }
        r += e;
        c += e + 1;
    }
    for (int h : spec.etas) {
        for (int i = 0; i < h; ++i) {
            A(r + i, c + i) = 1.0;
            B(r + i + 1, c + i) = 1.0;
        }
        r += h + 1;
        c += h;
    }
    if (spec.finite_dim > 0) {
        for (int i = 0; i < spec.finite_dim; ++i) {
            A(r + i, c + i) = 1.0;
            for (int j = 0; j < spec.finite_dim; ++j) B(r + i, c + j) = gauss(rng);
        }
        // Keep the finite block comfortably regular.
        for (int i = 0; i < spec.finite_dim; ++i) B(r + i, c + i) += 3.0;
        r += spec.finite_dim;
        c += spec.finite_dim;
    }
    for (int i = 0; i < spec.infinite_dim; ++i) {
        B(r + i, c + i) = 1.0;
    }
    r += spec.infinite_dim;
    c += spec.infinite_dim;
    for (int k = 0; k < spec.nilpotent2_blocks; ++k) {
        A(r, c + 1) = 1.0;
        B(r, c) = 1.0;
        B(r + 1, c + 1) = 1.0;
        r += 2;
        c += 2;
    }

    const Matrix Z = random_orthogonal(rows, rng);
    const Matrix T = random_orthogonal(cols, rng);

    SynthesizedPencil out;
    out.A = Z * A * T.transpose();
    out.B = Z * B * T.transpose();
    out.l = static_cast<int>(spec.eps.size());
    out.ys2 = static_cast<int>(spec.etas.size());
    int sum_eps = 0, sum_etas = 0;
    for (int e : spec.eps) sum_eps += e;
    for (int h : spec.etas) sum_etas += h;
    out.b = sum_eps + sum_etas;
    out.ys1 = out.b;
    out.a = spec.finite_dim;
    out.d = spec.infinite_dim + 2 * spec.nilpotent2_blocks; // nominal; index 2 rejects앞
    out.expected_rank = cols - static_cast<int>(spec.eps.size());
    return out;
}

} // namespace daekit::testsupport

#endif
