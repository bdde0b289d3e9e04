#include "daekit/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace daekit::linalg {

namespace {

// Rank from a singular value spectrum, with the ambiguity band check.
int rank_from_singular_values(const Vector& sv, const RankOptions& opts) {
    if (sv.size() == 0) return 0;
    const double smax = sv(0);
    if (!(smax > 0.0)) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double rel = sv(i) / smax;
        if (rel > opts.tol * opts.ambiguity_factor) {
            ++rank;
        } else if (rel > opts.tol) {
            if (opts.throw_on_ambiguous) {
                throw NumericalRankAmbiguous(
                    "singular value ratio " + std::to_string(rel) +
                    " falls in the rank-decision ambiguity band");
            }
            ++rank; // treat as nonzero when ambiguity is tolerated
        }
    }
    return rank;
}

} // namespace

int numerical_rank(const Matrix& M, const RankOptions& opts) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return rank_from_singular_values(svd.singularValues(), opts);
}

Matrix orthonormal_range(const Matrix& M, const RankOptions& opts) {
    if (M.rows() == 0 || M.cols() == 0) return Matrix(M.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    const int r = rank_from_singular_values(svd.singularValues(), opts);
    return svd.matrixU().leftCols(r);
}

Matrix nullspace(const Matrix& M, const RankOptions& opts) {
    if (M.cols() == 0) return Matrix(0, 0);
    if (M.rows() == 0) return Matrix::Identity(M.cols(), M.cols());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const int r = rank_from_singular_values(svd.singularValues(), opts);
    return svd.matrixV().rightCols(M.cols() - r);
}

Matrix subspace_sum(const Matrix& U, const Matrix& V, const RankOptions& opts) {
    Matrix both(U.rows(), U.cols() + V.cols());
    if (U.cols() > 0) both.leftCols(U.cols()) = U;
    if (V.cols() > 0) both.rightCols(V.cols()) = V;
    return orthonormal_range(both, opts);
}

Matrix subspace_intersection(const Matrix& U, const Matrix& V, const RankOptions& opts) {
    if (U.cols() == 0 || V.cols() == 0) return Matrix(U.rows(), 0);
    // [U  -V] (a; b) = 0  =>  U a = V b lies in the intersection.
    Matrix stacked(U.rows(), U.cols() + V.cols());
    stacked.leftCols(U.cols()) = U;
    stacked.rightCols(V.cols()) = -V;
    Matrix ns = nullspace(stacked, opts);
    if (ns.cols() == 0) return Matrix(U.rows(), 0);
    Matrix inter = U * ns.topRows(U.cols());
    return orthonormal_range(inter, opts);
}

Matrix complement_within(const Matrix& Sub, const Matrix& Big, const RankOptions& opts) {
    if (Big.cols() == 0) return Matrix(Big.rows(), 0);
    if (Sub.cols() == 0) return orthonormal_range(Big, opts);
    Matrix proj = Big - Sub * (Sub.transpose() * Big);
    return orthonormal_range(proj, opts);
}

Matrix preimage(const Matrix& M, const Matrix& S, const RankOptions& opts) {
    if (S.cols() == 0) return nullspace(M, opts);
    Matrix residual_map = M - S * (S.transpose() * M);
    return nullspace(residual_map, opts);
}

Vector solve_min_norm(const Matrix& A, const Vector& b, double tol) {
    if (A.cols() == 0) return Vector(0);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol);
    return svd.solve(b);
}

SylvesterSolution solve_coupling(const Matrix& A1, const Matrix& A2, const Matrix& Ca,
                                 const Matrix& B1, const Matrix& B2, const Matrix& Cb) {
    const Eigen::Index m1 = A1.rows(), n1 = A1.cols();
    const Eigen::Index m2 = A2.rows(), n2 = A2.cols();
    SylvesterSolution out;
    out.R = Matrix::Zero(n1, n2);
    out.L = Matrix::Zero(m1, m2);
    if (m1 == 0 || n2 == 0) return out;

    const Eigen::Index rows = 2 * m1 * n2;
    const Eigen::Index cols = n1 * n2 + m1 * m2;
    Matrix sys = Matrix::Zero(rows, cols);
    Vector rhs(rows);

    // vec(A1 R) = (I ⊗ A1) vec(R),  vec(L A2) = (A2ᵀ ⊗ I) vec(L)
    for (Eigen::Index j = 0; j < n2; ++j) {
        sys.block(j * m1, j * n1, m1, n1) = A1;
        sys.block(m1 * n2 + j * m1, j * n1, m1, n1) = B1;
        for (Eigen::Index k = 0; k < m2; ++k) {
            sys.block(j * m1, n1 * n2 + k * m1, m1, m1).diagonal().array() += A2(k, j);
            sys.block(m1 * n2 + j * m1, n1 * n2 + k * m1, m1, m1).diagonal().array() += B2(k, j);
        }
        rhs.segment(j * m1, m1) = Ca.col(j);
        rhs.segment(m1 * n2 + j * m1, m1) = Cb.col(j);
    }

    Vector sol = solve_min_norm(sys, rhs);
    for (Eigen::Index j = 0; j < n2; ++j)
        out.R.col(j) = sol.segment(j * n1, n1);
    for (Eigen::Index k = 0; k < m2; ++k)
        out.L.col(k) = sol.segment(n1 * n2 + k * m1, m1);

    const double scale = 1.0 + rhs.norm();
    out.residual = (sys * sol - rhs).norm() / scale;
    return out;
}

Matrix hcat(std::initializer_list<const Matrix*> parts, Eigen::Index rows) {
    Eigen::Index cols = 0;
    for (const Matrix* p : parts) cols += p->cols();
    Matrix out(rows, cols);
    Eigen::Index off = 0;
    for (const Matrix* p : parts) {
        if (p->cols() > 0) out.middleCols(off, p->cols()) = *p;
        off += p->cols();
    }
    return out;
}

double max_abs(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& M) {
    return M.allFinite();
}

} // namespace daekit::linalg
