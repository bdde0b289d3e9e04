#ifndef DAEKIT_LINALG_HPP
#define DAEKIT_LINALG_HPP

#include "daekit/types.hpp"

namespace daekit::linalg {

// Tracks relative rank decisions so callers can reject ambiguous ones.
// A singular value inside (tol, ambiguity_factor*tol) relative to the largest
// one makes the decision ambiguous.
struct RankOptions {
    double tol = 1e-10;
    double ambiguity_factor = 10.0;
    bool throw_on_ambiguous = false;
};

int numerical_rank(const Matrix& M, const RankOptions& opts);

// Orthonormal basis of range(M); empty (rows x 0) matrix when M ~ 0.
Matrix orthonormal_range(const Matrix& M, const RankOptions& opts);

// Orthonormal basis of ker(M) as columns; full identity basis when M ~ 0.
Matrix nullspace(const Matrix& M, const RankOptions& opts);

// Basis of range(U) + range(V).
Matrix subspace_sum(const Matrix& U, const Matrix& V, const RankOptions& opts);

// Basis of range(U) ∩ range(V). U, V need orthonormal columns.
Matrix subspace_intersection(const Matrix& U, const Matrix& V, const RankOptions& opts);

// Orthonormal basis of the part of range(Big) orthogonal to range(Sub).
// Sub must have orthonormal columns.
Matrix complement_within(const Matrix& Sub, const Matrix& Big, const RankOptions& opts);

// {x : M x ∈ range(S)}; S needs orthonormal columns (may have 0 columns).
Matrix preimage(const Matrix& M, const Matrix& S, const RankOptions& opts);

// Minimum-norm least-squares solution of A x = b.
Vector solve_min_norm(const Matrix& A, const Vector& b, double tol = 1e-12);

// Solves the generalized Sylvester system
//   A1 R + L A2 = Ca,   B1 R + L B2 = Cb
// for (R, L) in the minimum-norm least-squares sense. Returns the residual
// norm of the solved system relative to the data scale.
struct SylvesterSolution {
    Matrix R;
    Matrix L;
    double residual = 0.0;
};
SylvesterSolution solve_coupling(const Matrix& A1, const Matrix& A2, const Matrix& Ca,
                                 const Matrix& B1, const Matrix& B2, const Matrix& Cb);

// Horizontal concatenation tolerating zero-column parts.
Matrix hcat(std::initializer_list<const Matrix*> parts, Eigen::Index rows);

// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& M);

bool all_finite(const Matrix& M);

} // namespace daekit::linalg

#endif
