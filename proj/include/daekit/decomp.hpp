#ifndef DAEKIT_DECOMP_HPP
#define DAEKIT_DECOMP_HPP

#include "daekit/pencil.hpp"
#include "daekit/types.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace daekit {

// Block decomposition of a singular pencil: domain split
// Rⁿ = X_s1 ∔ X_s2 ∔ X_1 ∔ X_2 and codomain split
// Rᵐ = Y_s1 ∔ Y_s2 ∔ Y_1 ∔ Y_2 such that A, B are block diagonal across the
// singular/regular pairs, A acts invertibly X_s1→Y_s1 and X_1→Y_1, vanishes on
// X_s2 ∔ X_2, B acts invertibly X_2→Y_2, B X_s2 ⊆ Y_s1, and B X_s1 ⊆ Y_s1 ∔ Y_s2.
struct PencilDecomposition {
    int m = 0, n = 0;

    // Subspace dimensions: b = dim X_s1, l = dim X_s2, a = dim X_1, d = dim X_2.
    int b = 0, l = 0, a = 0, d = 0;
    // Codomain: dim Y_s1 = ys1, dim Y_s2 = ys2, dim Y_1 = a, dim Y_2 = d.
    int ys1 = 0, ys2 = 0;

    // Domain projectors (n×n).
    Matrix S, P, S1, S2, P1, P2;
    // Codomain projectors (m×m).
    Matrix F, Q, F1, F2, Q1, Q2;

    // Column bases: domain (n×b, n×l, n×a, n×d) and codomain counterparts.
    Matrix Sb, Sl, Pa, Pd;
    Matrix Yb1, Yb2, Ya, Yd;

    // Extended operators (m×n).
    Matrix Agen, Bgen, Bund, Bov, A1op, B1op, B2op;
    // Semi-inverses (n×m).
    Matrix AgenInv, A1Inv, B2Inv;

    int regular_index = 0; // 0 or 1
};

struct ValidationEntry {
    std::string name;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    double tol = 0.0;

    bool passed() const;
    double worst() const;
    std::string summary() const;
};

// Computes the block decomposition. Throws IndexTooHigh when the regular block
// has index >= 2, NumericalRankAmbiguous when a rank decision lands in the
// (tol, 10 tol) band.
PencilDecomposition decompose(const Pencil& p, double tol = 1e-10);

// Numerically checks every defining identity of the decomposition against the
// pencil; failures are report entries, never exceptions.
ValidationReport validate_decomposition(const Pencil& p, const PencilDecomposition& dec,
                                        double tol);

// Index of a regular pencil λA_r + B_r: 0 when A_r is invertible, 1 when the
// infinite part has nilpotency degree one. Throws IndexTooHigh otherwise and
// SingularPencilInput when the block is not regular.
int regular_block_index(const Matrix& Ar, const Matrix& Br, double tol = 1e-10);

// Spectral pair (P̃1, Q̃1) splitting a regular index-<=1 pencil into its finite
// and infinite parts; P̃2 = I - P̃1, Q̃2 = I - Q̃1.
std::pair<Matrix, Matrix> residue_projectors(const Matrix& Ar, const Matrix& Br,
                                             double tol = 1e-10);

// Fills projector-derived fields (bases, extended operators, semi-inverses,
// dims) from the projector set; optional explicit bases override the computed
// ones. Used when a decomposition is supplied externally.
struct ProjectorSet {
    Matrix S1, S2, P1, P2;
    Matrix F1, F2, Q1, Q2;
    Matrix Sb, Sl, Pa, Pd; // optional explicit domain bases (may be empty)
    Matrix Yb1, Yb2, Ya, Yd;
};
PencilDecomposition decomposition_from_projectors(const Pencil& p, const ProjectorSet& ps,
                                                  double tol = 1e-10);

// Sectioned text export (round-trippable).
void write_decomposition(std::ostream& out, const PencilDecomposition& dec);
void write_decomposition_file(const std::string& path, const PencilDecomposition& dec);
PencilDecomposition read_decomposition(std::istream& in);
PencilDecomposition read_decomposition_file(const std::string& path);

} // namespace daekit

#endif
