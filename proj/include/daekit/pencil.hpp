#ifndef DAEKIT_PENCIL_HPP
#define DAEKIT_PENCIL_HPP

#include "daekit/types.hpp"

#include <iosfwd>
#include <vector>

namespace daekit {

// The pencil λA + B of two real m×n matrices. Immutable after construction.
class Pencil {
public:
    Pencil(Matrix A, Matrix B);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    int rows() const { return static_cast<int>(A_.rows()); }
    int cols() const { return static_cast<int>(A_.cols()); }

private:
    Matrix A_;
    Matrix B_;
};

enum class PencilTag { Regular, Singular };

struct PencilClass {
    PencilTag tag = PencilTag::Singular;
    int rank = 0;
};

// Deterministic real λ samples used by rank and regularity probes.
// The first eight are {1, -1, 2, -3, 5, 7.5, -11, 13}; further entries
// continue with sign-alternating primes.
std::vector<double> lambda_samples(int count);

// Pencil rank: max over sampled λ of the numerical rank of λA + B.
// Real samples suffice because the rank of a real pencil is attained at all
// but finitely many real λ.
int pencil_rank(const Pencil& p, int samples = 8, double tol = 1e-10);

PencilClass classify_pencil(const Pencil& p, int rank);

// Whitespace-delimited text format with an "m n" header line, row-major body.
Matrix read_matrix_text(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix_text(std::ostream& out, const Matrix& M);
void write_matrix_file(const std::string& path, const Matrix& M);

} // namespace daekit

#endif
