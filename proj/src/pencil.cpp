#include "daekit/pencil.hpp"

#include "daekit/linalg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace daekit {

Pencil::Pencil(Matrix A, Matrix B) : A_(std::move(A)), B_(std::move(B)) {
    if (A_.rows() != B_.rows() || A_.cols() != B_.cols())
        throw ShapeMismatch("pencil matrices must have identical shape");
    if (A_.rows() == 0 || A_.cols() == 0)
        throw ShapeMismatch("pencil matrices must be nonempty");
    if (!linalg::all_finite(A_) || !linalg::all_finite(B_))
        throw NonFinite("pencil matrices must have finite entries");
}

std::vector<double> lambda_samples(int count) {
    static const std::vector<double> base = {1.0, -1.0, 2.0, -3.0, 5.0, 7.5, -11.0, 13.0};
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count && i < static_cast<int>(base.size()); ++i)
        out.push_back(base[static_cast<size_t>(i)]);
    // Continue with sign-alternating primes beyond the fixed prefix.
    auto is_prime = [](int v) {
        for (int d = 2; d * d <= v; ++d)
            if (v % d == 0) return false;
        return v > 1;
    };
    double sign = 1.0;
    for (int v = 17; static_cast<int>(out.size()) < count; ++v) {
        if (is_prime(v)) {
            out.push_back(sign * v);
            sign = -sign;
        }
    }
    return out;
}

int pencil_rank(const Pencil& p, int samples, double tol) {
    if (samples < 3)
        throw Error("pencil_rank requires samples >= 3");
    if (!(tol > 0.0))
        throw Error("pencil_rank requires tol > 0");
    linalg::RankOptions opts;
    opts.tol = tol;
    int best = 0;
    for (double lam : lambda_samples(samples)) {
        const Matrix M = lam * p.A() + p.B();
        best = std::max(best, linalg::numerical_rank(M, opts));
        if (best == std::min(p.rows(), p.cols())) break;
    }
    return best;
}

PencilClass classify_pencil(const Pencil& p, int rank) {
    PencilClass c;
    c.rank = rank;
    const bool regular = (p.rows() == p.cols()) && (rank == p.cols());
    c.tag = regular ? PencilTag::Regular : PencilTag::Singular;
    return c;
}

Matrix read_matrix_text(std::istream& in) {
    long m = -1, n = -1;
    if (!(in >> m >> n))
        throw ParseError("matrix header 'm n' expected");
    if (m < 0 || n < 0)
        throw ParseError("matrix dimensions must be nonnegative");
    Matrix M(m, n);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < n; ++j)
            if (!(in >> M(i, j)))
                throw ParseError("matrix body ended early at row " + std::to_string(i));
    return M;
}

Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open matrix file: " + path);
    return read_matrix_text(in);
}

void write_matrix_text(std::ostream& out, const Matrix& M) {
    out << M.rows() << " " << M.cols() << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
            out << buf << (j + 1 == M.cols() ? "" : " ");
        }
        out << "\n";
    }
}

void write_matrix_file(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open matrix file for writing: " + path);
    write_matrix_text(out, M);
}

} // namespace daekit
